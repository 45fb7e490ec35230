#pragma once

// The two routes to a Dixmier trace and their comparison.
//
// Residue route: r_k = (1/k) zeta_{A,T}(1 + 1/k) on a ladder of k, then a
// least-squares polynomial fit in h = 1/k evaluated at h = 0.  If the fit does
// not describe the curve (large residuals, or the intercept moves when the
// coarsest point is dropped) the raw tail of the curve is reported as a band.
//
// Log-average route: gamma_N = S_N / log(1+N) converges like 1 + C/log N,
// far too slowly to certify anything at desk scale.  We judge instead the
// local rates (S_{N'} - S_N) / (log(1+N') - log(1+N)) between ladder points.
// gamma is a running average of these rates in log N, so its limit points lie
// inside [liminf, limsup] of the rates: a convergent rate pins the trace and a
// rate band contains every generalized limit of gamma.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dixmier/eigenvalue_sequence.hpp"
#include "dixmier/errors.hpp"
#include "dixmier/genlimits.hpp"
#include "dixmier/observable.hpp"
#include "dixmier/zeta.hpp"

namespace dixmier {

enum class Part { real, imag };

struct ResidueOptions {
  std::vector<long double> ks{8, 16, 32, 64, 128, 256, 512};
  long double point_tol = 1e-3;  // absolute, on (1/k) zeta
  int order = 2;
  long double fit_tol = 1e-3;  // relative to max(1, |value|)
  long double threshold = 1e-3;
  long double tail_fraction = 0.5;
  Part part = Part::real;
  bool parallel = true;
  ZetaOptions zeta;
};

struct ResiduePoint {
  long double k;
  long double s;
  Complex value;  // (1/k) zeta(1 + 1/k)
  long double error;
};

/// Points in increasing k, so s decreases strictly toward 1.
struct ResidueCurve {
  std::vector<ResiduePoint> points;

  [[nodiscard]] long double max_error() const {
    long double e = 0.0L;
    for (const auto& p : points) e = std::max(e, p.error);
    return e;
  }
  [[nodiscard]] std::vector<long double> values(Part part) const {
    std::vector<long double> v;
    for (const auto& p : points) v.push_back(part == Part::real ? p.value.real() : p.value.imag());
    return v;
  }
};

inline ResidueCurve residue_curve(const DiagonalObservable& A, const EigenvalueSequence& T,
                                  const ResidueOptions& opts = {}) {
  std::vector<long double> ks = opts.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (long double k : ks) {
    if (!(k > 0.0L)) throw DomainError("residue ladder needs k > 0");
  }
  auto point = [&](long double k) {
    const long double s = 1.0L + 1.0L / k;
    const ZetaValue z = zeta(A, T, s, opts.point_tol * k, opts.zeta);
    return ResiduePoint{k, s, z.value / k, z.error / k};
  };
  ResidueCurve c;
  if (opts.parallel && ks.size() > 1) {
    std::vector<std::future<ResiduePoint>> jobs;
    for (long double k : ks) jobs.push_back(std::async(std::launch::async, point, k));
    for (auto& j : jobs) c.points.push_back(j.get());
  } else {
    for (long double k : ks) c.points.push_back(point(k));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Extrapolation

struct Extrapolation {
  long double value = 0;
  long double error = 0;        // propagated + max residual + drop-coarsest shift
  long double propagated = 0;   // sum |w_i| err_i over the intercept weights w
  long double residual = 0;     // max |fit - data|
  long double drop_shift = 0;   // |intercept - intercept without the coarsest point|
  long double weight_sum = 0;   // sum |w_i|, the noise amplification
  bool reliable = true;
  std::string reason;
};

namespace detail {

struct PolyFit {
  std::vector<long double> coef;
  std::vector<long double> weights;  // intercept = sum w_i y_i
};

// Least squares y ~ sum_{j<=order} c_j x^j through normal equations; x is
// rescaled to [0, 1] first, which keeps them well conditioned for small orders.
inline PolyFit poly_fit(const std::vector<long double>& x, const std::vector<long double>& y, int order) {
  const std::size_t n = x.size();
  const auto m = static_cast<std::size_t>(order + 1);
  const long double xs = std::max(1e-300L, *std::max_element(x.begin(), x.end()));
  std::vector<std::vector<long double>> V(n, std::vector<long double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    long double t = 1.0L;
    for (std::size_t j = 0; j < m; ++j, t *= x[i] / xs) V[i][j] = t;
  }
  // G = V^T V, augmented with [V^T y | e_0]
  std::vector<std::vector<long double>> G(m, std::vector<long double>(m + 2, 0.0L));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t i = 0; i < n; ++i) G[a][b] += V[i][a] * V[i][b];
    for (std::size_t i = 0; i < n; ++i) G[a][m] += V[i][a] * y[i];
    G[a][m + 1] = a == 0 ? 1.0L : 0.0L;
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(G[r][c]) > std::abs(G[piv][c])) piv = r;
    std::swap(G[c], G[piv]);
    if (G[c][c] == 0.0L) throw DomainError("singular extrapolation fit");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const long double f = G[r][c] / G[c][c];
      for (std::size_t k = c; k < m + 2; ++k) G[r][k] -= f * G[c][k];
    }
  }
  PolyFit out;
  out.coef.resize(m);
  std::vector<long double> z(m);
  long double scale = 1.0L;
  for (std::size_t j = 0; j < m; ++j, scale *= xs) {
    out.coef[j] = G[j][m] / G[j][j] / scale;
    z[j] = G[j][m + 1] / G[j][j];
  }
  out.weights.assign(n, 0.0L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out.weights[i] += V[i][j] * z[j];
  return out;
}

inline long double poly_eval(const std::vector<long double>& c, long double x) {
  long double v = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

}  // namespace detail

/// Fit value + sum_{i=1}^{order} c_i h^i, h = 1/k, and evaluate at h = 0.
inline Extrapolation richardson_extrapolate(const ResidueCurve& curve, int order = 2, long double fit_tol = 1e-3,
                                            Part part = Part::real) {
  const std::size_t n = curve.points.size();
  if (n < 3) throw DomainError("extrapolation needs at least 3 curve points");
  if (order < 0) throw DomainError("extrapolation order must be nonnegative");
  order = std::min<int>(order, static_cast<int>(n) - 2);  // keep one degree of freedom

  std::vector<long double> h, y, err;
  for (const auto& p : curve.points) {
    h.push_back(1.0L / p.k);
    err.push_back(p.error);
  }
  y = curve.values(part);

  const detail::PolyFit full = detail::poly_fit(h, y, order);
  Extrapolation e;
  e.value = full.coef[0];
  long double yscale = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    e.residual = std::max(e.residual, std::abs(detail::poly_eval(full.coef, h[i]) - y[i]));
    e.propagated += std::abs(full.weights[i]) * err[i];
    e.weight_sum += std::abs(full.weights[i]);
    yscale = std::max(yscale, std::abs(y[i]));
  }
  // drop the coarsest point (largest h = first point)
  const std::vector<long double> h2(h.begin() + 1, h.end()), y2(y.begin() + 1, y.end());
  const int order2 = std::min<int>(order, static_cast<int>(n) - 2);
  const detail::PolyFit fine = detail::poly_fit(h2, y2, std::min(order2, static_cast<int>(h2.size()) - 1));
  e.drop_shift = std::abs(fine.coef[0] - full.coef[0]);

  // rounding-level noise counts as zero
  const long double noise = 64.0L * std::numeric_limits<long double>::epsilon() * std::max(1.0L, yscale) * e.weight_sum;
  if (e.residual <= noise) e.residual = 0.0L;
  if (e.drop_shift <= noise) e.drop_shift = 0.0L;
  e.error = e.propagated + e.residual + e.drop_shift;

  long double max_err = 0.0L;
  for (long double x : err) max_err = std::max(max_err, x);
  const long double allow = fit_tol * std::max(1.0L, std::abs(e.value)) + 3.0L * max_err;
  std::ostringstream why;
  if (e.residual > allow) {
    e.reliable = false;
    why << "residual " << static_cast<double>(e.residual) << " exceeds " << static_cast<double>(allow);
  } else if (e.drop_shift > allow) {
    e.reliable = false;
    why << "intercept moves by " << static_cast<double>(e.drop_shift) << " without the coarsest point";
  } else if (e.weight_sum > 1e3L) {
    e.reliable = false;
    why << "ill-conditioned fit (noise gain " << static_cast<double>(e.weight_sum) << ")";
  }
  e.reason = why.str();
  return e;
}

// ---------------------------------------------------------------------------
// Residue route

struct ResidueResult {
  ResidueCurve curve;
  Extrapolation fit;
  LimitEstimate estimate;
};

inline ResidueResult residue_route(const DiagonalObservable& A, const EigenvalueSequence& T,
                                   const ResidueOptions& opts = {}) {
  ResidueResult r;
  r.curve = residue_curve(A, T, opts);
  r.fit = richardson_extrapolate(r.curve, opts.order, opts.fit_tol, opts.part);
  const long double max_err = r.curve.max_error();
  std::ostringstream m;
  m << "residue k=" << static_cast<double>(r.curve.points.front().k) << ".."
    << static_cast<double>(r.curve.points.back().k);
  // finite rank: every singular-value functional vanishes
  const auto& conv = A.convergent();
  const bool finite_rank =
      T.finite_support() || (conv && conv->limit == Complex(0.0L) && conv->c == 0.0L && std::isfinite(conv->from));
  if (finite_rank) {
    m << " finite rank";
    r.estimate = LimitEstimate::make_converged(0.0L, 0.0L, m.str());
    const auto v = r.curve.values(opts.part);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    r.estimate.sample_min = *mn;
    r.estimate.sample_max = *mx;
  } else if (r.fit.reliable) {
    m << " richardson order " << opts.order;
    r.estimate = LimitEstimate::make_converged(r.fit.value, r.fit.error, m.str());
    const auto v = r.curve.values(opts.part);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    r.estimate.sample_min = *mn;
    r.estimate.sample_max = *mx;
  } else {
    m << " raw tail (extrapolation unreliable: " << r.fit.reason << ")";
    LimitEstimate raw = estimate_from_samples(r.curve.values(opts.part), opts.threshold, opts.tail_fraction, m.str());
    r.estimate = LimitEstimate::make_band(raw.sample_min - max_err, raw.sample_max + max_err, m.str());
    r.estimate.sample_min = raw.sample_min;
    r.estimate.sample_max = raw.sample_max;
  }
  if (A.is_nonneg() && opts.part == Part::real) {
    r.estimate.lo = std::max(r.estimate.lo, 0.0L);
    r.estimate.hi = std::max(r.estimate.hi, 0.0L);
    r.estimate.value = std::max(r.estimate.value, 0.0L);
  }
  return r;
}

inline LimitEstimate dixmier_residue(const DiagonalObservable& A, const EigenvalueSequence& T,
                                     const ResidueOptions& opts = {}) {
  return residue_route(A, T, opts).estimate;
}

// ---------------------------------------------------------------------------
// Log-average route

struct LogAverageOptions {
  std::vector<Index> ladder;  // empty: 2^10, 2^11, ..., 2^24
  long double threshold = 1e-3;
  long double tail_fraction = 0.5;
  std::uint64_t max_window = 1ULL << 24;  // explicit re-sort for non-constant A
};

struct GammaPoint {
  Index N;
  long double gamma;
  long double error;
};

struct LogAverageResult {
  std::vector<GammaPoint> gamma;
  std::vector<long double> rates;
  long double budget = 0;  // max certified error of a rate
  LimitEstimate estimate;
};

/// Ladder N = e^L for L = L0, L0 r, L0 r^2, ... <= L1: sees log-scale
/// oscillations that an ordinary geometric ladder in N never reaches.
inline std::vector<Index> log_geometric_ladder(long double L0, long double L1, long double ratio) {
  if (!(L0 > 0.0L && L1 > L0 && ratio > 1.0L)) throw DomainError("log-geometric ladder needs 0 < L0 < L1, ratio > 1");
  std::vector<Index> out;
  for (long double L = L0; L <= L1 * (1.0L + 1e-15L); L *= ratio) out.push_back(std::floor(std::exp(L)));
  return out;
}

inline std::vector<Index> default_log_ladder() {
  std::vector<Index> out;
  for (int e = 10; e <= 24; ++e) out.push_back(std::ldexp(1.0L, e));
  return out;
}

namespace detail {

// Largest N with sum_{n<=N} mu_n available.
inline Index summable_end(const EigenvalueSequence& T) {
  if (!T.has_tail()) return T.finite_rank() ? kInfiniteIndex : static_cast<Index>(T.prefix_size());
  return std::max(T.exact_end() - 1.0L, static_cast<Index>(T.prefix_size()));
}

inline LogAverageResult rates_from_sums(const std::vector<Index>& N, const std::vector<BoundedSum>& S,
                                        const LogAverageOptions& opts, const std::string& what) {
  if (N.size() < 2) throw RouteUnavailable("log-average route needs at least two ladder points within the data");
  LogAverageResult r;
  for (std::size_t j = 0; j < N.size(); ++j) {
    const long double l = std::log1p(N[j]);
    r.gamma.push_back({N[j], S[j].value / l, S[j].error / l});
  }
  for (std::size_t j = 0; j + 1 < N.size(); ++j) {
    const long double dl = std::log1p(N[j + 1]) - std::log1p(N[j]);
    r.rates.push_back((S[j + 1].value - S[j].value) / dl);
    r.budget = std::max(r.budget, (S[j + 1].error + S[j].error) / dl);
  }
  std::ostringstream m;
  m << "log-average rate " << what << " N=" << static_cast<double>(N.front()) << ".." << static_cast<double>(N.back());
  r.estimate = estimate_from_samples(r.rates, opts.threshold, opts.tail_fraction, m.str());
  if (r.budget > 0.0L) {
    r.estimate.lo -= r.budget;
    r.estimate.hi += r.budget;
    r.estimate.error += r.budget;
  }
  return r;
}

}  // namespace detail

inline LogAverageResult log_average_route(const DiagonalObservable& A, const EigenvalueSequence& T,
                                          const LogAverageOptions& opts = {}) {
  if (!A.is_real() || !A.is_nonneg()) {
    throw RouteUnavailable("log-average route unavailable for a signed or complex diagonal; use dixmier_residue");
  }
  std::vector<Index> ladder = opts.ladder.empty() ? default_log_ladder() : opts.ladder;
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

  if (const auto c = A.constant_value()) {
    // gamma(cT) = c gamma(T)
    const long double cr = c->real();
    const Index end = detail::summable_end(T);
    std::vector<Index> N;
    std::vector<BoundedSum> S;
    for (Index n : ladder) {
      if (n < 1.0L || n > end) continue;
      BoundedSum s = T.partial_sum(n);
      N.push_back(n);
      S.push_back({cr * s.value, cr * s.error});
    }
    LogAverageResult r = detail::rates_from_sums(N, S, opts, "constant diagonal");
    if (A.is_nonneg()) r.estimate.lo = std::max(r.estimate.lo, 0.0L);
    return r;
  }

  // General nonnegative diagonal: AT has eigenvalues diag(m) mu_m; re-sort an
  // explicit window.  Everything outside [1, M] is <= bound * mu_{M+1}, so the
  // sorted window is exact for every entry strictly above that level.
  const Index cap = std::min<Index>(detail::summable_end(T), T.exact_end() - 1.0L);
  Index M = std::min<Index>(static_cast<Index>(opts.max_window), std::min(cap, ladder.back()));
  // a diagonal that vanishes past some index makes AT finite rank
  const auto& conv = A.convergent();
  const bool vanishes = conv && conv->limit == Complex(0.0L) && conv->c == 0.0L && conv->from - 1.0L <= M;
  if (vanishes) M = std::max(conv->from - 1.0L, 2.0L);
  if (!(M >= 2.0L)) throw RouteUnavailable("log-average route: no explicit eigenvalues to re-sort");
  const auto Mi = static_cast<std::uint64_t>(M);
  std::vector<long double> prod(Mi);
  for (std::uint64_t m = 1; m <= Mi; ++m) {
    prod[m - 1] = A(static_cast<Index>(m)).real() * T.mu(static_cast<Index>(m));
  }
  std::sort(prod.begin(), prod.end(), std::greater<>());
  long double outside;
  if (vanishes) {
    outside = 0.0L;
  } else if (M + 1.0L < T.exact_end()) {
    outside = A.bound() * T.mu(M + 1.0L);
  } else if (T.finite_support() && M >= static_cast<Index>(T.prefix_size())) {
    outside = 0.0L;
  } else {
    const PowerEnvelope env = T.envelope_from(M + 1.0L);
    outside = A.bound() * env.c * std::pow(M + 1.0L, -env.p);
  }
  std::uint64_t valid = 0;
  while (valid < Mi && prod[valid] > outside) ++valid;
  if (outside == 0.0L) valid = Mi;
  std::vector<Index> N;
  std::vector<BoundedSum> S;
  CompensatedSum<long double> acc;
  std::uint64_t pos = 0;
  for (Index n : ladder) {
    if (n < 1.0L || (!vanishes && n > static_cast<Index>(valid))) continue;
    const auto ni = static_cast<std::uint64_t>(std::min<Index>(n, M));
    while (pos < ni) acc.add(prod[pos++]);
    N.push_back(n);
    S.push_back({acc.value(), 0.0L});
  }
  return detail::rates_from_sums(N, S, opts, "re-sorted window");
}

inline LimitEstimate dixmier_log_average(const DiagonalObservable& A, const EigenvalueSequence& T,
                                         const LogAverageOptions& opts = {}) {
  return log_average_route(A, T, opts).estimate;
}

// ---------------------------------------------------------------------------
// Measurability

enum class Verdict { measurable, non_measurable, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::measurable: return "measurable";
    case Verdict::non_measurable: return "non-measurable";
    default: return "inconclusive";
  }
}

struct MeasurabilityOptions {
  ResidueOptions residue;
  LogAverageOptions log;
  long double budget_factor = 3;  // band must exceed this many error budgets
};

struct MeasurabilityReport {
  Verdict verdict = Verdict::inconclusive;
  long double value = 0;  // measurable
  long double lo = 0;     // measurable: value -/+ error; otherwise the band hull
  long double hi = 0;
  ResidueResult residue;
  std::optional<LogAverageResult> log;
  std::optional<long double> agreement;  // |residue - log| when both converge
  long double agreement_tol = 0;
  long double residue_budget = 0;
  long double log_budget = 0;
  std::string note;
};

inline MeasurabilityReport measurability_diagnostic(const DiagonalObservable& A, const EigenvalueSequence& T,
                                                    const MeasurabilityOptions& opts = {}) {
  MeasurabilityReport rep;
  rep.residue = residue_route(A, T, opts.residue);
  const LimitEstimate& r = rep.residue.estimate;
  rep.residue_budget = rep.residue.curve.max_error() + opts.residue.threshold * std::max(1.0L, std::abs(r.value));
  if (A.is_real() && A.is_nonneg()) {
    try {
      rep.log = log_average_route(A, T, opts.log);
    } catch (const RouteUnavailable& e) {
      rep.note = e.what();
    }
  } else {
    rep.note = "log-average route unavailable for this diagonal; residue only";
  }

  if (!rep.log) {
    if (r.converged()) {
      rep.verdict = Verdict::measurable;
      rep.value = r.value;
    } else {
      rep.verdict = Verdict::inconclusive;
      rep.value = r.value;
    }
    rep.lo = r.lo;
    rep.hi = r.hi;
    return rep;
  }

  const LimitEstimate& l = rep.log->estimate;
  rep.log_budget = rep.log->budget + opts.log.threshold * std::max(1.0L, std::abs(l.value));
  rep.agreement_tol = r.error + l.error;
  if (r.converged() && l.converged()) {
    rep.agreement = std::abs(r.value - l.value);
    if (*rep.agreement <= rep.agreement_tol) {
      rep.verdict = Verdict::measurable;
      rep.value = r.value;
      rep.lo = r.lo;
      rep.hi = r.hi;
    } else {
      rep.verdict = Verdict::inconclusive;
      rep.note = "both routes converge but disagree";
      rep.lo = std::min(r.lo, l.lo);
      rep.hi = std::max(r.hi, l.hi);
    }
    return rep;
  }
  rep.lo = std::min(r.lo, l.lo);
  rep.hi = std::max(r.hi, l.hi);
  rep.value = 0.5L * (rep.lo + rep.hi);
  const bool wide = !r.converged() && !l.converged() && r.width() > opts.budget_factor * rep.residue_budget &&
                    l.width() > opts.budget_factor * rep.log_budget;
  if (wide && r.overlaps(l)) {
    rep.verdict = Verdict::non_measurable;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.note = r.converged() != l.converged() ? "only one route converges" : "bands too narrow or disjoint";
  }
  return rep;
}

/// Measurability of AT for A = identity and each supplied diagonal
/// projection.  Only the supplied family is tested.
struct SpectralMeasurability {
  std::vector<MeasurabilityReport> reports;  // identity first
  bool measurable_on_family = false;
};

inline SpectralMeasurability spectral_measurability(const EigenvalueSequence& T,
                                                    const std::vector<DiagonalObservable>& projections,
                                                    const MeasurabilityOptions& opts = {}) {
  SpectralMeasurability out;
  out.reports.push_back(measurability_diagnostic(DiagonalObservable::constant(1.0L), T, opts));
  for (const auto& P : projections) out.reports.push_back(measurability_diagnostic(P, T, opts));
  out.measurable_on_family = std::all_of(out.reports.begin(), out.reports.end(),
                                         [](const auto& r) { return r.verdict == Verdict::measurable; });
  return out;
}

}  // namespace dixmier
