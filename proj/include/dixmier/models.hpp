#pragma once

// Worked model operators: power laws, the flat 1-torus, the noncommutative
// torus (rotation algebra) and a block-oscillating non-measurable law.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dixmier/eigenvalue_sequence.hpp"
#include "dixmier/errors.hpp"
#include "dixmier/laws.hpp"
#include "dixmier/observable.hpp"

namespace dixmier {

// ---------------------------------------------------------------------------
// Enumeration of Z^2

using LatticePoint = std::pair<std::int64_t, std::int64_t>;

/// k = 1, 2, ... -> Z^2 by square shells max(|m|,|n|) = r; shell r >= 1 starts
/// at (r, 0) and runs counterclockwise: up the right edge, left along the
/// top, down the left edge, right along the bottom, up to (r, -1).
inline LatticePoint cantor_enum(std::uint64_t k) {
  if (k == 0) throw DomainError("cantor_enum needs k >= 1");
  if (k == 1) return {0, 0};
  auto r = static_cast<std::int64_t>(std::ceil((std::sqrt(static_cast<long double>(k)) - 1.0L) / 2.0L));
  // fix rounding: smallest r with (2r+1)^2 >= k
  while ((2 * r + 1) * (2 * r + 1) < static_cast<std::int64_t>(k)) ++r;
  while (r > 0 && (2 * r - 1) * (2 * r - 1) >= static_cast<std::int64_t>(k)) --r;
  const std::int64_t o = static_cast<std::int64_t>(k) - (2 * r - 1) * (2 * r - 1) - 1;  // 0 .. 8r-1
  if (o <= r) return {r, o};
  if (o <= 3 * r) return {r - (o - r), r};
  if (o <= 5 * r) return {-r, r - (o - 3 * r)};
  if (o <= 7 * r) return {-r + (o - 5 * r), -r};
  return {r, -r + (o - 7 * r)};
}

/// Inverse of cantor_enum.
inline std::uint64_t cantor_index(std::int64_t m, std::int64_t n) {
  const std::int64_t r = std::max(std::llabs(m), std::llabs(n));
  if (r == 0) return 1;
  const std::int64_t base = (2 * r - 1) * (2 * r - 1) + 1;
  std::int64_t o;
  if (m == r && n >= 0) {
    o = n;
  } else if (n == r) {
    o = r + (r - m);
  } else if (m == -r) {
    o = 3 * r + (r - n);
  } else if (n == -r) {
    o = 5 * r + (m + r);
  } else {
    o = 7 * r + (n + r);
  }
  return static_cast<std::uint64_t>(base + o);
}

// ---------------------------------------------------------------------------
// Power laws

inline EigenvalueSequence harmonic_model(long double c = 1.0L) {
  return EigenvalueSequence::from_law(power_law(c, 1.0L));
}

inline EigenvalueSequence trace_class_model(long double p = 2.0L) {
  if (!(p > 1.0L)) throw DomainError("trace-class law needs p > 1");
  return EigenvalueSequence::from_law(power_law(1.0L, p));
}

// ---------------------------------------------------------------------------
// Block-oscillating law
//
// In L = log n the density n*mu_n alternates 1.5, 0.5, 1.5, ... on the
// L-blocks [0,8), [8,64), [64,512), [512,4096), [4096, 11000).  Within a block
// mu_n = c/n.  Where the density rises at B = ceil(e^L) the law holds the
// previous value 0.5/(B-1) on [B, 3(B-1)) so mu stays nonincreasing.  Past
// e^11000 only the bound 1.5/n is used.  gamma_N and (1/k) zeta(1+1/k)
// oscillate indefinitely, so the operator is not measurable.

struct BlockLawParams {
  long double ratio = 8.0L;     // L-block boundaries at ratio^j
  long double high = 1.5L;
  long double low = 0.5L;
  long double horizon = 11000.0L;  // in L = log n
};

inline PiecewiseLaw block_oscillating_law(const BlockLawParams& p = {}) {
  std::vector<long double> breaks{0.0L};
  for (long double L = p.ratio; L < p.horizon; L *= p.ratio) breaks.push_back(L);
  breaks.push_back(p.horizon);
  std::vector<LawPiece> pieces;
  Index start = 1.0L;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const long double c = (i % 2 == 0) ? p.high : p.low;
    const Index end = std::ceil(std::exp(breaks[i + 1]));
    if (i > 0 && c > ((i - 1) % 2 == 0 ? p.high : p.low)) {
      const long double prev = p.low / (start - 1.0L);
      const Index knee = std::ceil(p.high / prev);  // first n with high/n <= prev
      pieces.push_back({start, knee, ConstantPiece{prev}});
      start = knee;
    }
    pieces.push_back({start, end, PowerPiece{c, 1.0L}});
    start = end;
  }
  return PiecewiseLaw(std::move(pieces), PowerEnvelope{std::max(p.high, p.low), 1.0L});
}

inline EigenvalueSequence block_oscillating_model(const BlockLawParams& p = {}) {
  return EigenvalueSequence::from_law(block_oscillating_law(p));
}

// ---------------------------------------------------------------------------
// Flat 1-torus: Delta^{-1/2} has eigenvalues 1/|m|, m != 0

/// Modes 1 <= |m| <= N explicitly, enumerated 1, -1, 2, -2, ...; the exact law
/// mu_n = 1/ceil(n/2) continues past them.
inline EigenvalueSequence torus_invsqrt_laplacian(std::uint64_t N) {
  if (N == 0) throw DomainError("torus model needs N >= 1");
  std::vector<Run> runs;
  runs.reserve(N);
  for (std::uint64_t k = 1; k <= N; ++k) runs.push_back({1.0L / static_cast<long double>(k), 2});
  auto tail = std::make_shared<LawTail>(
      PiecewiseLaw({LawPiece{2.0L * N + 1.0L, kInfiniteIndex, SteppedPiece{1.0L, 1.0L, 2.0L}}}));
  // the enumeration is already sorted: label = position
  return EigenvalueSequence::from_runs(std::move(runs), std::move(tail),
                                       [](std::uint64_t n) { return static_cast<std::int64_t>(n); });
}

/// Mode m of the n-th torus eigenvector.
inline std::int64_t torus_mode(std::uint64_t n) {
  const auto k = static_cast<std::int64_t>((n + 1) / 2);
  return (n % 2 == 1) ? k : -k;
}

/// Finite Fourier series f(x) = sum_k fhat(k) e^{ikx}.
struct TorusFunction {
  std::map<std::int64_t, Complex> coeffs;

  [[nodiscard]] Complex operator()(long double x) const {
    Complex s = 0.0L;
    for (const auto& [k, c] : coeffs) s += c * std::polar(1.0L, static_cast<long double>(k) * x);
    return s;
  }
  [[nodiscard]] Complex fhat(std::int64_t k) const {
    const auto it = coeffs.find(k);
    return it == coeffs.end() ? Complex(0.0L) : it->second;
  }
  [[nodiscard]] long double sup_bound() const {
    long double b = 0.0L;
    for (const auto& [k, c] : coeffs) b += std::abs(c);
    return b;
  }
};

/// <f_m, M_f f_m> with f_m = e^{imx}/sqrt(2 pi): the constant fhat(0).
inline DiagonalObservable torus_multiplier_diag(const TorusFunction& f) {
  return DiagonalObservable::constant(f.fhat(0)).named("torus-multiplier");
}

// ---------------------------------------------------------------------------
// Noncommutative torus

inline constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;

/// lambda^k with lambda = e^{2 pi i theta}, reduced mod 1 before exponentiating.
inline Complex lambda_pow(long double theta, std::int64_t k) {
  long double ph = theta * static_cast<long double>(k);
  ph -= std::round(ph);
  return std::polar(1.0L, kTwoPi * ph);
}

/// Finitely supported a = sum a_{m,n} u^m v^n.
class FourierElement {
 public:
  using Map = std::map<LatticePoint, Complex>;

  explicit FourierElement(long double theta = 0.0L, Map coeffs = {}) : theta_(theta), c_(std::move(coeffs)) {
    if (!(theta >= 0.0L && theta < 1.0L)) throw DomainError("theta must lie in [0, 1)");
    prune();
  }

  static FourierElement unit(long double theta) { return monomial(theta, 0, 0); }
  static FourierElement monomial(long double theta, std::int64_t m, std::int64_t n, Complex c = 1.0L) {
    return FourierElement(theta, {{{m, n}, c}});
  }
  static FourierElement u(long double theta) { return monomial(theta, 1, 0); }
  static FourierElement v(long double theta) { return monomial(theta, 0, 1); }

  [[nodiscard]] long double theta() const { return theta_; }
  [[nodiscard]] Complex lambda() const { return lambda_pow(theta_, 1); }
  [[nodiscard]] const Map& coeffs() const { return c_; }
  [[nodiscard]] Complex coeff(std::int64_t m, std::int64_t n) const {
    const auto it = c_.find({m, n});
    return it == c_.end() ? Complex(0.0L) : it->second;
  }
  [[nodiscard]] bool is_zero() const { return c_.empty(); }
  /// sum |a_{m,n}|, an upper bound for the operator norm.
  [[nodiscard]] long double l1_norm() const {
    long double s = 0.0L;
    for (const auto& [k, c] : c_) s += std::abs(c);
    return s;
  }
  /// tau0(a* a)^{1/2} = (sum |a_{m,n}|^2)^{1/2}.
  [[nodiscard]] long double l2_norm() const {
    long double s = 0.0L;
    for (const auto& [k, c] : c_) s += std::norm(c);
    return std::sqrt(s);
  }

  FourierElement& operator+=(const FourierElement& o) {
    check_theta(o);
    for (const auto& [k, c] : o.c_) c_[k] += c;
    prune();
    return *this;
  }
  friend FourierElement operator+(FourierElement a, const FourierElement& b) { return a += b; }
  friend FourierElement operator-(FourierElement a, const FourierElement& b) {
    a.check_theta(b);
    for (const auto& [k, c] : b.c_) a.c_[k] -= c;
    a.prune();
    return a;
  }
  friend FourierElement operator*(Complex z, FourierElement a) {
    for (auto& [k, c] : a.c_) c *= z;
    a.prune();
    return a;
  }

  void check_theta(const FourierElement& o) const {
    if (o.theta_ != theta_) throw ThetaMismatch("elements have different deformation parameters");
  }

 private:
  void prune() {
    for (auto it = c_.begin(); it != c_.end();) {
      it = (it->second == Complex(0.0L)) ? c_.erase(it) : std::next(it);
    }
  }

  long double theta_;
  Map c_;
};

/// (ab)_{r,s} = sum_{m,n} a_{r-m,n} lambda^{mn} b_{m,s-n}.  On monomials this
/// is u^p v^q * u^m v^t = lambda^{m q} u^{p+m} v^{q+t}, hence v u = lambda u v.
inline FourierElement nct_product(const FourierElement& a, const FourierElement& b) {
  a.check_theta(b);
  FourierElement::Map out;
  for (const auto& [ka, ca] : a.coeffs()) {
    for (const auto& [kb, cb] : b.coeffs()) {
      const std::int64_t r = ka.first + kb.first;
      const std::int64_t s = ka.second + kb.second;
      out[{r, s}] += ca * lambda_pow(a.theta(), kb.first * ka.second) * cb;
    }
  }
  return FourierElement(a.theta(), std::move(out));
}

inline FourierElement operator*(const FourierElement& a, const FourierElement& b) { return nct_product(a, b); }

/// a* = sum_{r,s} lambda^{rs} conj(a_{-r,-s}) u^r v^s.
inline FourierElement nct_involution(const FourierElement& a) {
  FourierElement::Map out;
  for (const auto& [k, c] : a.coeffs()) {
    const std::int64_t r = -k.first, s = -k.second;
    out[{r, s}] = lambda_pow(a.theta(), r * s) * std::conj(c);
  }
  return FourierElement(a.theta(), std::move(out));
}

inline Complex nct_tau0(const FourierElement& a) { return a.coeff(0, 0); }

/// <h_{k,l}, pi(a) h_{m,n}> in the GNS space of tau0, where pi is left
/// multiplication and h_{m,n} = u^m v^n.
inline Complex nct_matrix_element(const FourierElement& a, std::int64_t k, std::int64_t l, std::int64_t m,
                                  std::int64_t n) {
  return a.coeff(k - m, l - n) * lambda_pow(a.theta(), m * (l - n));
}

/// |pi(a) h_{m,n}|^2 computed from the product a * u^m v^n.
inline long double nct_vector_norm2(const FourierElement& a, std::int64_t m, std::int64_t n) {
  const FourierElement x = nct_product(a, FourierElement::monomial(a.theta(), m, n));
  const long double l = x.l2_norm();
  return l * l;
}

/// Delta_theta^{-1}: eigenvalues 1/(m^2+n^2) on Z^2 \ {0}.  The explicit part
/// is the complete closed disk m^2+n^2 <= S^2 (sorted by value, ties by
/// enumeration index); the certified lattice tail covers the rest.
inline EigenvalueSequence nct_inv_laplacian(std::int64_t S) {
  if (S < 1) throw DomainError("NC torus model needs at least one shell");
  const std::int64_t X = S * S;
  std::vector<std::uint32_t> r2(static_cast<std::size_t>(X) + 1, 0);
  std::uint64_t with_origin = 0;
  for (std::int64_t m = -S; m <= S; ++m) {
    const auto w = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<long double>(X - m * m))));
    for (std::int64_t n = -w; n <= w; ++n) {
      ++r2[static_cast<std::size_t>(m * m + n * n)];
      ++with_origin;
    }
  }
  std::vector<Run> runs;
  std::vector<std::int64_t> run_r2;
  for (std::int64_t t = 1; t <= X; ++t) {
    if (r2[static_cast<std::size_t>(t)] == 0) continue;
    runs.push_back({1.0L / static_cast<long double>(t), r2[static_cast<std::size_t>(t)]});
    run_r2.push_back(t);
  }
  const std::uint64_t explicit_count = with_origin - 1;
  auto tail = std::make_shared<LatticeDiskTail>(static_cast<Index>(explicit_count + 1), static_cast<long double>(X),
                                                static_cast<long double>(with_origin));
  // label: Cantor index of the eigenvector at a sorted position
  std::vector<std::uint64_t> run_end;
  std::uint64_t acc = 0;
  for (const auto& r : runs) run_end.push_back(acc += r.count);
  auto labels = [run_end = std::move(run_end), run_r2 = std::move(run_r2)](std::uint64_t pos) -> std::int64_t {
    if (pos == 0 || pos > run_end.back()) return -1;
    const auto i = static_cast<std::size_t>(std::lower_bound(run_end.begin(), run_end.end(), pos) - run_end.begin());
    const std::int64_t t = run_r2[i];
    std::vector<std::uint64_t> idx;
    const auto R = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<long double>(t))));
    for (std::int64_t m = -R; m <= R; ++m) {
      const std::int64_t rest = t - m * m;
      const auto n = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<long double>(rest))));
      if (n * n != rest) continue;
      idx.push_back(cantor_index(m, n));
      if (n != 0) idx.push_back(cantor_index(m, -n));
    }
    std::sort(idx.begin(), idx.end());
    const std::uint64_t before = i == 0 ? 0 : run_end[i - 1];
    return static_cast<std::int64_t>(idx[pos - before - 1]);
  };
  return EigenvalueSequence::from_runs(std::move(runs), std::move(tail), std::move(labels));
}

/// <h_{m,n}, pi(a) h_{m,n}> = a_{0,0} on every eigenvector.
inline DiagonalObservable nct_diag(const FourierElement& a) {
  return DiagonalObservable::constant(nct_tau0(a)).named("nc-torus-element");
}

// ---------------------------------------------------------------------------
// Random elements and approximate projections

inline FourierElement random_element(std::mt19937_64& rng, long double theta, int terms = 6, int radius = 3) {
  std::uniform_int_distribution<int> idx(-radius, radius);
  std::normal_distribution<double> g(0.0, 1.0);
  FourierElement::Map c;
  for (int i = 0; i < terms; ++i) c[{idx(rng), idx(rng)}] += Complex(g(rng), g(rng));
  return FourierElement(theta, std::move(c));
}

/// Fejer-smoothed spectral projection of the unitary w = u^p v^q onto the arc
/// of angles [a, b]: P = sum_{|k|<=K} (1 - |k|/(K+1)) chi_hat(k) w^k.
/// Self-adjoint; idempotent up to an L^2 defect that shrinks with K.
inline FourierElement approximate_projection(long double theta, std::int64_t p, std::int64_t q, long double a,
                                             long double b, int K) {
  const FourierElement w = FourierElement::monomial(theta, p, q);
  const FourierElement w_inv = nct_involution(w);
  FourierElement out(theta);
  FourierElement wk = FourierElement::unit(theta);
  FourierElement wmk = FourierElement::unit(theta);
  for (int k = 0; k <= K; ++k) {
    const long double fejer = 1.0L - static_cast<long double>(k) / (K + 1);
    Complex chi;
    if (k == 0) {
      chi = (b - a) / kTwoPi;
    } else {
      // (1/2pi) int_a^b e^{-ik x} dx
      chi = (std::polar(1.0L, -k * a) - std::polar(1.0L, -k * b)) / (Complex(0.0L, kTwoPi * k));
    }
    out += (fejer * chi) * wk;
    if (k > 0) out += (fejer * std::conj(chi)) * wmk;
    wk = nct_product(wk, w);
    wmk = nct_product(wmk, w_inv);
  }
  return out;
}

/// tau0-2-norm of P^2 - P.
inline long double idempotency_defect(const FourierElement& P) { return (nct_product(P, P) - P).l2_norm(); }

}  // namespace dixmier
