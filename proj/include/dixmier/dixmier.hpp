#pragma once

#include "dixmier/config.hpp"
#include "dixmier/eigenvalue_sequence.hpp"
#include "dixmier/errors.hpp"
#include "dixmier/genlimits.hpp"
#include "dixmier/io.hpp"
#include "dixmier/laws.hpp"
#include "dixmier/models.hpp"
#include "dixmier/normality.hpp"
#include "dixmier/observable.hpp"
#include "dixmier/proptest.hpp"
#include "dixmier/quantum_limit.hpp"
#include "dixmier/residue.hpp"
#include "dixmier/summation.hpp"
#include "dixmier/zeta.hpp"
