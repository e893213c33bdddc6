#pragma once

// Step doubling: the N = 2^j fixed-step result reached in j squaring-style
// iterations of the power and geometric-sum recurrences.

#include "lqdisc/fixedstep.hpp"

namespace lqdisc {

/// Power-n accumulators of the fixed-step recurrence.
///
///   At = Lbar^n,  Bo_sum = sum_{i<n} Lbar^i,  Hm = Om^n,  Hq = Oq^n,
///   Msum = sum_{i<n} (Om^i)',  Qsum = sum_{i<n} (Oq^i)' Qc~ Oq^i,
///   Rsum = sum_{i<n} L^i Rc~ (L^i)'
/// with Lbar = diag(Lambda, Lambda_v).
struct DoublingState {
  long long n = 1;
  Mat At, Bo_sum, Hm, Hq, Msum, Qsum;
  std::optional<Mat> Rsum;
};

/// State at n = 1.
DoublingState initial_doubling_state(const CoefficientSet& cs, const DeqSystem& sys);

/// State at 2n from the state at n. The sums Msum, Qsum (and Rsum) use the
/// power-n matrices, so they are updated before the powers are squared.
DoublingState double_state(const DoublingState& half);

/// Extracts (A, B_o, Q, M, R_ww) from a doubling state.
DiscreteCore extract(const DoublingState& st, const CoefficientSet& cs, const DeqSystem& sys);

struct DoublingResult {
  DiscreteCore core;
  int iterations = 0;
};

/// Discretization with N = 2^j steps. Throws ParameterError unless 0 <= j <= 30.
DoublingResult discretize_step_doubling(const DeqSystem& sys, const ButcherTableau& tableau,
                                        int j);

/// Same, reusing coefficients already built for N = 2^j.
DoublingResult discretize_step_doubling(const CoefficientSet& cs, const DeqSystem& sys);

}  // namespace lqdisc
