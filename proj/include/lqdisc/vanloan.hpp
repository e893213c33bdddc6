#pragma once

// Single-shot discretization from block-triangular matrix exponentials.

#include "lqdisc/exactdefs.hpp"
#include "lqdisc/fixedstep.hpp"

namespace lqdisc {

struct VanLoanBlocks {
  Mat phi1_11, phi1_12, phi1_22;  ///< exp([[-Hcq', E1' Qbar E1], [0, Hcq]] t)
  Mat phi2_12, phi2_22;           ///< exp([[0, I], [0, Hcm']] t)
  Mat phi3;                       ///< exp(Hc t)
};

VanLoanBlocks vanloan_blocks(const DeqSystem& sys, double t);

/// A, B_o from Gamma = E1 Phi3 E2; M = E2' Phi2_12 E1' Mbar;
/// Q = E2' Phi1_22' Phi1_12 E2 (symmetrized); R_ww from rww_expm when G is set.
DiscreteCore discretize_expm(const DeqSystem& sys, double t);
DiscreteCore discretize_expm(const DeqSystem& sys);

/// int_0^t e^{Ac s} G G' e^{Ac' s} ds from exp([[-Ac, G G'], [0, Ac']] t):
/// with blocks phi12, phi22 the integral is phi22' * phi12.
Mat rww_expm(const Mat& Ac, const Mat& G, double t);

}  // namespace lqdisc
