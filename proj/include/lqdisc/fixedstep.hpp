#pragma once

// Fixed-time-step Runge-Kutta discretization. Because every ODE in the system
// is linear with a constant generator, each stage value is a constant matrix
// times the step's initial value; those constants are computed once and the
// integration loop is pure matrix products.

#include <optional>
#include <string>
#include <vector>

#include "lqdisc/exactdefs.hpp"
#include "lqdisc/matcore.hpp"

namespace lqdisc {

enum class TableauKind { explicit_rk, diagonally_implicit, implicit };

struct ButcherTableau {
  std::string name;
  Mat a;  ///< s x s
  Vec b;
  Vec c;
  TableauKind kind = TableauKind::explicit_rk;

  int stages() const { return static_cast<int>(b.size()); }

  /// Throws ParameterError unless sum(b) = 1, row sums of a equal c, and the
  /// sparsity of a matches kind (all within 1e-12).
  void validate() const;
};

/// Smallest structural kind that fits the coefficient pattern of a.
TableauKind classify(const Mat& a);

/// Named schemes: explicit-euler, implicit-euler, explicit-trapezoidal,
/// implicit-trapezoidal, rk4, esdirk4. Throws ParameterError for other names.
ButcherTableau tableau_by_name(const std::string& name);

std::vector<std::string> tableau_names();

/// Theoretical order of a named scheme on linear constant-coefficient
/// problems (0 for user tableaus).
int nominal_order(const std::string& name);

/// Diagonal of the 4-stage stiffly accurate ESDIRK (root of
/// g^3 - 3g^2 + 3/2 g - 1/6 = 0).
inline constexpr double kEsdirkGamma = 0.43586652150845899941601945;

/// Stage matrices S_i with S_i = I + dt * sum_j a_ij * generator * S_j.
///
/// Explicit tableaus use forward recursion, diagonally implicit ones one solve
/// per stage, fully implicit ones a single coupled block solve. A singular
/// stage matrix raises SingularityError naming the scheme and dt.
std::vector<Mat> stage_coefficients(const ButcherTableau& tableau, const Mat& generator,
                                    double dt);

/// I + dt * sum_i b_i * generator * S_i
Mat propagation(const ButcherTableau& tableau, const Mat& generator,
                const std::vector<Mat>& stages, double dt);

/// sum_i b_i * S_i
Mat weighted_stage_sum(const ButcherTableau& tableau, const std::vector<Mat>& stages);

struct CoefficientSet {
  std::string scheme;
  double dt = 0.0;
  int N = 0;

  Mat Lambda, LambdaV, Theta1, Theta2, OmegaM, OmegaQ;
  std::vector<Mat> Lambda_i, LambdaV_i, OmegaM_i, OmegaQ_i;

  Mat B1c_tilde;  ///< dt * B_1c
  Mat B2c_tilde;  ///< dt * V (B_2c - B_1c)
  Mat Mc_tilde;   ///< dt * sum b_i Omega_m,i' E1' Mbar
  Mat Qc_tilde;   ///< dt * sum b_i Omega_q,i' E1' Qbar E1 Omega_q,i
  std::optional<Mat> Rc_tilde;  ///< dt * sum b_i Lambda_i G G' Lambda_i'
};

/// Builds all constant coefficients for N steps of size Ts / N.
CoefficientSet build_coefficients(const DeqSystem& sys, const ButcherTableau& tableau, int N);

/// Core discrete matrices produced by any of the three methods.
struct DiscreteCore {
  Mat A;
  Mat Bo;
  Mat Q;
  Mat M;
  std::optional<Mat> Rww;
};

/// Runs the N-step recurrence with precomputed coefficients.
DiscreteCore integrate(const CoefficientSet& coeffs, const DeqSystem& sys);

/// build_coefficients + integrate.
DiscreteCore discretize_fixed_step(const DeqSystem& sys, const ButcherTableau& tableau, int N);

}  // namespace lqdisc
