#pragma once

// Discrete-time LQ problem over the horizon: augmented delay system,
// discounted per-stage costs, and expectations under Gaussian state
// uncertainty.

#include <vector>

#include "lqdisc/fixedstep.hpp"
#include "lqdisc/model.hpp"

namespace lqdisc {

/// x~_{k+1} = At x~_k + Bt u_k,  z_k = Ct x~_k + Dt u_k.
struct AugmentedSystem {
  Mat A, B, C, D;
};

/// Splits B_o and D_o into history / current-input columns and stacks the
/// input shift register. Throws AssemblyError on column-count mismatch.
AugmentedSystem assemble_augmented(const DiscreteCore& core, const DelayRealization& r);

/// Delay-free plant: (A, B_o, C, D) unchanged.
AugmentedSystem assemble_augmented(const DiscreteCore& core, const StateSpace& plant);

struct StageCost {
  int k = 0;
  double t = 0.0;
  double discount = 1.0;  ///< e^{-mu t_k}
  Mat Q;                  ///< discount * Q
  Mat M;                  ///< discount * M
  Vec q;                  ///< M_k zbar_k
  double rho = 0.0;
};

/// Below this value of mu*Ts the constant term uses a series in mu*Ts.
inline constexpr double kRhoSeriesThreshold = 1e-8;

/// (1 - e^{-mu Ts}) / mu, with the mu -> 0 limit Ts handled by series.
double discount_integral(double mu, double Ts);

std::vector<StageCost> stage_costs(const Mat& Q, const Mat& M, const CostSpec& cost);

struct ExpectedCost {
  double deterministic = 0.0;  ///< 1/2 m'Q_k m + q_k'm + rho_k at m = [xhat; u]
  double state_trace = 0.0;    ///< Tr(Q_k P~), P~ = diag(P, 0)
  double noise_trace = 0.0;    ///< Tr(C R_ww C')
  /// Sum of the three parts. The traces do not depend on (x, u).
  double total() const { return deterministic + state_trace + noise_trace; }
};

/// Throws DomainError if P is not symmetric PSD; R_ww may be empty (0x0).
ExpectedCost expected_stage_cost(const StageCost& stage, const Vec& xhat, const Vec& u,
                                 const Mat& P, const Mat& Rww, const Mat& C);

/// E[x'Sx] = m'Sm + Tr(S R) for x ~ N(m, R).
double expected_quadratic(const Mat& S, const Vec& m, const Mat& R);

}  // namespace lqdisc
