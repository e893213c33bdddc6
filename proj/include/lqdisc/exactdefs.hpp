#pragma once

// The differential-equation system whose solution at t = Ts is the discrete
// LQ problem, plus a slow quadrature oracle that evaluates the defining
// integrals directly.

#include <optional>

#include "lqdisc/matcore.hpp"
#include "lqdisc/model.hpp"

namespace lqdisc {

/// Generators and constant weights of the matrix ODE system.
///
/// Without delays there is one generator block of size nxu = nx + nu and
/// E1 = E2 = I. With delays the generator is diag(H1c, H2c, H3c) over
/// nxu = nx + (mbar+1) nu and Gamma(t) = E1 e^{Hc t} E2 with
/// E1 = [I, I, -I], E2 = [I; I; I].
struct DeqSystem {
  bool delayed = false;
  Eigen::Index nx = 0;
  Eigen::Index nu = 0;  ///< input columns of B_o (augmented when delayed)
  Eigen::Index nz = 0;
  double mu = 0.0;
  double Ts = 1.0;

  Mat Ac;
  Mat VAc;    ///< V A_c, zero without delays
  Mat B1c;
  Mat B2bar;  ///< V (B_2c - B_1c), zero without delays
  Mat Cz;     ///< [C_c D]
  Mat Qc;
  std::optional<Mat> G;

  Mat H1c, H2c, H3c;
  Mat Hc, Hcq, Hcm;
  Mat E1, E2;
  Mat Qbar;  ///< [C D]' Q_c [C D]
  Mat Mbar;  ///< -[C D]' Q_c

  Eigen::Index nxu() const { return nx + nu; }
  Eigen::Index nh() const { return Hc.rows(); }
};

/// Delay-free structure on a plain state-space plant.
DeqSystem build_deq(const StateSpace& plant, const CostSpec& cost);

/// Delayed structure on a realized delay system (also used with all delays zero).
DeqSystem build_deq(const DelayRealization& realization, const CostSpec& cost);

/// Discretization targets evaluated at one time.
struct TargetSet {
  Mat A, Av, B1, B2, Bo, Q, M;
  std::optional<Mat> Rww;
};

/// Gamma(t) = E1 e^{Hc t} E2.
Mat gamma_decomposed(const DeqSystem& sys, double t);

/// Composite Simpson evaluation of every target at time t.
///
/// A and A_v come from expm directly; B_1, B_2, Q, M and R_ww are Simpson sums
/// of their defining integrands sampled with expm at the nodes, using the
/// undiscounted form e^{-mu s} Gamma(s)' Qbar Gamma(s). Error is O(panels^-4).
/// Throws ParameterError if panels < 2 or odd.
TargetSet oracle_quadrature(const DeqSystem& sys, double t, int panels = 4096);

/// B(Ts) from dB/dt = A_c B + B_c, B(0) = 0, with N classic RK4 steps.
Mat b_alternative(const Mat& Ac, const Mat& Bc, double Ts, int N);

}  // namespace lqdisc
