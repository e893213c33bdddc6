#include "lqdisc/lqassemble.hpp"

#include <cmath>
#include <string>

namespace lqdisc {

AugmentedSystem assemble_augmented(const DiscreteCore& core, const DelayRealization& r) {
  const auto nu = static_cast<Eigen::Index>(r.nu);
  const auto hist = static_cast<Eigen::Index>(r.mbar) * nu;
  if (core.Bo.cols() != r.nu_aug() || r.Do.cols() != r.nu_aug()) {
    throw AssemblyError("assemble_augmented: B_o has " + std::to_string(core.Bo.cols()) +
                        " columns, expected (mbar+1)*nu = " + std::to_string(r.nu_aug()));
  }
  if (core.A.rows() != r.nx() || core.Bo.rows() != r.nx()) {
    throw AssemblyError("assemble_augmented: A/B_o rows do not match realized state");
  }
  if (r.mbar == 0) return {core.A, core.Bo, r.C, r.Do};

  const auto nx = r.nx();
  AugmentedSystem aug;
  aug.A = block({{core.A, core.Bo.leftCols(hist)}, {Mat::Zero(hist, nx), r.IA()}});
  aug.B = block({{core.Bo.rightCols(nu)}, {r.IB()}});
  aug.C = block({{r.C, r.Do.leftCols(hist)}});
  aug.D = r.Do.rightCols(nu);
  return aug;
}

AugmentedSystem assemble_augmented(const DiscreteCore& core, const StateSpace& plant) {
  if (core.Bo.cols() != plant.nu() || core.A.rows() != plant.nx()) {
    throw AssemblyError("assemble_augmented: core does not match plant dimensions");
  }
  return {core.A, core.Bo, plant.C, plant.D};
}

double discount_integral(double mu, double Ts) {
  const double x = mu * Ts;
  if (x < kRhoSeriesThreshold) return Ts * (1.0 - 0.5 * x + x * x / 6.0);
  return -std::expm1(-x) / mu;
}

std::vector<StageCost> stage_costs(const Mat& Q, const Mat& M, const CostSpec& cost) {
  const auto nz = M.cols();
  const double weight = discount_integral(cost.mu, cost.Ts);
  std::vector<StageCost> out;
  out.reserve(static_cast<std::size_t>(cost.N));
  for (int k = 0; k < cost.N; ++k) {
    StageCost st;
    st.k = k;
    st.t = k * cost.Ts;
    st.discount = std::exp(-cost.mu * st.t);
    st.Q = st.discount * Q;
    st.M = st.discount * M;
    const Vec zbar = cost.reference(k, nz);
    st.q = st.M * zbar;
    st.rho = 0.5 * st.discount * weight * zbar.dot(cost.Qc * zbar);
    out.push_back(std::move(st));
  }
  return out;
}

ExpectedCost expected_stage_cost(const StageCost& stage, const Vec& xhat, const Vec& u,
                                 const Mat& P, const Mat& Rww, const Mat& C) {
  const auto n = stage.Q.rows();
  if (xhat.size() + u.size() != n) {
    throw DimensionError("expected_stage_cost: [xhat; u] has length " +
                         std::to_string(xhat.size() + u.size()) + ", Q_k is " +
                         std::to_string(n));
  }
  if (P.rows() != xhat.size() || P.cols() != xhat.size()) {
    throw DimensionError("expected_stage_cost: P does not match xhat");
  }
  if (!is_symmetric(P, 1e-12) || min_eigenvalue(P) < -1e-10) {
    throw DomainError("expected_stage_cost: P is not symmetric positive semidefinite");
  }

  Vec mean(n);
  mean << xhat, u;
  ExpectedCost ec;
  ec.deterministic = 0.5 * mean.dot(stage.Q * mean) + stage.q.dot(mean) + stage.rho;
  ec.state_trace = (stage.Q.topLeftCorner(xhat.size(), xhat.size()) * P).trace();
  if (Rww.size() > 0) ec.noise_trace = (C * Rww * C.transpose()).trace();
  return ec;
}

double expected_quadratic(const Mat& S, const Vec& m, const Mat& R) {
  return m.dot(S * m) + (S * R).trace();
}

}  // namespace lqdisc
