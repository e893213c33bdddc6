#include "lqdisc/stepdouble.hpp"

#include <string>

namespace lqdisc {

DoublingState initial_doubling_state(const CoefficientSet& cs, const DeqSystem& sys) {
  DoublingState st;
  st.n = 1;
  st.At = blkdiag({cs.Lambda, cs.LambdaV});
  st.Bo_sum = Mat::Identity(2 * sys.nx, 2 * sys.nx);
  st.Hm = cs.OmegaM;
  st.Hq = cs.OmegaQ;
  st.Msum = Mat::Identity(sys.nh(), sys.nh());
  st.Qsum = cs.Qc_tilde;
  if (cs.Rc_tilde) st.Rsum = *cs.Rc_tilde;
  return st;
}

DoublingState double_state(const DoublingState& half) {
  DoublingState st;
  st.n = 2 * half.n;

  // Sums first: they need the power-n matrices.
  st.Msum = half.Msum * (Mat::Identity(half.Hm.rows(), half.Hm.cols()) + half.Hm.transpose());
  st.Qsum = symmetrize(half.Qsum + half.Hq.transpose() * half.Qsum * half.Hq);
  if (half.Rsum) {
    const auto nx = half.Rsum->rows();
    const Mat a = half.At.topLeftCorner(nx, nx);
    st.Rsum = symmetrize(*half.Rsum + a * *half.Rsum * a.transpose());
  }

  st.Bo_sum = half.Bo_sum * (Mat::Identity(half.At.rows(), half.At.cols()) + half.At);
  st.At = half.At * half.At;
  st.Hm = half.Hm * half.Hm;
  st.Hq = half.Hq * half.Hq;
  return st;
}

DiscreteCore extract(const DoublingState& st, const CoefficientSet& cs, const DeqSystem& sys) {
  const Mat theta_o = block({{cs.Theta1, cs.Theta2}});
  const Mat b_oc = block({{cs.B1c_tilde}, {cs.B2c_tilde}});
  DiscreteCore out;
  out.A = st.At.topLeftCorner(sys.nx, sys.nx);
  out.Bo = theta_o * st.Bo_sum * b_oc;
  out.M = sys.E2.transpose() * st.Msum * cs.Mc_tilde;
  out.Q = symmetrize(sys.E2.transpose() * st.Qsum * sys.E2);
  if (st.Rsum) out.Rww = *st.Rsum;
  return out;
}

DoublingResult discretize_step_doubling(const CoefficientSet& cs, const DeqSystem& sys) {
  if (cs.N < 1 || (cs.N & (cs.N - 1)) != 0) {
    throw ParameterError("step doubling needs N = 2^j, got N = " + std::to_string(cs.N));
  }
  DoublingResult res;
  DoublingState st = initial_doubling_state(cs, sys);
  while (st.n < cs.N) {
    st = double_state(st);
    ++res.iterations;
  }
  res.core = extract(st, cs, sys);
  return res;
}

DoublingResult discretize_step_doubling(const DeqSystem& sys, const ButcherTableau& tableau,
                                        int j) {
  if (j < 0 || j > 30) {
    throw ParameterError("step doubling exponent j must be in 0..30, got " + std::to_string(j));
  }
  return discretize_step_doubling(build_coefficients(sys, tableau, 1 << j), sys);
}

}  // namespace lqdisc
