#include "lqdisc/vanloan.hpp"

namespace lqdisc {

VanLoanBlocks vanloan_blocks(const DeqSystem& sys, double t) {
  const auto nh = sys.nh();
  const Mat zero = Mat::Zero(nh, nh);
  const Mat id = Mat::Identity(nh, nh);

  const Mat c1 = block({{-sys.Hcq.transpose(), sys.E1.transpose() * sys.Qbar * sys.E1},
                        {zero, sys.Hcq}});
  const Mat p1 = expm(c1 * t);
  const Mat c2 = block({{zero, id}, {zero, sys.Hcm.transpose()}});
  const Mat p2 = expm(c2 * t);

  VanLoanBlocks vb;
  vb.phi1_11 = p1.topLeftCorner(nh, nh);
  vb.phi1_12 = p1.topRightCorner(nh, nh);
  vb.phi1_22 = p1.bottomRightCorner(nh, nh);
  vb.phi2_12 = p2.topRightCorner(nh, nh);
  vb.phi2_22 = p2.bottomRightCorner(nh, nh);
  vb.phi3 = expm(sys.Hc * t);
  return vb;
}

Mat rww_expm(const Mat& Ac, const Mat& G, double t) {
  require_square(Ac, "rww_expm");
  if (G.rows() != Ac.rows()) throw DimensionError("rww_expm: G rows do not match A_c");
  const auto n = Ac.rows();
  const Mat c3 = block({{-Ac, G * G.transpose()}, {Mat::Zero(n, n), Ac.transpose()}});
  const Mat p = expm(c3 * t);
  const Mat phi12 = p.topRightCorner(n, n);
  const Mat phi22 = p.bottomRightCorner(n, n);
  return symmetrize(phi22.transpose() * phi12);
}

DiscreteCore discretize_expm(const DeqSystem& sys, double t) {
  const VanLoanBlocks vb = vanloan_blocks(sys, t);
  const Mat gamma = sys.E1 * vb.phi3 * sys.E2;

  DiscreteCore out;
  out.A = gamma.topLeftCorner(sys.nx, sys.nx);
  out.Bo = gamma.topRightCorner(sys.nx, sys.nu);
  out.M = sys.E2.transpose() * vb.phi2_12 * sys.E1.transpose() * sys.Mbar;
  out.Q = symmetrize(sys.E2.transpose() * vb.phi1_22.transpose() * vb.phi1_12 * sys.E2);
  if (sys.G) out.Rww = rww_expm(sys.Ac, *sys.G, t);
  return out;
}

DiscreteCore discretize_expm(const DeqSystem& sys) { return discretize_expm(sys, sys.Ts); }

}  // namespace lqdisc
