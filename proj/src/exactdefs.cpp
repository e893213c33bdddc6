#include "lqdisc/exactdefs.hpp"

#include <cmath>
#include <string>

namespace lqdisc {

namespace {

Mat generator(const Mat& a, const Mat& b) {
  const auto n = a.rows();
  const auto m = b.cols();
  return block({{a, b}, {Mat::Zero(m, n), Mat::Zero(m, m)}});
}

void finish_weights(DeqSystem& sys) {
  sys.Mbar = -sys.Cz.transpose() * sys.Qc;
  sys.Qbar = symmetrize(-sys.Mbar * sys.Cz);
  const auto nh = sys.Hc.rows();
  sys.Hcq = sys.Hc - 0.5 * sys.mu * Mat::Identity(nh, nh);
  sys.Hcm = sys.Hc - sys.mu * Mat::Identity(nh, nh);
}

void check_cost(const CostSpec& cost, Eigen::Index nz) {
  if (cost.mu < 0.0) throw DomainError("build_deq: discount mu must be >= 0");
  cost.validate(nz);
}

}  // namespace

DeqSystem build_deq(const StateSpace& plant, const CostSpec& cost) {
  plant.validate();
  check_cost(cost, plant.nz());

  DeqSystem sys;
  sys.delayed = false;
  sys.nx = plant.nx();
  sys.nu = plant.nu();
  sys.nz = plant.nz();
  sys.mu = cost.mu;
  sys.Ts = cost.Ts;
  sys.Ac = plant.A;
  sys.VAc = Mat::Zero(sys.nx, sys.nx);
  sys.B1c = plant.B;
  sys.B2bar = Mat::Zero(sys.nx, sys.nu);
  sys.Cz = block({{plant.C, plant.D}});
  sys.Qc = cost.Qc;
  sys.G = plant.G;

  sys.H1c = generator(plant.A, plant.B);
  sys.H2c = Mat::Zero(sys.nxu(), sys.nxu());
  sys.H3c = Mat::Zero(sys.nxu(), sys.nxu());
  sys.Hc = sys.H1c;
  sys.E1 = Mat::Identity(sys.nxu(), sys.nxu());
  sys.E2 = Mat::Identity(sys.nxu(), sys.nxu());
  finish_weights(sys);
  return sys;
}

DeqSystem build_deq(const DelayRealization& r, const CostSpec& cost) {
  check_cost(cost, r.nz());

  DeqSystem sys;
  sys.delayed = true;
  sys.nx = r.nx();
  sys.nu = r.nu_aug();
  sys.nz = r.nz();
  sys.mu = cost.mu;
  sys.Ts = cost.Ts;
  sys.Ac = r.A;
  sys.VAc = r.V * r.A;
  sys.B1c = r.B1c;
  sys.B2bar = r.B2bar();
  sys.Cz = block({{r.C, r.Do}});
  sys.Qc = cost.Qc;
  sys.G = r.G;

  const auto nxu = sys.nxu();
  sys.H1c = generator(sys.Ac, sys.B1c);
  sys.H2c = generator(sys.VAc, sys.B2bar);
  sys.H3c = generator(sys.VAc, Mat::Zero(sys.nx, sys.nu));
  sys.Hc = blkdiag({sys.H1c, sys.H2c, sys.H3c});

  const Mat id = Mat::Identity(nxu, nxu);
  sys.E1 = block({{id, id, -id}});
  sys.E2 = block({{id}, {id}, {id}});
  finish_weights(sys);
  return sys;
}

Mat gamma_decomposed(const DeqSystem& sys, double t) {
  return sys.E1 * expm(sys.Hc * t) * sys.E2;
}

TargetSet oracle_quadrature(const DeqSystem& sys, double t, int panels) {
  if (panels < 2 || panels % 2 != 0) {
    throw ParameterError("oracle_quadrature: panels must be even and >= 2, got " +
                         std::to_string(panels));
  }
  const auto nx = sys.nx;
  const auto nu = sys.nu;
  const auto nxu = sys.nxu();
  const double h = t / panels;

  Mat b1 = Mat::Zero(nx, nu);
  Mat b2 = Mat::Zero(nx, nu);
  Mat q = Mat::Zero(nxu, nxu);
  Mat m = Mat::Zero(nxu, sys.nz);
  std::optional<Mat> rww;
  Mat ggt;
  if (sys.G) {
    rww = Mat::Zero(nx, nx);
    ggt = *sys.G * sys.G->transpose();
  }

  Mat gamma = Mat::Identity(nxu, nxu);
  for (int k = 0; k <= panels; ++k) {
    const double s = k * h;
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);

    // Sub-blocks of the ZOH exponentials give A(s), A_v(s) and the partial
    // input integrals that make up Gamma(s).
    const Mat e1 = expm(sys.H1c * s);
    const Mat a = e1.topLeftCorner(nx, nx);
    Mat bo = e1.topRightCorner(nx, nu);
    Mat av = Mat::Identity(nx, nx);
    if (sys.delayed) {
      const Mat e2 = expm(sys.H2c * s);
      av = e2.topLeftCorner(nx, nx);
      bo += e2.topRightCorner(nx, nu);
    }
    gamma.topLeftCorner(nx, nx) = a;
    gamma.topRightCorner(nx, nu) = bo;

    const double disc = std::exp(-sys.mu * s);
    b1 += w * (a * sys.B1c);
    b2 += w * (av * sys.B2bar);
    q += (w * disc) * (gamma.transpose() * sys.Qbar * gamma);
    m += (w * disc) * (gamma.transpose() * sys.Mbar);
    if (rww) *rww += w * (a * ggt * a.transpose());
  }

  const double scale = h / 3.0;
  TargetSet out;
  out.A = expm(sys.Ac * t);
  out.Av = expm(sys.VAc * t);
  out.B1 = scale * b1;
  out.B2 = scale * b2;
  out.Bo = out.B1 + out.B2;
  out.Q = symmetrize(scale * q);
  out.M = scale * m;
  if (rww) out.Rww = symmetrize(scale * *rww);
  return out;
}

Mat b_alternative(const Mat& Ac, const Mat& Bc, double Ts, int N) {
  require_square(Ac, "b_alternative");
  if (Bc.rows() != Ac.rows()) throw DimensionError("b_alternative: B_c rows do not match A_c");
  if (N < 1) throw ParameterError("b_alternative: N must be >= 1");
  const double h = Ts / N;
  auto rhs = [&](const Mat& b) -> Mat { return Ac * b + Bc; };
  Mat b = Mat::Zero(Bc.rows(), Bc.cols());
  for (int k = 0; k < N; ++k) {
    const Mat k1 = rhs(b);
    const Mat k2 = rhs(b + 0.5 * h * k1);
    const Mat k3 = rhs(b + 0.5 * h * k2);
    const Mat k4 = rhs(b + h * k3);
    b += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return b;
}

}  // namespace lqdisc
