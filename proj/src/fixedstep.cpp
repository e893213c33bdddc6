#include "lqdisc/fixedstep.hpp"

#include <sstream>

namespace lqdisc {

namespace {

[[noreturn]] void rethrow_singular(const SingularityError& e, const ButcherTableau& t, double dt) {
  std::ostringstream msg;
  msg << "scheme '" << t.name << "' with dt=" << dt << ": singular stage matrix (" << e.what()
      << ")";
  throw SingularityError(msg.str(), e.pivot());
}

}  // namespace

std::vector<Mat> stage_coefficients(const ButcherTableau& tableau, const Mat& generator,
                                    double dt) {
  require_square(generator, "stage_coefficients");
  const int s = tableau.stages();
  const auto n = generator.rows();
  const Mat id = Mat::Identity(n, n);
  const Mat hg = dt * generator;
  std::vector<Mat> stages(static_cast<std::size_t>(s));

  try {
    if (tableau.kind == TableauKind::implicit) {
      // [I - dt (a kron G)] [S_1; ...; S_s] = [I; ...; I]
      Mat lhs = Mat::Identity(s * n, s * n);
      Mat rhs(s * n, n);
      for (int i = 0; i < s; ++i) {
        rhs.middleRows(i * n, n) = id;
        for (int j = 0; j < s; ++j) {
          lhs.block(i * n, j * n, n, n) -= tableau.a(i, j) * hg;
        }
      }
      const Mat sol = solve(lhs, rhs);
      for (int i = 0; i < s; ++i) stages[static_cast<std::size_t>(i)] = sol.middleRows(i * n, n);
      return stages;
    }

    for (int i = 0; i < s; ++i) {
      Mat acc = Mat::Zero(n, n);
      for (int j = 0; j < i; ++j) {
        if (tableau.a(i, j) != 0.0) acc += tableau.a(i, j) * stages[static_cast<std::size_t>(j)];
      }
      Mat rhs = id + hg * acc;
      const double aii = tableau.a(i, i);
      stages[static_cast<std::size_t>(i)] = aii == 0.0 ? rhs : solve(id - aii * hg, rhs);
    }
  } catch (const SingularityError& e) {
    rethrow_singular(e, tableau, dt);
  }
  return stages;
}

Mat propagation(const ButcherTableau& tableau, const Mat& generator,
                const std::vector<Mat>& stages, double dt) {
  return Mat::Identity(generator.rows(), generator.cols()) +
         dt * generator * weighted_stage_sum(tableau, stages);
}

Mat weighted_stage_sum(const ButcherTableau& tableau, const std::vector<Mat>& stages) {
  Mat sum = Mat::Zero(stages.front().rows(), stages.front().cols());
  for (int i = 0; i < tableau.stages(); ++i) sum += tableau.b(i) * stages[static_cast<std::size_t>(i)];
  return sum;
}

CoefficientSet build_coefficients(const DeqSystem& sys, const ButcherTableau& tableau, int N) {
  tableau.validate();
  if (N < 1) throw ParameterError("build_coefficients: N must be >= 1");

  CoefficientSet cs;
  cs.scheme = tableau.name;
  cs.N = N;
  cs.dt = sys.Ts / N;
  const double dt = cs.dt;

  cs.Lambda_i = stage_coefficients(tableau, sys.Ac, dt);
  cs.LambdaV_i = stage_coefficients(tableau, sys.VAc, dt);
  cs.OmegaM_i = stage_coefficients(tableau, sys.Hcm, dt);
  cs.OmegaQ_i = stage_coefficients(tableau, sys.Hcq, dt);

  cs.Lambda = propagation(tableau, sys.Ac, cs.Lambda_i, dt);
  cs.LambdaV = propagation(tableau, sys.VAc, cs.LambdaV_i, dt);
  cs.OmegaM = propagation(tableau, sys.Hcm, cs.OmegaM_i, dt);
  cs.OmegaQ = propagation(tableau, sys.Hcq, cs.OmegaQ_i, dt);
  cs.Theta1 = weighted_stage_sum(tableau, cs.Lambda_i);
  cs.Theta2 = weighted_stage_sum(tableau, cs.LambdaV_i);

  cs.B1c_tilde = dt * sys.B1c;
  cs.B2c_tilde = dt * sys.B2bar;

  const Mat e1t_mbar = sys.E1.transpose() * sys.Mbar;
  const Mat e1t_qbar_e1 = sys.E1.transpose() * sys.Qbar * sys.E1;
  cs.Mc_tilde = Mat::Zero(sys.nh(), sys.nz);
  cs.Qc_tilde = Mat::Zero(sys.nh(), sys.nh());
  for (int i = 0; i < tableau.stages(); ++i) {
    const auto& om = cs.OmegaM_i[static_cast<std::size_t>(i)];
    const auto& oq = cs.OmegaQ_i[static_cast<std::size_t>(i)];
    cs.Mc_tilde += tableau.b(i) * (om.transpose() * e1t_mbar);
    cs.Qc_tilde += tableau.b(i) * (oq.transpose() * e1t_qbar_e1 * oq);
  }
  cs.Mc_tilde *= dt;
  cs.Qc_tilde = symmetrize(dt * cs.Qc_tilde);

  if (sys.G) {
    const Mat ggt = *sys.G * sys.G->transpose();
    Mat rc = Mat::Zero(sys.nx, sys.nx);
    for (int i = 0; i < tableau.stages(); ++i) {
      const auto& li = cs.Lambda_i[static_cast<std::size_t>(i)];
      rc += tableau.b(i) * (li * ggt * li.transpose());
    }
    cs.Rc_tilde = symmetrize(dt * rc);
  }
  return cs;
}

DiscreteCore integrate(const CoefficientSet& cs, const DeqSystem& sys) {
  const auto nx = sys.nx;
  const auto nh = sys.nh();
  Mat a = Mat::Identity(nx, nx);
  Mat av = Mat::Identity(nx, nx);
  Mat b1 = Mat::Zero(nx, sys.nu);
  Mat b2 = Mat::Zero(nx, sys.nu);
  Mat hq = Mat::Identity(nh, nh);
  Mat hm = Mat::Identity(nh, nh);
  Mat q = Mat::Zero(sys.nxu(), sys.nxu());
  Mat m = Mat::Zero(sys.nxu(), sys.nz);
  std::optional<Mat> r;
  if (cs.Rc_tilde) r = Mat::Zero(nx, nx);

  const Mat e2t = sys.E2.transpose();
  Mat hq_e2(nh, sys.nxu());
  Mat tmp;
  for (int k = 0; k < cs.N; ++k) {
    hq_e2.noalias() = hq * sys.E2;
    tmp.noalias() = cs.Qc_tilde * hq_e2;
    q.noalias() += hq_e2.transpose() * tmp;
    tmp.noalias() = hm.transpose() * cs.Mc_tilde;
    m.noalias() += e2t * tmp;
    if (r) {
      tmp.noalias() = *cs.Rc_tilde * a.transpose();
      r->noalias() += a * tmp;
    }

    tmp.noalias() = a * cs.B1c_tilde;
    b1.noalias() += cs.Theta1 * tmp;
    tmp.noalias() = av * cs.B2c_tilde;
    b2.noalias() += cs.Theta2 * tmp;

    a = cs.Lambda * a;
    av = cs.LambdaV * av;
    hq = cs.OmegaQ * hq;
    hm = cs.OmegaM * hm;
  }

  DiscreteCore out;
  out.A = std::move(a);
  out.Bo = b1 + b2;
  out.Q = symmetrize(q);
  out.M = std::move(m);
  if (r) out.Rww = symmetrize(*r);
  return out;
}

DiscreteCore discretize_fixed_step(const DeqSystem& sys, const ButcherTableau& tableau, int N) {
  return integrate(build_coefficients(sys, tableau, N), sys);
}

}  // namespace lqdisc
