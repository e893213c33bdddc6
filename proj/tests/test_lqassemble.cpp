#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lqdisc/lqassemble.hpp"
#include "lqdisc/vanloan.hpp"
#include "oracles.hpp"

using namespace lqdisc;

namespace {

std::vector<Vec> simulate(const AugmentedSystem& aug, const std::vector<Vec>& u, int steps) {
  Vec x = Vec::Zero(aug.A.rows());
  std::vector<Vec> z;
  for (int k = 0; k <= steps; ++k) {
    const Vec uk = k < static_cast<int>(u.size()) ? u[static_cast<std::size_t>(k)]
                                                  : Vec::Zero(aug.B.cols());
    z.push_back(aug.C * x + aug.D * uk);
    x = aug.A * x + aug.B * uk;
  }
  return z;
}

}  // namespace

TEST_CASE("delay-free assembly passes the core through") {
  const StateSpace ss = fixtures::scalar_plant();
  const DiscreteCore d = discretize_expm(build_deq(ss, fixtures::scalar_cost()));
  const AugmentedSystem aug = assemble_augmented(d, ss);
  CHECK(max_abs_diff(aug.A, d.A) == 0.0);
  CHECK(max_abs_diff(aug.B, d.Bo) == 0.0);
  CHECK(max_abs_diff(aug.C, ss.C) == 0.0);
  CHECK(max_abs_diff(aug.D, ss.D) == 0.0);

  TransferModel tm;
  tm.nz = 1;
  tm.nu = 1;
  tm.channels = {{0, 0, {1.0}, {1.0, 1.0}, 0.0}};
  const DelayRealization r = realize_delays(tm, 1.0);
  const DiscreteCore dr = discretize_expm(build_deq(r, fixtures::scalar_cost()));
  const AugmentedSystem a0 = assemble_augmented(dr, r);
  CHECK(a0.A.rows() == 1);
  CHECK(max_abs_diff(a0.B, dr.Bo) == 0.0);
}

TEST_CASE("augmented dimensions for the two-input process") {
  const Problem p = fixtures::process_problem();
  const auto& r = std::get<DelayRealization>(p.plant);
  const DiscreteCore d = discretize_expm(p.deq());
  const AugmentedSystem aug = assemble_augmented(d, r);
  CHECK(aug.A.rows() == 6 + 4);
  CHECK(aug.A.cols() == 10);
  CHECK(aug.B.rows() == 10);
  CHECK(aug.B.cols() == 2);
  CHECK(aug.C.rows() == 2);
  CHECK(aug.C.cols() == 10);
  CHECK(aug.D.cols() == 2);
}

TEST_CASE("augmented simulation matches a direct convolution") {
  const Problem p = fixtures::process_problem();
  const auto& r = std::get<DelayRealization>(p.plant);
  const AugmentedSystem aug = assemble_augmented(discretize_expm(p.deq()), r);
  const oracle::DelayedPlant op = oracle::from_transfer(fixtures::process_transfer(), 1.0);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<Vec> u;
  for (int k = 0; k < 5; ++k) u.push_back(Vec::NullaryExpr(2, [&] { return g(rng); }));

  const auto zs = simulate(aug, u, 5);
  const auto zo = oracle::sampled_response(op, u, 5);
  for (std::size_t k = 0; k < zs.size(); ++k) {
    CAPTURE(k);
    CHECK((zs[k] - zo[k]).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("assembly rejects a core of the wrong width") {
  const Problem p = fixtures::process_problem();
  const auto& r = std::get<DelayRealization>(p.plant);
  DiscreteCore d = discretize_expm(p.deq());
  d.Bo = d.Bo.leftCols(4).eval();
  CHECK_THROWS_AS(assemble_augmented(d, r), AssemblyError);
  CHECK_THROWS_AS(assemble_augmented(d, fixtures::scalar_plant()), AssemblyError);
}

TEST_CASE("stage constants") {
  const Problem p = fixtures::process_problem();
  const DiscreteCore d = discretize_expm(p.deq());
  const auto st = stage_costs(d.Q, d.M, p.cost);
  REQUIRE(st.size() == 20);
  CHECK(st[0].rho == doctest::Approx(0.4531731173).epsilon(1e-10));
  CHECK(max_abs_diff(st[1].Q, std::exp(-0.2) * d.Q) <= 1e-15);
  CHECK(max_abs_diff(st[0].Q, d.Q) == 0.0);
  CHECK((st[3].q - st[3].M * p.cost.zbar[0]).norm() == 0.0);
  for (std::size_t k = 1; k < st.size(); ++k) {
    CHECK(st[k].rho == doctest::Approx(std::exp(-0.2) * st[k - 1].rho).epsilon(1e-13));
    CHECK(st[k].t == doctest::Approx(static_cast<double>(k)));
  }

  CostSpec c = p.cost;
  c.mu = 0.0;
  c.Ts = 0.5;
  const auto s0 = stage_costs(d.Q, d.M, c);
  CHECK(s0[0].rho == doctest::Approx(0.5 * 0.5 * 1.0).epsilon(1e-15));
  CHECK(s0[7].rho == s0[0].rho);
}

TEST_CASE("the constant term sums to the continuous integral") {
  const CostSpec c = fixtures::process_cost();
  const DiscreteCore d = discretize_expm(fixtures::process_problem().deq());
  double total = 0.0;
  for (const auto& st : stage_costs(d.Q, d.M, c)) total += st.rho;
  const double exact = 0.5 * (1.0 - std::exp(-0.2 * 20.0)) / 0.2;
  CHECK(total == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("discount_integral is continuous across the series threshold") {
  for (double ts : {0.1, 1.0, 3.0}) {
    for (double f : {0.999, 1.001}) {
      const double mu = f * kRhoSeriesThreshold / ts;
      const long double x = static_cast<long double>(mu) * ts;
      const long double ref = ts * (1.0L - x / 2 + x * x / 6 - x * x * x / 24);
      CHECK(std::abs(discount_integral(mu, ts) - static_cast<double>(ref)) <= 4e-16 * ts);
    }
    CHECK(discount_integral(0.0, ts) == ts);
    CHECK(discount_integral(1e-9, ts) == doctest::Approx(ts * (1 - 0.5e-9 * ts)).epsilon(1e-15));
  }
  CHECK(discount_integral(2.0, 1.0) == doctest::Approx((1 - std::exp(-2.0)) / 2.0).epsilon(1e-15));
}

TEST_CASE("expected stage cost splits into deterministic and trace parts") {
  StageCost st;
  st.Q = from_rows({{2.0, 0.5}, {0.5, 1.0}});
  st.q = (Vec(2) << -1.0, 0.25).finished();
  st.rho = 0.3;
  const Vec x = Vec::Constant(1, 0.4), u = Vec::Constant(1, -0.2);
  const Mat P = Mat::Constant(1, 1, 0.09);
  const Mat R = Mat::Constant(1, 1, 0.5);
  const Mat C = Mat::Constant(1, 1, 2.0);
  const ExpectedCost ec = expected_stage_cost(st, x, u, P, R, C);
  const double det = 0.5 * (2.0 * 0.16 + 2 * 0.5 * 0.4 * -0.2 + 0.04) + (-0.4 - 0.05) + 0.3;
  CHECK(ec.deterministic == doctest::Approx(det).epsilon(1e-15));
  CHECK(ec.state_trace == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(ec.noise_trace == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ec.total() == doctest::Approx(det + 2.18).epsilon(1e-15));

  const ExpectedCost none = expected_stage_cost(st, x, u, P, Mat(), C);
  CHECK(none.noise_trace == 0.0);
}

TEST_CASE("scalar process noise trace") {
  const StateSpace ss = fixtures::scalar_plant();
  const Mat R = rww_expm(ss.A, *ss.G, 1.0);
  StageCost st;
  st.Q = Mat::Identity(2, 2);
  st.q = Vec::Zero(2);
  const ExpectedCost ec =
      expected_stage_cost(st, Vec::Zero(1), Vec::Zero(1), Mat::Zero(1, 1), R, ss.C);
  CHECK(ec.noise_trace == doctest::Approx(0.4323323584).epsilon(1e-10));
}

TEST_CASE("uncertainty terms do not move the minimizing input") {
  const Problem p = fixtures::process_problem();
  const DiscreteCore d = discretize_expm(p.deq());
  const auto st = stage_costs(d.Q, d.M, p.cost);
  const Vec x = Vec::LinSpaced(6, -0.3, 0.4);
  const Vec hist = Vec::Zero(4);
  Vec xh(10);
  xh << x, hist;
  Mat P = Mat::Zero(10, 10);
  P.topLeftCorner(6, 6) = 0.05 * Mat::Identity(6, 6);
  const Mat R = Mat::Identity(6, 6) * 0.1;
  const Mat C = std::get<DelayRealization>(p.plant).C;

  double best_det = 1e300, best_tot = 1e300;
  std::pair<int, int> arg_det, arg_tot;
  for (int a = -10; a <= 10; ++a) {
    for (int b = -10; b <= 10; ++b) {
      const Vec u = (Vec(2) << 0.2 * a, 0.2 * b).finished();
      const ExpectedCost ec = expected_stage_cost(st[2], xh, u, P, R, C);
      if (ec.deterministic < best_det) best_det = ec.deterministic, arg_det = {a, b};
      if (ec.total() < best_tot) best_tot = ec.total(), arg_tot = {a, b};
    }
  }
  CHECK(arg_det == arg_tot);
  CHECK(best_tot - best_det > 0.0);
}

TEST_CASE("expected_quadratic and input checks") {
  const Mat S = from_rows({{1.0, 0.2}, {0.2, 3.0}});
  const Vec m = (Vec(2) << 1.0, -1.0).finished();
  const Mat R = from_rows({{0.5, 0.1}, {0.1, 0.2}});
  CHECK(expected_quadratic(S, m, R) ==
        doctest::Approx(1.0 - 0.4 + 3.0 + 0.5 + 0.04 + 0.6).epsilon(1e-15));

  StageCost st;
  st.Q = Mat::Identity(2, 2);
  st.q = Vec::Zero(2);
  const Vec one = Vec::Ones(1);
  CHECK_THROWS_AS(expected_stage_cost(st, one, one, Mat::Constant(1, 1, -1.0), Mat(), one),
                  DomainError);
  CHECK_THROWS_AS(expected_stage_cost(st, Vec::Ones(2), one, Mat::Zero(2, 2), Mat(), one),
                  DimensionError);
  CHECK_THROWS_AS(expected_stage_cost(st, one, one, Mat::Zero(2, 2), Mat(), one), DimensionError);
}
