#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "lqdisc/stepdouble.hpp"
#include "lqdisc/study.hpp"

using namespace lqdisc;

namespace {

DoublingState scalar_state(double lambda, double omega, double q) {
  DoublingState st;
  st.At = Mat::Constant(1, 1, lambda);
  st.Bo_sum = Mat::Identity(1, 1);
  st.Hm = Mat::Constant(1, 1, omega);
  st.Hq = Mat::Constant(1, 1, omega);
  st.Msum = Mat::Identity(1, 1);
  st.Qsum = Mat::Constant(1, 1, q);
  return st;
}

Mat random_matrix(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Mat::NullaryExpr(n, n, [&] { return u(rng); });
}

}  // namespace

TEST_CASE("one doubling of a scalar state") {
  const double l = 0.8, w = 0.6, q = 1.7;
  const DoublingState st = double_state(scalar_state(l, w, q));
  CHECK(st.n == 2);
  CHECK(st.At(0, 0) == doctest::Approx(l * l).epsilon(1e-15));
  CHECK(st.Bo_sum(0, 0) == doctest::Approx(1 + l).epsilon(1e-15));
  CHECK(st.Qsum(0, 0) == doctest::Approx(q * (1 + w * w)).epsilon(1e-15));
  CHECK(st.Msum(0, 0) == doctest::Approx(1 + w).epsilon(1e-15));
}

TEST_CASE("two doublings give the four-term geometric sum") {
  const double l = 0.8;
  const DoublingState st = double_state(double_state(scalar_state(l, 0.5, 1.0)));
  CHECK(st.n == 4);
  CHECK(st.Bo_sum(0, 0) == doctest::Approx((1 + l) * (1 + l * l)).epsilon(1e-15));
  CHECK(st.Bo_sum(0, 0) == doctest::Approx(1 + l + l * l + l * l * l).epsilon(1e-15));
}

TEST_CASE("sums use the power-n matrices: direct powering at n = 8") {
  std::mt19937_64 rng(12);
  const int n = 3;
  const Mat om = random_matrix(rng, n, 0.5);
  const Mat r = random_matrix(rng, n, 1.0);
  const Mat qt = r * r.transpose();

  DoublingState st;
  st.At = om;
  st.Bo_sum = Mat::Identity(n, n);
  st.Hm = om;
  st.Hq = om;
  st.Msum = Mat::Identity(n, n);
  st.Qsum = qt;
  for (int k = 0; k < 3; ++k) st = double_state(st);

  Mat q_direct = Mat::Zero(n, n), m_direct = Mat::Zero(n, n), b_direct = Mat::Zero(n, n);
  Mat p = Mat::Identity(n, n);
  for (int i = 0; i < 8; ++i) {
    q_direct += p.transpose() * qt * p;
    m_direct += p.transpose();
    b_direct += p;
    p = p * om;
  }
  CHECK(max_abs_diff(st.Qsum, q_direct) <= 1e-14);
  CHECK(max_abs_diff(st.Msum, m_direct) <= 1e-14);
  CHECK(max_abs_diff(st.Bo_sum, b_direct) <= 1e-14);
  CHECK(max_abs_diff(st.At, p) <= 1e-14);

  // squaring the powers before forming the sums gives a different (wrong) result
  DoublingState wrong;
  wrong.Hq = om;
  wrong.Qsum = qt;
  for (int k = 0; k < 3; ++k) {
    wrong.Hq = wrong.Hq * wrong.Hq;
    wrong.Qsum = wrong.Qsum + wrong.Hq.transpose() * wrong.Qsum * wrong.Hq;
  }
  CHECK(max_abs_diff(wrong.Qsum, q_direct) > 1e-3);
}

TEST_CASE("the geometric input sum commutes with the state power") {
  std::mt19937_64 rng(13);
  const Mat a = random_matrix(rng, 4, 0.6);
  DoublingState st;
  st.At = a;
  st.Bo_sum = Mat::Identity(4, 4);
  st.Hm = st.Hq = Mat::Identity(1, 1);
  st.Msum = Mat::Identity(1, 1);
  st.Qsum = Mat::Zero(1, 1);
  for (int k = 0; k < 4; ++k) {
    const Mat id = Mat::Identity(4, 4);
    CHECK(max_abs_diff(st.Bo_sum * (id + st.At), (id + st.At) * st.Bo_sum) <= 1e-13);
    st = double_state(st);
  }
}

TEST_CASE("j = 0 is one fixed step") {
  const DeqSystem sys = fixtures::process_problem().deq();
  const auto rk4 = tableau_by_name("rk4");
  const DoublingResult d = discretize_step_doubling(sys, rk4, 0);
  const DiscreteCore f = discretize_fixed_step(sys, rk4, 1);
  CHECK(d.iterations == 0);
  CHECK(core_errors(f, d.core).max() <= 1e-14);
}

TEST_CASE("scalar rk4, j = 10, matches the fixed-step result") {
  const DeqSystem sys = build_deq(fixtures::scalar_plant(), fixtures::scalar_cost(0.2));
  const auto rk4 = tableau_by_name("rk4");
  const DoublingResult d = discretize_step_doubling(sys, rk4, 10);
  const DiscreteCore f = discretize_fixed_step(sys, rk4, 1024);
  CHECK(d.iterations == 10);
  CHECK(max_abs_diff(d.core.A, f.A) <= 1e-12);
  REQUIRE(d.core.Rww.has_value());
  CHECK(max_abs_diff(*d.core.Rww, *f.Rww) <= 1e-12);
}

TEST_CASE("doubling equals fixed step for j = 0..6 on random and delayed systems") {
  std::mt19937_64 rng(77);
  std::vector<DeqSystem> systems{fixtures::process_problem().deq()};
  for (int i = 0; i < 6; ++i) systems.push_back(random_problem(rng, i).deq());
  for (const auto& sys : systems) {
    for (const auto& name : tableau_names()) {
      const auto t = tableau_by_name(name);
      for (int j = 0; j <= 6; ++j) {
        const DoublingResult d = discretize_step_doubling(sys, t, j);
        const DiscreteCore f = discretize_fixed_step(sys, t, 1 << j);
        CHECK(d.iterations == j);
        CHECK(core_errors(f, d.core).max() <= 1e-10);
        if (f.Rww) CHECK(max_abs_diff(*f.Rww, *d.core.Rww) <= 1e-10);
      }
    }
  }
}

TEST_CASE("doubling rejects invalid step counts") {
  const DeqSystem sys = build_deq(fixtures::scalar_plant(), fixtures::scalar_cost());
  const auto rk4 = tableau_by_name("rk4");
  CHECK_THROWS_AS(discretize_step_doubling(sys, rk4, -1), ParameterError);
  CHECK_THROWS_AS(discretize_step_doubling(sys, rk4, 31), ParameterError);
  CHECK_THROWS_AS(discretize_step_doubling(build_coefficients(sys, rk4, 12), sys), ParameterError);
}
