#include <doctest.h>

#include <complex>
#include <random>

#include "fixtures.hpp"
#include "lqdisc/model.hpp"
#include "oracles.hpp"

using namespace lqdisc;
using cplx = std::complex<double>;

namespace {

cplx polyval(const std::vector<double>& p, cplx s) {
  cplx acc = 0.0;
  for (double c : p) acc = acc * s + c;
  return acc;
}

cplx frequency_response(const StateSpace& ss, cplx s) {
  const auto n = ss.nx();
  if (n == 0) return ss.D(0, 0);
  const Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - ss.A.cast<cplx>();
  const Eigen::VectorXcd x = m.partialPivLu().solve(ss.B.cast<cplx>().col(0));
  return (ss.C.cast<cplx>() * x)(0) + ss.D(0, 0);
}

}  // namespace

TEST_CASE("split_delay examples") {
  auto s = split_delay(0.1, 1.0);
  CHECK(s.m == 1);
  CHECK(s.v == doctest::Approx(0.9).epsilon(1e-14));
  s = split_delay(2.0, 1.0);
  CHECK(s.m == 2);
  CHECK(s.v == 0.0);
  s = split_delay(0.0, 1.0);
  CHECK(s.m == 0);
  CHECK(s.v == 0.0);
}

TEST_CASE("split_delay snaps near-integer ratios and satisfies the defining identity") {
  const auto s = split_delay(3.0 * (1.0 + 1e-14), 1.0);
  CHECK(s.m == 3);
  CHECK(s.v == 0.0);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> tau(0.0, 7.0), ts(0.05, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double t = tau(rng), T = ts(rng);
    const auto sp = split_delay(t, T);
    CHECK(std::abs(sp.m - sp.v - t / T) <= 1e-12);
    CHECK(sp.v >= 0.0);
    CHECK(sp.v < 1.0);
  }
  CHECK_THROWS_AS(split_delay(-0.5, 1.0), DomainError);
  CHECK_THROWS_AS(split_delay(0.5, 0.0), DomainError);
}

TEST_CASE("realize_channel: first-order lag") {
  const StateSpace ss = realize_channel({1.0}, {1.0, 1.0});
  CHECK(ss.A(0, 0) == -1.0);
  CHECK(ss.B(0, 0) == 1.0);
  CHECK(ss.C(0, 0) == 1.0);
  CHECK(ss.D(0, 0) == 0.0);
}

TEST_CASE("realize_channel: static gain has no states") {
  const StateSpace ss = realize_channel({2.4}, {1.0});
  CHECK(ss.nx() == 0);
  CHECK(ss.D(0, 0) == 2.4);
}

TEST_CASE("realize_channel matches the rational function on the imaginary axis") {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
      {{1.0}, {4.5, 4.5, 1.0}},        // 1/((1.5s+1)(3s+1))
      {{-4.0, -2.0}, {3.4, 1.0}},      // biproper
      {{2.4}, {1.53, 2.6, 1.0}},
      {{0.3, -1.0, 2.0}, {2.0, 1.0, 5.0, 1.0}},
  };
  for (const auto& [num, den] : cases) {
    const StateSpace ss = realize_channel(num, den);
    CHECK(ss.nx() == static_cast<Eigen::Index>(den.size()) - 1);
    for (double w : {0.01, 0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 1000.0}) {
      const cplx s(0.0, w);
      const cplx ref = polyval(num, s) / polyval(den, s);
      CHECK(std::abs(frequency_response(ss, s) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("realize_channel rejects improper and degenerate channels") {
  CHECK_THROWS_AS(realize_channel({1.0, 0.0, 1.0}, {1.0, 1.0}), ModelError);
  CHECK_THROWS_AS(realize_channel({1.0}, {0.0}), ModelError);
  CHECK_THROWS_AS(realize_channel({1.0}, {}), ModelError);
}

TEST_CASE("process model realization: splits and sizes") {
  const DelayRealization r = realize_delays(fixtures::process_transfer(), 1.0);
  CHECK(r.mbar == 2);
  CHECK(r.nu == 2);
  CHECK(r.nx() == 6);
  CHECK(r.nz() == 2);
  CHECK(r.nu_aug() == 6);
  REQUIRE(r.channels.size() == 4);

  // input-major ordering: (1,1), (2,1), (1,2), (2,2)
  const std::vector<std::tuple<int, int, int, double>> expected = {
      {0, 0, 1, 0.9}, {1, 0, 2, 0.0}, {0, 1, 2, 0.4}, {1, 1, 1, 0.1}};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& [i, j, m, v] = expected[k];
    CHECK(r.channels[k].output == i);
    CHECK(r.channels[k].input == j);
    CHECK(r.channels[k].split.m == m);
    CHECK(r.channels[k].split.v == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("process model realization matches an independent construction") {
  const DelayRealization r = realize_delays(fixtures::process_transfer(), 1.0);
  const oracle::DelayedPlant p = oracle::from_transfer(fixtures::process_transfer(), 1.0);
  CHECK(max_abs_diff(r.A, p.A) == 0.0);
  CHECK(max_abs_diff(r.C, p.C) == 0.0);
  CHECK(p.mbar() == r.mbar);
}

TEST_CASE("zero-delay SISO realization reduces to the plain plant") {
  TransferModel tm;
  tm.nz = 1;
  tm.nu = 1;
  tm.channels = {{0, 0, {1.0}, {1.0, 1.0}, 0.0}};
  const DelayRealization r = realize_delays(tm, 1.0);
  CHECK(r.mbar == 0);
  CHECK(norm_inf(r.V) == 0.0);
  CHECK(r.B1c(0, 0) == 1.0);
  CHECK(max_abs_diff(r.B2c, r.B1c) == 0.0);
  CHECK(norm_inf(r.B2bar()) == 0.0);
}

TEST_CASE("single channel with m = 1 uses slots 1 and 2 of 2") {
  TransferModel tm;
  tm.nz = 1;
  tm.nu = 1;
  tm.channels = {{0, 0, {1.0}, {1.0, 1.0}, 0.25}};
  const DelayRealization r = realize_delays(tm, 1.0);
  CHECK(r.mbar == 1);
  CHECK(max_abs_diff(r.B1c, from_rows({{1.0, 0.0}})) == 0.0);
  CHECK(max_abs_diff(r.B2c, from_rows({{0.0, 1.0}})) == 0.0);
  CHECK(r.V(0, 0) == doctest::Approx(0.75));
  CHECK(max_abs_diff(r.Do, from_rows({{0.0, 0.0}})) == 0.0);
}

TEST_CASE("slot_selector picks the p-th input slot") {
  const Mat e = slot_selector(2, 3, 2);
  CHECK(e.rows() == 2);
  CHECK(e.cols() == 6);
  CHECK(max_abs_diff(e.middleCols(2, 2), Mat::Identity(2, 2)) == 0.0);
  CHECK(e.leftCols(2).norm() == 0.0);
  CHECK_THROWS_AS(slot_selector(2, 3, 0), DimensionError);
  CHECK_THROWS_AS(slot_selector(2, 3, 4), DimensionError);
}

TEST_CASE("state-space plants with zero delays keep their matrices") {
  StateSpace ss;
  ss.A = from_rows({{-1.0, 0.3}, {0.0, -2.0}});
  ss.B = from_rows({{1.0, 0.0}, {0.5, 1.0}});
  ss.C = from_rows({{1.0, 1.0}});
  ss.D = from_rows({{0.0, 0.2}});
  ss.G = Mat::Identity(2, 2);
  const DelayRealization r = realize_delays(ss, {0.0, 0.0}, 0.5);
  CHECK(r.mbar == 0);
  CHECK(max_abs_diff(r.A, ss.A) == 0.0);
  CHECK(max_abs_diff(r.B1c, ss.B) == 0.0);
  CHECK(max_abs_diff(r.Do, ss.D) == 0.0);
  CHECK(norm_inf(r.B2bar()) == 0.0);
  REQUIRE(r.G.has_value());
  CHECK(max_abs_diff(*r.G, *ss.G) == 0.0);
}

TEST_CASE("state-space plants with distinct delays replicate the plant per input") {
  StateSpace ss;
  ss.A = from_rows({{-1.0, 0.3}, {0.0, -2.0}});
  ss.B = from_rows({{1.0, 0.0}, {0.5, 1.0}});
  ss.C = from_rows({{1.0, 1.0}});
  ss.D = from_rows({{0.1, 0.2}});
  ss.G = Mat::Identity(2, 2);
  const DelayRealization r = realize_delays(ss, {0.3, 1.0}, 1.0);
  CHECK(r.mbar == 1);
  CHECK(r.nx() == 4);
  const auto p = oracle::from_state_space(ss.A, ss.B, ss.C, ss.D, {0.3, 1.0}, 1.0);
  CHECK(max_abs_diff(r.A, p.A) == 0.0);
  CHECK(max_abs_diff(r.C, p.C) == 0.0);
  REQUIRE(r.G.has_value());
  CHECK(r.G->rows() == 4);
  CHECK(max_abs_diff(r.G->topRows(2), *ss.G) == 0.0);
  CHECK(r.G->bottomRows(2).norm() == 0.0);
  CHECK_THROWS_AS(realize_delays(ss, {0.3}, 1.0), ModelError);
}

TEST_CASE("transfer model validation") {
  TransferModel tm = fixtures::process_transfer();
  tm.channels.push_back(tm.channels.front());
  CHECK_THROWS_AS(realize_delays(tm, 1.0), ModelError);
  tm = fixtures::process_transfer();
  tm.channels[0].i = 5;
  CHECK_THROWS_AS(realize_delays(tm, 1.0), ModelError);
}

TEST_CASE("StateSpace::validate catches inconsistent shapes") {
  StateSpace ss = fixtures::scalar_plant();
  CHECK_NOTHROW(ss.validate());
  ss.D = Mat::Zero(2, 1);
  CHECK_THROWS_AS(ss.validate(), ModelError);
  ss = fixtures::scalar_plant();
  ss.A(0, 0) = std::nan("");
  CHECK_THROWS_AS(ss.validate(), ModelError);
}

TEST_CASE("CostSpec validation and held references") {
  CostSpec c = fixtures::process_cost();
  CHECK_NOTHROW(c.validate(2));
  CHECK(c.reference(0, 2)(0) == 1.0);
  CHECK(c.reference(15, 2)(0) == 1.0);
  CostSpec empty = c;
  empty.zbar.clear();
  CHECK(empty.reference(3, 2).norm() == 0.0);

  c.mu = -0.1;
  CHECK_THROWS_AS(c.validate(2), CostError);
  c = fixtures::process_cost();
  c.Ts = 0.0;
  CHECK_THROWS_AS(c.validate(2), CostError);
  c = fixtures::process_cost();
  c.Qc = from_rows({{1.0, 2.0}, {2.0, 1.0}});
  CHECK_THROWS_AS(c.validate(2), CostError);
  c = fixtures::process_cost();
  c.zbar = {Vec::Ones(3)};
  CHECK_THROWS_AS(c.validate(2), CostError);
}
