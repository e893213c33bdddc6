#pragma once

#include "lqdisc/discretize.hpp"

namespace fixtures {

using namespace lqdisc;

/// 2x2 delayed process used for the accuracy and timing checks.
inline TransferModel process_transfer() {
  TransferModel tm;
  tm.nz = 2;
  tm.nu = 2;
  tm.channels = {
      {0, 0, {1.0}, {4.5, 4.5, 1.0}, 0.1},
      {0, 1, {-4.0, -2.0}, {3.4, 1.0}, 1.6},
      {1, 0, {-0.5}, {2.3, 1.0}, 2.0},
      {1, 1, {2.4}, {1.53, 2.6, 1.0}, 0.9},
  };
  return tm;
}

inline CostSpec process_cost() {
  CostSpec c;
  c.Qc = from_rows({{1.0, 0.0}, {0.0, 2.0}});
  c.mu = 0.2;
  c.Ts = 1.0;
  c.N = 20;
  c.zbar = {(Vec(2) << 1.0, 0.0).finished()};
  return c;
}

inline Problem process_problem() {
  const CostSpec c = process_cost();
  return Problem{realize_delays(process_transfer(), c.Ts), c};
}

/// x' = a x + u + g w, z = x.
inline StateSpace scalar_plant(double a = -1.0, bool noise = true) {
  StateSpace ss;
  ss.A = Mat::Constant(1, 1, a);
  ss.B = Mat::Constant(1, 1, 1.0);
  ss.C = Mat::Constant(1, 1, 1.0);
  ss.D = Mat::Zero(1, 1);
  if (noise) ss.G = Mat::Constant(1, 1, 1.0);
  return ss;
}

inline CostSpec scalar_cost(double mu = 0.0, double Ts = 1.0) {
  CostSpec c;
  c.Qc = Mat::Identity(1, 1);
  c.mu = mu;
  c.Ts = Ts;
  c.N = 4;
  c.zbar = {Vec::Ones(1)};
  return c;
}

}  // namespace fixtures
