#include "lqdisc/discretize.hpp"

#include "lqdisc/stepdouble.hpp"
#include "lqdisc/vanloan.hpp"

namespace lqdisc {

std::string to_string(Method m) {
  switch (m) {
    case Method::fixed: return "fixed";
    case Method::doubling: return "doubling";
    case Method::expm: return "expm";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "fixed") return Method::fixed;
  if (name == "doubling") return Method::doubling;
  if (name == "expm") return Method::expm;
  throw ParameterError("unknown method '" + name + "' (expected fixed, doubling or expm)");
}

Eigen::Index Problem::nz() const {
  return std::visit([](const auto& p) { return p.C.rows(); }, plant);
}

const Mat& Problem::output_matrix() const {
  return std::visit([](const auto& p) -> const Mat& { return p.C; }, plant);
}

DeqSystem Problem::deq() const {
  return std::visit([this](const auto& p) { return build_deq(p, cost); }, plant);
}

DiscreteCore discretize_core(const DeqSystem& sys, const DiscretizeOptions& opts) {
  switch (opts.method) {
    case Method::fixed:
      return discretize_fixed_step(sys, opts.tableau, opts.steps);
    case Method::doubling:
      return discretize_step_doubling(sys, opts.tableau, opts.doublings).core;
    case Method::expm:
      return discretize_expm(sys);
  }
  throw ParameterError("unhandled method");
}

DiscreteLQ discretize(const Problem& problem, const DiscretizeOptions& opts) {
  const DeqSystem sys = problem.deq();
  DiscreteLQ out;
  out.core = discretize_core(sys, opts);
  out.augmented =
      std::visit([&](const auto& p) { return assemble_augmented(out.core, p); }, problem.plant);
  out.stages = stage_costs(out.core.Q, out.core.M, problem.cost);
  out.provenance.method = opts.method;
  if (opts.method != Method::expm) out.provenance.scheme = opts.tableau.name;
  if (opts.method == Method::fixed) out.provenance.N = opts.steps;
  if (opts.method == Method::doubling) out.provenance.N = 1LL << opts.doublings;
  return out;
}

}  // namespace lqdisc
