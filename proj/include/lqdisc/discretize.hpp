#pragma once

// One-call discretization: plant + cost -> full discrete LQ problem.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lqdisc/exactdefs.hpp"
#include "lqdisc/fixedstep.hpp"
#include "lqdisc/lqassemble.hpp"
#include "lqdisc/model.hpp"

namespace lqdisc {

enum class Method { fixed, doubling, expm };

std::string to_string(Method m);
/// Throws ParameterError for names other than fixed, doubling, expm.
Method method_from_string(const std::string& name);

/// Either a delay-free plant or a realized delayed plant, plus its cost.
struct Problem {
  std::variant<StateSpace, DelayRealization> plant;
  CostSpec cost;

  bool delayed() const { return std::holds_alternative<DelayRealization>(plant); }
  Eigen::Index nz() const;
  /// C matrix of the (realized) plant state.
  const Mat& output_matrix() const;
  DeqSystem deq() const;
};

struct DiscretizeOptions {
  Method method = Method::expm;
  ButcherTableau tableau = tableau_by_name("rk4");
  int steps = 1024;    ///< fixed
  int doublings = 10;  ///< doubling, N = 2^doublings
};

struct Provenance {
  Method method = Method::expm;
  std::string scheme;  ///< empty for expm
  long long N = 0;     ///< 0 for expm
};

struct DiscreteLQ {
  DiscreteCore core;
  AugmentedSystem augmented;
  std::vector<StageCost> stages;
  Provenance provenance;
};

/// Core matrices only, for a prepared system.
DiscreteCore discretize_core(const DeqSystem& sys, const DiscretizeOptions& opts);

DiscreteLQ discretize(const Problem& problem, const DiscretizeOptions& opts);

}  // namespace lqdisc
