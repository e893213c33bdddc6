#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lqdisc/io.hpp"
#include "lqdisc/study.hpp"
#include "lqdisc/vanloan.hpp"

namespace fs = std::filesystem;
using namespace lqdisc;

namespace {

enum Exit : int { ok = 0, failure = 1, schema = 2, singular = 3, reference = 4 };

struct ReferenceFailure : Error {
  using Error::Error;
};

ButcherTableau resolve_scheme(const std::string& spec) {
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") return load_tableau(spec);
  return tableau_by_name(spec);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw Error("cannot write " + (dir / name).string());
  return f;
}

DiscreteCore reference_core(const DeqSystem& sys) {
  try {
    DiscreteCore ref = discretize_expm(sys);
    if (!all_finite(ref.A) || !all_finite(ref.Bo) || !all_finite(ref.Q) || !all_finite(ref.M))
      throw ReferenceFailure("expm reference is not finite");
    return ref;
  } catch (const ReferenceFailure&) {
    throw;
  } catch (const Error& e) {
    throw ReferenceFailure(std::string("expm reference failed: ") + e.what());
  }
}

void print_errors(const char* label, const CoreErrors& e) {
  std::printf("%s e(A)=%.3e e(B_o)=%.3e e(M)=%.3e e(Q)=%.3e\n", label, e.A, e.Bo, e.M, e.Q);
}

struct Common {
  std::string model;
  std::string out = ".";
};

struct DiscretizeArgs : Common {
  std::string method = "expm";
  std::string scheme = "rk4";
  int steps = 1024;
  int doublings = 10;
  bool verify = false;
};

int cmd_discretize(const DiscretizeArgs& a) {
  const Problem problem = load_problem(a.model);
  DiscretizeOptions opts;
  opts.method = method_from_string(a.method);
  opts.tableau = resolve_scheme(a.scheme);
  opts.steps = a.steps;
  opts.doublings = a.doublings;
  const DiscreteLQ result = discretize(problem, opts);

  auto json = open_out(a.out, "result.json");
  json << result_to_json(result, problem).dump(2) << "\n";
  auto csv = open_out(a.out, "stages.csv");
  write_stage_csv(csv, result.stages);
  std::printf("wrote %s and %s\n", (fs::path(a.out) / "result.json").c_str(),
              (fs::path(a.out) / "stages.csv").c_str());

  if (a.verify) {
    const DiscreteCore ref = reference_core(problem.deq());
    print_errors("verify vs expm:", core_errors(ref, result.core));
  }
  return ok;
}

struct StudyArgs : Common {
  std::vector<std::string> methods;
  std::vector<std::string> schemes{"rk4"};
  int jmin = 4;
  int jmax = 10;
  int reps = 9;
};

StudyConfig make_config(const StudyArgs& a) {
  StudyConfig cfg;
  cfg.methods.clear();
  for (const auto& m : a.methods) cfg.methods.push_back(method_from_string(m));
  for (const auto& s : a.schemes) cfg.schemes.push_back(resolve_scheme(s));
  cfg.jmin = a.jmin;
  cfg.jmax = a.jmax;
  cfg.reps = a.reps;
  if (cfg.jmin < 0 || cfg.jmax > 30 || cfg.jmin > cfg.jmax)
    throw ParameterError("need 0 <= jmin <= jmax <= 30");
  if (cfg.reps < 1) throw ParameterError("--reps must be at least 1");
  return cfg;
}

int cmd_convergence(const StudyArgs& a) {
  const Problem problem = load_problem(a.model);
  const DeqSystem sys = problem.deq();
  const StudyConfig cfg = make_config(a);
  const DiscreteCore ref = reference_core(sys);

  const auto rows = convergence_study(sys, cfg, ref);
  const auto fits = fit_orders(rows);

  auto csv = open_out(a.out, "convergence.csv");
  write_convergence_csv(csv, rows, cfg.reference_id);
  auto orders = open_out(a.out, "orders.csv");
  write_orders_csv(orders, fits, cfg.reference_id);

  constexpr int kSecondaryPanels = 1 << 16;
  const TargetSet simpson = oracle_quadrature(sys, sys.Ts, kSecondaryPanels);
  const CoreErrors gap =
      core_errors(ref, DiscreteCore{simpson.A, simpson.Bo, simpson.Q, simpson.M, std::nullopt});
  Json meta = {{"model", a.model},
               {"reference", cfg.reference_id},
               {"secondary_reference", "simpson-" + std::to_string(kSecondaryPanels)},
               {"reference_gap", {{"A", gap.A}, {"B_o", gap.Bo}, {"M", gap.M}, {"Q", gap.Q}}},
               {"order_fit_floor", kOrderFitFloor},
               {"jmin", cfg.jmin},
               {"jmax", cfg.jmax}};
  auto mf = open_out(a.out, "convergence_meta.json");
  mf << meta.dump(2) << "\n";

  for (const auto& f : fits) {
    std::printf("%-8s %-22s %-4s order %6.3f (%d points)\n", to_string(f.method).c_str(),
                f.scheme.c_str(), f.quantity.c_str(), f.order, f.points);
  }
  return ok;
}

int cmd_bench(const StudyArgs& a) {
  const Problem problem = load_problem(a.model);
  const DeqSystem sys = problem.deq();
  StudyConfig cfg = make_config(a);
  cfg.jmin = cfg.jmax;
  const DiscreteCore ref = reference_core(sys);

  const auto rows = bench_study(sys, cfg, ref);
  auto csv = open_out(a.out, "bench.csv");
  write_bench_csv(csv, rows, cfg.reference_id);
  for (const auto& r : rows) {
    std::printf("%-8s %-22s N=%-6lld median %9.3f ms  coeff %9.3f ms  max err %.3e\n",
                to_string(r.method).c_str(), r.scheme.c_str(), r.N, r.median_ms,
                r.coefficient_ms, r.err.max());
  }
  return ok;
}

struct ValidateArgs {
  std::uint64_t seed = 1;
  int count = 50;
  std::string out = ".";
};

int cmd_validate(const ValidateArgs& a) {
  const auto cases = validate_random(a.seed, a.count);
  auto csv = open_out(a.out, "validate.csv");
  write_validation_csv(csv, cases, a.seed);
  int failed = 0;
  double worst_pair = 0.0, worst_oracle = 0.0;
  for (const auto& c : cases) {
    worst_pair = std::max(worst_pair, c.pairwise);
    worst_oracle = std::max(worst_oracle, c.oracle);
    if (c.pairwise > kValidatePairwiseTol || c.oracle > kValidateOracleTol) ++failed;
  }
  std::printf("%d/%d cases pass; worst pairwise %.3e, worst vs simpson %.3e\n",
              a.count - failed, a.count, worst_pair, worst_oracle);
  return failed == 0 ? ok : failure;
}

void add_study_options(CLI::App* sub, StudyArgs& a, std::vector<std::string> default_methods) {
  a.methods = std::move(default_methods);
  sub->add_option("--model", a.model, "model JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--method", a.methods, "comma-separated methods")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--scheme", a.schemes, "comma-separated scheme names or tableau JSON files")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--out", a.out, "output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact discretization of discounted LQ problems with input delays"};
  app.require_subcommand(1);

  DiscretizeArgs da;
  auto* disc = app.add_subcommand("discretize", "discretize one model");
  disc->add_option("--model", da.model, "model JSON file")->required()->check(CLI::ExistingFile);
  disc->add_option("--method", da.method, "fixed | doubling | expm")
      ->check(CLI::IsMember({"fixed", "doubling", "expm"}))
      ->capture_default_str();
  disc->add_option("--scheme", da.scheme, "scheme name or tableau JSON file")
      ->capture_default_str();
  disc->add_option("--steps", da.steps, "steps for the fixed method")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  disc->add_option("--doublings", da.doublings, "j for the doubling method, N = 2^j")
      ->check(CLI::Range(0, 30))
      ->capture_default_str();
  disc->add_option("--out", da.out, "output directory")->capture_default_str();
  disc->add_flag("--verify", da.verify, "report errors against the expm method");

  StudyArgs ca;
  auto* conv = app.add_subcommand("convergence", "error against expm over N = 2^jmin .. 2^jmax");
  add_study_options(conv, ca, {"fixed", "doubling"});
  conv->add_option("--jmin", ca.jmin)->capture_default_str();
  conv->add_option("--jmax", ca.jmax)->capture_default_str();

  StudyArgs ba;
  auto* bench = app.add_subcommand("bench", "median wall time of each method");
  add_study_options(bench, ba, {"expm", "fixed", "doubling"});
  bench->add_option("--doublings", ba.jmax, "N = 2^j for fixed and doubling")
      ->check(CLI::Range(0, 30))
      ->capture_default_str();
  bench->add_option("--reps", ba.reps, "timing repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "cross-check the methods on random stable systems");
  val->add_option("--seed", va.seed)->capture_default_str();
  val->add_option("--count", va.count)->check(CLI::PositiveNumber)->capture_default_str();
  val->add_option("--out", va.out, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*disc) return cmd_discretize(da);
    if (*conv) return cmd_convergence(ca);
    if (*bench) return cmd_bench(ba);
    if (*val) return cmd_validate(va);
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return schema;
  } catch (const SingularityError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return singular;
  } catch (const ReferenceFailure& e) {
    std::fprintf(stderr, "reference failure: %s\n", e.what());
    return reference;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return failure;
  }
  return failure;
}
