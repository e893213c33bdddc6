#pragma once

// Convergence and timing studies over methods, schemes and step counts.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "lqdisc/discretize.hpp"

namespace lqdisc {

/// e(i) = ||i_ref - i||_inf for i in {A, B_o, M, Q}.
struct CoreErrors {
  double A = 0.0;
  double Bo = 0.0;
  double M = 0.0;
  double Q = 0.0;

  double max() const;
};

CoreErrors core_errors(const DiscreteCore& reference, const DiscreteCore& candidate);

struct ErrorRow {
  Method method = Method::fixed;
  std::string scheme;
  long long N = 0;
  CoreErrors err;
};

struct StudyConfig {
  std::vector<Method> methods{Method::fixed, Method::doubling};
  std::vector<ButcherTableau> schemes;
  int jmin = 4;
  int jmax = 10;
  int reps = 9;
  std::string reference_id = "expm";
};

/// Errors of every (method, scheme, N = 2^j) grid point against the
/// reference. Grid points run on the work pool; rows come back in config order.
std::vector<ErrorRow> convergence_study(const DeqSystem& sys, const StudyConfig& cfg,
                                        const DiscreteCore& reference);

/// Least-squares slope of -log2(error) against log2(N) over the points whose
/// error exceeds floor. NaN if fewer than two points qualify.
double fit_order(const std::vector<long long>& Ns, const std::vector<double>& errors,
                 double floor);

struct OrderFit {
  Method method = Method::fixed;
  std::string scheme;
  std::string quantity;  ///< A, B_o, M or Q
  double order = 0.0;
  int points = 0;
};

/// Errors at or below this are treated as round-off when fitting orders.
inline constexpr double kOrderFitFloor = 1e-12;

std::vector<OrderFit> fit_orders(const std::vector<ErrorRow>& rows, double floor = kOrderFitFloor);

struct BenchRow {
  Method method = Method::expm;
  std::string scheme;
  long long N = 0;
  double median_ms = 0.0;        ///< whole method call
  double coefficient_ms = 0.0;   ///< median of coefficient precomputation alone
  CoreErrors err;
};

/// Median wall times over cfg.reps repetitions, run sequentially. N = 2^jmax
/// for fixed and doubling; expm rows carry N = 0.
std::vector<BenchRow> bench_study(const DeqSystem& sys, const StudyConfig& cfg,
                                  const DiscreteCore& reference);

double median(std::vector<double> xs);

void write_convergence_csv(std::ostream& out, const std::vector<ErrorRow>& rows,
                           const std::string& reference_id);
void write_orders_csv(std::ostream& out, const std::vector<OrderFit>& fits,
                      const std::string& reference_id);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows,
                     const std::string& reference_id);

/// Worker count from LQDISC_THREADS (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs task(i) for i in [0, count) on up to worker_count() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// Random Hurwitz state-space plant: A = R - (||R||_inf + margin) I with R
/// uniform in [-1, 1], so every eigenvalue has real part <= -margin.
StateSpace random_stable_plant(std::mt19937_64& rng, int nx, int nu, int nz, bool with_noise,
                               double margin = 0.1);

enum class DelayKind { none, fractional, integer };

std::string to_string(DelayKind kind);

/// Raw draw behind random_problem: the undelayed plant and its per-input delays.
struct RandomCase {
  StateSpace plant;
  std::vector<double> delays;  ///< empty for DelayKind::none
  CostSpec cost;
  DelayKind kind = DelayKind::none;

  Problem problem() const;
};

/// Seeded random draw for property sweeps: n_x <= 4, n_u <= 2, n_z <= 2,
/// mu from {0, 0.2, 1}, delay kind cycling with the index.
RandomCase random_case(std::mt19937_64& rng, int index);
Problem random_problem(std::mt19937_64& rng, int index);

struct ValidationCase {
  int index = 0;
  Eigen::Index nx = 0, nu = 0, nz = 0;
  double mu = 0.0;
  DelayKind delays = DelayKind::none;
  double pairwise = 0.0;  ///< max over method pairs of the max core error
  double oracle = 0.0;    ///< max over methods of the error against Simpson
};

inline constexpr double kValidatePairwiseTol = 1e-9;
inline constexpr double kValidateOracleTol = 1e-8;

/// Runs fixed (rk4, N = 1024), doubling (rk4, j = 10) and expm on count random
/// problems drawn from one generator seeded with seed, and compares against
/// the Simpson oracle with oracle_panels panels.
std::vector<ValidationCase> validate_random(std::uint64_t seed, int count,
                                            int oracle_panels = 4096);

void write_validation_csv(std::ostream& out, const std::vector<ValidationCase>& cases,
                          std::uint64_t seed);

}  // namespace lqdisc
