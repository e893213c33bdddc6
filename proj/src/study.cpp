#include "lqdisc/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "lqdisc/io.hpp"
#include "lqdisc/stepdouble.hpp"
#include "lqdisc/vanloan.hpp"

namespace lqdisc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

DiscreteCore run(const DeqSystem& sys, Method m, const ButcherTableau& t, int j) {
  DiscretizeOptions opts;
  opts.method = m;
  opts.tableau = t;
  opts.steps = 1 << j;
  opts.doublings = j;
  return discretize_core(sys, opts);
}

}  // namespace

double CoreErrors::max() const { return std::max({A, Bo, M, Q}); }

CoreErrors core_errors(const DiscreteCore& ref, const DiscreteCore& c) {
  return {max_abs_diff(ref.A, c.A), max_abs_diff(ref.Bo, c.Bo), max_abs_diff(ref.M, c.M),
          max_abs_diff(ref.Q, c.Q)};
}

unsigned worker_count() {
  if (const char* env = std::getenv("LQDISC_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  const auto workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ErrorRow> convergence_study(const DeqSystem& sys, const StudyConfig& cfg,
                                        const DiscreteCore& reference) {
  std::vector<ErrorRow> rows;
  for (Method m : cfg.methods) {
    if (m == Method::expm) continue;
    for (const auto& t : cfg.schemes) {
      for (int j = cfg.jmin; j <= cfg.jmax; ++j) {
        ErrorRow r;
        r.method = m;
        r.scheme = t.name;
        r.N = 1LL << j;
        rows.push_back(r);
      }
    }
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    auto& r = rows[i];
    const auto it = std::find_if(cfg.schemes.begin(), cfg.schemes.end(),
                                 [&](const ButcherTableau& t) { return t.name == r.scheme; });
    const int j = static_cast<int>(std::log2(static_cast<double>(r.N)));
    r.err = core_errors(reference, run(sys, r.method, *it, j));
  });
  return rows;
}

double fit_order(const std::vector<long long>& Ns, const std::vector<double>& errors,
                 double floor) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (errors[i] > floor && std::isfinite(errors[i])) {
      xs.push_back(std::log2(static_cast<double>(Ns[i])));
      ys.push_back(-std::log2(errors[i]));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / sxx;
}

std::vector<OrderFit> fit_orders(const std::vector<ErrorRow>& rows, double floor) {
  std::vector<OrderFit> fits;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t end = i;
    while (end < rows.size() && rows[end].method == rows[i].method &&
           rows[end].scheme == rows[i].scheme) {
      ++end;
    }
    std::vector<long long> Ns;
    std::vector<double> eA, eB, eM, eQ;
    for (std::size_t k = i; k < end; ++k) {
      Ns.push_back(rows[k].N);
      eA.push_back(rows[k].err.A);
      eB.push_back(rows[k].err.Bo);
      eM.push_back(rows[k].err.M);
      eQ.push_back(rows[k].err.Q);
    }
    const std::pair<const char*, const std::vector<double>*> quantities[] = {
        {"A", &eA}, {"B_o", &eB}, {"M", &eM}, {"Q", &eQ}};
    for (const auto& [name, errs] : quantities) {
      OrderFit f;
      f.method = rows[i].method;
      f.scheme = rows[i].scheme;
      f.quantity = name;
      f.order = fit_order(Ns, *errs, floor);
      f.points = static_cast<int>(std::count_if(errs->begin(), errs->end(),
                                                [&](double e) { return e > floor; }));
      fits.push_back(f);
    }
    i = end;
  }
  return fits;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::vector<BenchRow> bench_study(const DeqSystem& sys, const StudyConfig& cfg,
                                  const DiscreteCore& reference) {
  const int reps = std::max(1, cfg.reps);
  std::vector<BenchRow> rows;
  for (Method m : cfg.methods) {
    if (m == Method::expm) {
      BenchRow row;
      row.method = m;
      std::vector<double> times;
      DiscreteCore last;
      for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        last = discretize_expm(sys);
        times.push_back(ms_since(t0));
      }
      row.median_ms = median(times);
      row.err = core_errors(reference, last);
      rows.push_back(row);
      continue;
    }
    for (const auto& t : cfg.schemes) {
      BenchRow row;
      row.method = m;
      row.scheme = t.name;
      row.N = 1LL << cfg.jmax;
      std::vector<double> times, coeff_times;
      DiscreteCore last;
      for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        const CoefficientSet cs = build_coefficients(sys, t, static_cast<int>(row.N));
        coeff_times.push_back(ms_since(t0));
        last = m == Method::fixed ? integrate(cs, sys) : discretize_step_doubling(cs, sys).core;
        times.push_back(ms_since(t0));
      }
      row.median_ms = median(times);
      row.coefficient_ms = median(coeff_times);
      row.err = core_errors(reference, last);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ErrorRow>& rows,
                           const std::string& reference_id) {
  CsvWriter csv(out);
  csv.row({"method", "scheme", "N", "e_A", "e_Bo", "e_M", "e_Q", "reference"});
  for (const auto& r : rows) {
    csv.row({to_string(r.method), r.scheme, std::to_string(r.N), format_double(r.err.A),
             format_double(r.err.Bo), format_double(r.err.M), format_double(r.err.Q),
             reference_id});
  }
}

void write_orders_csv(std::ostream& out, const std::vector<OrderFit>& fits,
                      const std::string& reference_id) {
  CsvWriter csv(out);
  csv.row({"method", "scheme", "quantity", "fitted_order", "points", "reference"});
  for (const auto& f : fits) {
    csv.row({to_string(f.method), f.scheme, f.quantity, format_double(f.order),
             std::to_string(f.points), reference_id});
  }
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows,
                     const std::string& reference_id) {
  CsvWriter csv(out);
  csv.row({"method", "scheme", "N", "median_ms_machine_dependent", "coefficient_ms_machine_dependent",
           "e_A", "e_Bo", "e_M", "e_Q", "reference"});
  for (const auto& r : rows) {
    csv.row({to_string(r.method), r.scheme, std::to_string(r.N), format_double(r.median_ms),
             format_double(r.coefficient_ms), format_double(r.err.A), format_double(r.err.Bo),
             format_double(r.err.M), format_double(r.err.Q), reference_id});
  }
}

StateSpace random_stable_plant(std::mt19937_64& rng, int nx, int nu, int nz, bool with_noise,
                               double margin) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
  };
  StateSpace ss;
  const Mat r = fill(nx, nx);
  ss.A = r - (norm_inf(r) + margin) * Mat::Identity(nx, nx);
  ss.B = fill(nx, nu);
  ss.C = fill(nz, nx);
  ss.D = fill(nz, nu);
  if (with_noise) ss.G = fill(nx, nx);
  return ss;
}

std::string to_string(DelayKind kind) {
  switch (kind) {
    case DelayKind::none: return "none";
    case DelayKind::fractional: return "fractional";
    case DelayKind::integer: return "integer";
  }
  return "unknown";
}

RandomCase random_case(std::mt19937_64& rng, int index) {
  std::uniform_int_distribution<int> nx_dist(1, 4), n2_dist(1, 2), mu_dist(0, 2), int_delay(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
  const double mus[] = {0.0, 0.2, 1.0};

  const int nx = nx_dist(rng), nu = n2_dist(rng), nz = n2_dist(rng);
  RandomCase rc;
  rc.plant = random_stable_plant(rng, nx, nu, nz, true);
  rc.kind = static_cast<DelayKind>(index % 3);

  CostSpec& cost = rc.cost;
  cost.mu = mus[mu_dist(rng)];
  cost.Ts = 0.5 + unit(rng);
  cost.N = 3;
  Mat w(nz, nz);
  for (Eigen::Index i = 0; i < nz; ++i)
    for (Eigen::Index j = 0; j < nz; ++j) w(i, j) = sym(rng);
  cost.Qc = w * w.transpose() + 0.1 * Mat::Identity(nz, nz);
  Vec zbar(nz);
  for (Eigen::Index i = 0; i < nz; ++i) zbar(i) = sym(rng);
  cost.zbar.push_back(zbar);

  if (rc.kind == DelayKind::none) return rc;

  rc.delays.resize(static_cast<std::size_t>(nu));
  for (auto& tau : rc.delays) {
    if (rc.kind == DelayKind::integer) {
      tau = int_delay(rng) * cost.Ts;
    } else {
      // keep the fractional part away from integer multiples of Ts
      tau = (std::floor(2.0 * unit(rng)) + 0.1 + 0.8 * unit(rng)) * cost.Ts;
    }
  }
  return rc;
}

Problem RandomCase::problem() const {
  if (kind == DelayKind::none) return Problem{plant, cost};
  return Problem{realize_delays(plant, delays, cost.Ts), cost};
}

Problem random_problem(std::mt19937_64& rng, int index) { return random_case(rng, index).problem(); }

std::vector<ValidationCase> validate_random(std::uint64_t seed, int count, int oracle_panels) {
  std::mt19937_64 rng(seed);
  std::vector<Problem> problems;
  for (int i = 0; i < count; ++i) problems.push_back(random_problem(rng, i));

  const ButcherTableau rk4 = tableau_by_name("rk4");
  std::vector<ValidationCase> cases(problems.size());
  parallel_for(problems.size(), [&](std::size_t i) {
    const DeqSystem sys = problems[i].deq();
    const DiscreteCore fixed = discretize_fixed_step(sys, rk4, 1024);
    const DiscreteCore doubling = discretize_step_doubling(sys, rk4, 10).core;
    const DiscreteCore exact = discretize_expm(sys);
    const TargetSet oracle = oracle_quadrature(sys, sys.Ts, oracle_panels);
    DiscreteCore oracle_core{oracle.A, oracle.Bo, oracle.Q, oracle.M, std::nullopt};

    ValidationCase& c = cases[i];
    c.index = static_cast<int>(i);
    c.nx = sys.nx;
    c.nu = sys.nu;
    c.nz = sys.nz;
    c.mu = sys.mu;
    c.delays = static_cast<DelayKind>(i % 3);
    c.pairwise = std::max({core_errors(fixed, doubling).max(), core_errors(fixed, exact).max(),
                           core_errors(doubling, exact).max()});
    c.oracle = std::max({core_errors(oracle_core, fixed).max(),
                         core_errors(oracle_core, doubling).max(),
                         core_errors(oracle_core, exact).max()});
  });
  return cases;
}

void write_validation_csv(std::ostream& out, const std::vector<ValidationCase>& cases,
                          std::uint64_t seed) {
  CsvWriter csv(out);
  csv.row({"seed", "index", "nx", "nu", "nz", "mu", "delays", "max_pairwise", "max_vs_simpson",
           "pass"});
  for (const auto& c : cases) {
    const bool pass = c.pairwise <= kValidatePairwiseTol && c.oracle <= kValidateOracleTol;
    csv.row({std::to_string(seed), std::to_string(c.index), std::to_string(c.nx),
             std::to_string(c.nu), std::to_string(c.nz), format_double(c.mu),
             to_string(c.delays), format_double(c.pairwise), format_double(c.oracle),
             pass ? "true" : "false"});
  }
}

}  // namespace lqdisc
