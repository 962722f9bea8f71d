#include "relaybc/validate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "relaybc/allocator.hpp"
#include "relaybc/linmap.hpp"
#include "relaybc/oracle.hpp"

namespace relaybc {

namespace {

struct Draw {
  NetworkConfig cfg;
  ChannelState chan;
  Allocation alloc;
};

NetworkConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  NetworkConfig cfg = NetworkConfig::reference();
  cfg.coord_r = {5.0 + 60.0 * u01(rng), 5.0 + 60.0 * u01(rng)};
  cfg.coord_d = {40.0 + 60.0 * u01(rng), 25.0 * u01(rng)};
  cfg.alpha1 = 2.0 + 2.0 * u01(rng);
  cfg.alpha2 = 2.0 + 1.5 * u01(rng);
  cfg.alpha3 = 2.0 + 1.5 * u01(rng);
  cfg.L = 10 + static_cast<int>(u01(rng) * 30);
  // Keep the circuit affordable in every drawn geometry.
  const ChannelState chan = channel_gains(cfg);
  cfg.Pc = std::min(cfg.Pc, 0.3 * cfg.eta * cfg.Pmax * chan.g_sr);
  return cfg;
}

// A draw satisfying the allocation invariants plus C7-1.
Draw random_feasible_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Draw d;
  d.cfg = random_config(rng);
  d.chan = channel_gains(d.cfg);
  d.alloc.M = 1 + static_cast<int>(u01(rng) * (d.cfg.L - 1));
  d.alloc.N = d.cfg.L - d.alloc.M;
  const double p0_min = d.cfg.Pc / (d.cfg.eta * d.chan.g_sr);
  d.alloc.P0 = std::min(d.cfg.Pmax,
                        p0_min + (d.cfg.Pmax - p0_min) * u01(rng));
  d.alloc.P1 = d.cfg.Pmax * u01(rng);
  d.alloc.beta = optimal_beta(d.alloc.P0, d.chan, d.cfg) * u01(rng);
  d.alloc.eigenvalues = optimal_eigenvalues(d.alloc.M, d.alloc.N);
  return d;
}

SuiteResult feasibility_constant_suite(std::uint64_t seed) {
  SuiteResult res{"core: log arguments stay >= 1 under the circuit constraint",
                  true, ""};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 1000; ++i) {
    const Draw d = random_feasible_draw(rng);
    const FeasibilityConstants fc = feasibility_constants(d.chan, d.cfg);
    const double arg_sr =
        fc.A + d.alloc.P0 * d.chan.g_sr * d.chan.g_sr / d.chan.noise_bw;
    const double arg_sd =
        fc.B + d.alloc.P0 * d.chan.g_sr * d.chan.g_sd / d.chan.noise_bw;
    if (arg_sr < 1.0 - 1e-9 || arg_sd < 1.0 - 1e-9) {
      res.pass = false;
      res.detail = "argument fell below 1";
      break;
    }
  }
  return res;
}

SuiteResult constraint_cross_check_suite(std::uint64_t seed) {
  SuiteResult res{"core: constraint checker matches direct re-evaluation",
                  true, ""};
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    Draw d = random_feasible_draw(rng);
    if (i % 3 == 0) d.alloc.P0 = d.cfg.Pmax * (1.0 + u01(rng));  // break C6
    if (i % 5 == 0) d.alloc.beta = 1.0 + u01(rng);               // break C7
    const auto viols = check_constraints(d.alloc, d.chan, d.cfg);

    const double used = (double(d.alloc.M) * d.alloc.P0 +
                         double(d.alloc.N) * d.alloc.P1) /
                        d.cfg.L;
    const bool c1 = used <= d.cfg.P * (1.0 + 1e-9);
    const bool c2 = harvested_energy(d.alloc, d.chan, d.cfg) >=
                    double(d.alloc.M) / d.cfg.L * d.cfg.Ts * d.cfg.Pc -
                        1e-12;
    double sum = 0.0;
    for (double v : d.alloc.eigenvalues) sum += v;
    const bool c5 = d.alloc.M == 0 || d.alloc.N == 0 ||
                    std::abs(sum - d.alloc.N) <= 1e-9 * d.alloc.N;
    const bool c6 = d.alloc.P0 >= 0 && d.alloc.P1 >= 0 &&
                    d.alloc.P0 <= d.cfg.Pmax * (1 + 1e-9) &&
                    d.alloc.P1 <= d.cfg.Pmax * (1 + 1e-9);
    const bool c7 = d.alloc.beta >= -1e-12 && d.alloc.beta <= 1.0 + 1e-12;
    const bool expect_empty = c1 && c2 && c5 && c6 && c7;
    if (viols.empty() != expect_empty) {
      res.pass = false;
      std::ostringstream os;
      os << "mismatch at draw " << i;
      res.detail = os.str();
      break;
    }
  }
  return res;
}

SuiteResult logdet_equivalence_suite(std::uint64_t seed) {
  SuiteResult res{"linmap: determinant rate matches the closed form", true,
                  ""};
  std::mt19937_64 rng(seed + 2);
  std::uniform_int_distribution<int> mn(1, 8);
  for (int i = 0; i < 50; ++i) {
    Draw d = random_feasible_draw(rng);
    d.alloc.M = mn(rng);
    d.alloc.N = mn(rng);
    d.cfg.L = d.alloc.M + d.alloc.N;
    d.alloc.eigenvalues = optimal_eigenvalues(d.alloc.M, d.alloc.N);
    const MappingMatrix map = build_mapping_matrix(d.alloc.M, d.alloc.N);
    const double det_rate = numeric_logdet_rate(
        map, d.alloc.beta, d.alloc.P0, d.alloc.P1, d.chan, d.cfg);
    const double closed = rate_relay_combined(d.alloc, d.chan, d.cfg);
    if (std::abs(det_rate - closed) > 1e-9 * std::max(1.0, closed)) {
      res.pass = false;
      res.detail = "relative error above 1e-9";
      break;
    }
  }
  return res;
}

SuiteResult upper_bound_suite(std::uint64_t seed) {
  SuiteResult res{"rates: comparator bound dominates the accurate sum", true,
                  ""};
  std::mt19937_64 rng(seed + 3);
  for (int i = 0; i < 1000; ++i) {
    const Draw d = random_feasible_draw(rng);
    const RateBreakdown bd = rate_sum(d.alloc, d.chan, d.cfg);
    const double upper = rate_sum_upper(d.alloc, d.chan, d.cfg);
    if (upper < bd.r_sum - 1e-9 * std::max(1.0, bd.r_sum)) {
      res.pass = false;
      res.detail = "bound fell below the sum";
      break;
    }
  }
  return res;
}

SuiteResult kernel_suite(std::uint64_t) {
  SuiteResult res{"kernel: known optima within 1e-6 relative", true, ""};
  KernelOptions kopts;

  ConcaveProgram p1;
  p1.dim = 1;
  p1.lower.resize(1);
  p1.upper.resize(1);
  p1.lower << 0.0;
  p1.upper << 2.0;
  p1.objective = [](const Eigen::VectorXd& x) {
    return -(x[0] - 1.0) * (x[0] - 1.0);
  };
  p1.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(1);
    g << -2.0 * (x[0] - 1.0);
    return g;
  };
  const KernelResult r1 = maximize_concave(p1, kopts);
  if (std::abs(r1.x[0] - 1.0) > 1e-6) {
    res.pass = false;
    res.detail = "quadratic optimum off";
    return res;
  }

  ConcaveProgram p2;
  p2.dim = 2;
  p2.lower.resize(2);
  p2.upper.resize(2);
  p2.lower << 0.0, 0.0;
  p2.upper << 2.0, 2.0;
  p2.objective = [](const Eigen::VectorXd& x) {
    return std::log1p(x[0]) + std::log1p(x[1]);
  };
  p2.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    g << 1.0 / (1.0 + x[0]), 1.0 / (1.0 + x[1]);
    return g;
  };
  ConstraintFn budget;
  budget.name = "sum";
  budget.value = [](const Eigen::VectorXd& x) { return x[0] + x[1] - 2.0; };
  budget.gradient = [](const Eigen::VectorXd&) {
    Eigen::VectorXd g(2);
    g << 1.0, 1.0;
    return g;
  };
  p2.constraints.push_back(budget);
  const KernelResult r2 = maximize_concave(p2, kopts);
  if (std::abs(r2.objective - 2.0 * std::log(2.0)) > 1e-6 * 2.0) {
    res.pass = false;
    res.detail = "symmetric log optimum off";
  }
  return res;
}

SuiteResult sca_point_suite(std::uint64_t seed) {
  SuiteResult res{"sca: surrogates match value and gradient at the point",
                  true, ""};
  std::mt19937_64 rng(seed + 4);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const NetworkConfig cfg = NetworkConfig::reference();
  const ChannelState chan = channel_gains(cfg);
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  for (int i = 0; i < 100; ++i) {
    const double rho = 0.55 + 0.4 * u01(rng);
    const double a_need = cfg.Pc * (1.0 - rho) / (cfg.eta * chan.g_sr);
    const double a = a_need + (cfg.Pmax * (1.0 - rho) - a_need) * u01(rng);
    const double b = cfg.Pmax * (1.0 - rho) * u01(rng);
    const SurrogatePoint pt = make_surrogate_point(rho, a, b, chan, cfg);
    const SurrogateBundle sur = sca_surrogates(pt);
    const double tol = 1e-12 * std::max(1.0, std::abs(pt.g));
    if (std::abs(sur.y_lb(rho) - sca_y(rho)) > tol ||
        std::abs(sur.f_ub(rho, b) - sca_f(rho, b)) > tol ||
        std::abs(sur.g_lb(rho, a) - sca_g(rr, rho, a)) > tol ||
        std::abs(sur.w_lb(rho, a) - sca_w(rr, rho, a)) > tol) {
      res.pass = false;
      res.detail = "value mismatch at the expansion point";
      break;
    }
    // Central differences of the originals against the stored partials.
    const double h = 1e-6;
    auto close = [](double got, double want) {
      return std::abs(got - want) <= 1e-4 * std::max({1.0, std::abs(got),
                                                      std::abs(want)});
    };
    const double g_rho_fd =
        (sca_g(rr, rho + h, a) - sca_g(rr, rho - h, a)) / (2 * h);
    const double g_a_fd =
        (sca_g(rr, rho, a + h) - sca_g(rr, rho, a - h)) / (2 * h);
    const double w_rho_fd =
        (sca_w(rr, rho + h, a) - sca_w(rr, rho - h, a)) / (2 * h);
    const double w_a_fd =
        (sca_w(rr, rho, a + h) - sca_w(rr, rho, a - h)) / (2 * h);
    if (!close(pt.g_rho, g_rho_fd) || !close(pt.g_a, g_a_fd) ||
        !close(pt.w_rho, w_rho_fd) || !close(pt.w_a, w_a_fd)) {
      res.pass = false;
      res.detail = "gradient mismatch at the expansion point";
      break;
    }
  }
  return res;
}

SuiteResult dominance_suite(std::uint64_t) {
  SuiteResult res{"solver: three-step result never beats exhaustive search",
                  true, ""};
  for (double a1 : {2.6, 3.2, 3.8}) {
    NetworkConfig cfg = NetworkConfig::reference();
    cfg.alpha1 = a1;
    const ChannelState chan = channel_gains(cfg);
    const SolverReport heur = allocate(chan, cfg);
    const SolverReport exact = exhaustive_allocate(chan, cfg);
    if (!heur.feasible || !exact.feasible) {
      res.pass = false;
      res.detail = "unexpected infeasibility";
      break;
    }
    if (heur.throughput >
        exact.throughput * (1.0 + 1e-6)) {
      res.pass = false;
      res.detail = "heuristic exceeded the exhaustive optimum";
      break;
    }
  }
  return res;
}

}  // namespace

std::vector<SuiteResult> run_validation_suites(std::uint64_t seed) {
  return {
      feasibility_constant_suite(seed), constraint_cross_check_suite(seed),
      logdet_equivalence_suite(seed),   upper_bound_suite(seed),
      kernel_suite(seed),               sca_point_suite(seed),
      dominance_suite(seed),
  };
}

}  // namespace relaybc
