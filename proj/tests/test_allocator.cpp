#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "relaybc/allocator.hpp"
#include "relaybc/oracle.hpp"

using namespace relaybc;

namespace {

// Geometry with the direct link stronger than the decode link.
NetworkConfig direct_dominant_config() {
  NetworkConfig cfg = test::reference_config();
  cfg.coord_d = {50.0, 0.0};
  cfg.alpha2 = 3.2;
  cfg.alpha1 = 2.5;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("allocator");

TEST_CASE("optimal reflection coefficient") {
  NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);

  SUBCASE("free circuit reflects everything") {
    NetworkConfig c2 = cfg;
    c2.Pc = 0.0;
    CHECK(optimal_beta(10.0, chan, c2) == 1.0);
  }
  SUBCASE("threshold power reflects nothing") {
    const double p0 = cfg.Pc / (cfg.eta * chan.g_sr);
    CHECK(optimal_beta(p0, chan, cfg) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("reference value") {
    const double expect = 1.0 - cfg.Pc / (cfg.eta * 20.0 * chan.g_sr);
    CHECK(optimal_beta(20.0, chan, cfg) ==
          doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("insufficient power is an error") {
    const double p0 = 0.5 * cfg.Pc / (cfg.eta * chan.g_sr);
    CHECK_THROWS_AS(optimal_beta(p0, chan, cfg), std::domain_error);
  }
}

TEST_CASE("convexified iteration on the high-share branch") {
  NetworkConfig cfg = test::reference_config();
  cfg.alpha1 = 2.5;
  const ChannelState chan = channel_gains(cfg);
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  SolverOptions opts;
  std::vector<ScaIterate> trace;
  const ContinuousSolution sol = solve_case1_highrho(chan, cfg, opts, &trace);
  REQUIRE(sol.feasible);

  SUBCASE("few iterations on the reference scenario") {
    CHECK(trace.size() <= 10);
  }
  SUBCASE("objective trace never decreases") {
    for (std::size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i].t >=
            trace[i - 1].t - 1e-9 * std::max(1.0, std::abs(trace[i].t)));
    }
  }
  SUBCASE("budget is exhausted at the solution") {
    const double used = sol.rho * sol.P0 + (1.0 - sol.rho) * sol.P1;
    CHECK(used == doctest::Approx(cfg.P).epsilon(1e-6));
  }
  SUBCASE("iterates stay feasible for the original constraints") {
    for (const auto& it : trace) {
      const double tol = 1e-6;
      CHECK(it.a - it.b + it.b / it.rho <=
            cfg.P * (1.0 / it.rho - 1.0) + tol * cfg.P);
      CHECK(it.a <= cfg.Pmax * (1.0 - it.rho) + tol * cfg.Pmax);
      CHECK(it.b <= cfg.Pmax * (1.0 - it.rho) + tol * cfg.Pmax);
      CHECK(cfg.Pc * (1.0 - it.rho) <=
            cfg.eta * it.a * chan.g_sr + tol * cfg.Pc);
    }
  }
  SUBCASE("rounded split reproduces the per-split oracle value") {
    const SolverReport rep = allocate(chan, cfg, opts);
    REQUIRE(rep.feasible);
    std::vector<PerSplitResult> table;
    exhaustive_allocate(chan, cfg, opts, &table);
    const PerSplitResult& row = table.at(rep.allocation.M);
    REQUIRE(row.feasible);
    CHECK(rep.throughput == doctest::Approx(row.throughput).epsilon(1e-3));
    // Here the continuous share is also bracketed by the chosen split.
    CHECK(std::abs(sol.rho * cfg.L - rep.allocation.M) <= 1.0);
    (void)rr;
  }
}

TEST_CASE("low-share branch") {
  SolverOptions opts;

  SUBCASE("dead relay link reduces to a 1-D concave problem") {
    NetworkConfig cfg = test::reference_config();
    cfg.xi_rd = 1e-30;  // effectively severs the relay-destination link
    const ChannelState chan = channel_gains(cfg);
    const ReducedRates rr = ReducedRates::make(chan, cfg);
    const ContinuousSolution sol = solve_case1_lowrho(chan, cfg, opts);
    REQUIRE(sol.feasible);

    // 1-D grid oracle over the share; the budget and cap fix u.
    const double rho_min = 1.0 / (10.0 * cfg.L);
    double best = -1e300;
    for (int i = 0; i <= 5000; ++i) {
      const double rho = rho_min + (0.5 - rho_min) * i / 5000.0;
      const double u = std::min(cfg.Pmax * rho, cfg.P);
      if (cfg.Pc * rho > cfg.eta * u * chan.g_sr) continue;
      const double t =
          std::min(rr.r_sr(rho, u / rho), rr.r_d(rho, u / rho, 0.0));
      best = std::max(best, t);
    }
    const double got = std::min(rr.r_sr(sol.rho, sol.P0),
                                rr.r_d(sol.rho, sol.P0, sol.P1));
    CHECK(got == doctest::Approx(best).epsilon(1e-3));
  }

  SUBCASE("circuit constraint identity when the power floor binds") {
    NetworkConfig cfg = test::reference_config();
    cfg.Pc = 1e-3;  // five times the reference circuit draw
    const ChannelState chan = channel_gains(cfg);
    const ContinuousSolution sol = solve_case1_lowrho(chan, cfg, opts);
    REQUIRE(sol.feasible);
    const double u = sol.P0 * sol.rho;
    // Whenever the floor is active the identity Pc*rho = eta*u*g_sr holds.
    const double slack = cfg.eta * u * chan.g_sr - cfg.Pc * sol.rho;
    if (slack < 1e-6 * cfg.Pc) {
      CHECK(cfg.Pc * sol.rho ==
            doctest::Approx(cfg.eta * u * chan.g_sr).epsilon(1e-5));
    }
  }

  SUBCASE("the branch comparison keeps the better objective") {
    NetworkConfig cfg = test::reference_config();
    const ChannelState chan = channel_gains(cfg);
    std::vector<ScaIterate> trace;
    const ContinuousSolution hi = solve_case1_highrho(chan, cfg, opts, &trace);
    const ContinuousSolution lo = solve_case1_lowrho(chan, cfg, opts);
    const ContinuousSolution both = solve_case1(chan, cfg, opts);
    REQUIRE(both.feasible);
    double best = -1e300;
    if (hi.feasible) best = std::max(best, hi.t);
    if (lo.feasible) best = std::max(best, lo.t);
    CHECK(both.t == best);
    if (hi.feasible && lo.feasible) {
      CHECK(both.branch ==
            (hi.t >= lo.t ? hi.branch : lo.branch));
    }
  }
}

TEST_CASE("direct-link case") {
  SolverOptions opts;

  SUBCASE("objective is concave along the share") {
    NetworkConfig cfg = direct_dominant_config();
    const ChannelState chan = channel_gains(cfg);
    const ReducedRates rr = ReducedRates::make(chan, cfg);
    const double theta = cfg.P * rr.csd;
    auto q = [&](double rho) {
      return rr.TsW * rho * std::log2(rr.B + theta / rho);
    };
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(cfg.P / cfg.Pmax + 1e-3, 0.999);
    for (int i = 0; i < 100; ++i) {
      double r1 = u(rng), r2 = u(rng);
      const double mid = 0.5 * (r1 + r2);
      CHECK(0.5 * q(r1) + 0.5 * q(r2) <=
            q(mid) + 1e-9 * std::max(1.0, std::abs(q(mid))));
    }
  }

  SUBCASE("all budget in one phase when the derivative stays positive") {
    NetworkConfig cfg = direct_dominant_config();
    cfg.Pc = 1e-9;  // upper bound becomes min(1, huge) = 1
    cfg.Pmax = 30.0;
    const ChannelState chan = channel_gains(cfg);
    REQUIRE(chan.g_sd > chan.g_sr);
    const ContinuousSolution sol = solve_case2(chan, cfg, opts);
    REQUIRE(sol.feasible);
    CHECK(sol.rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.P0 == doctest::Approx(cfg.P).epsilon(1e-12));
    CHECK(sol.P1 == 0.0);
  }

  SUBCASE("share matches a dense grid of the objective") {
    NetworkConfig cfg = direct_dominant_config();
    cfg.Pmax = 30.0;
    const ChannelState chan = channel_gains(cfg);
    REQUIRE(chan.g_sd > chan.g_sr);
    const ReducedRates rr = ReducedRates::make(chan, cfg);
    const ContinuousSolution sol = solve_case2(chan, cfg, opts);
    REQUIRE(sol.feasible);

    const double lo = cfg.P / cfg.Pmax;
    const double hi = std::min(1.0, cfg.P * cfg.eta * chan.g_sr / cfg.Pc);
    double best = -1e300, best_rho = lo;
    for (int i = 0; i <= 200000; ++i) {
      const double rho = lo + (hi - lo) * i / 200000.0;
      const double v = rr.TsW * rho * std::log2(rr.B + cfg.P * rr.csd / rho);
      if (v > best) {
        best = v;
        best_rho = rho;
      }
    }
    CHECK(sol.rho == doctest::Approx(best_rho).epsilon(2e-5));
  }

  SUBCASE("empty feasible interval is infeasible") {
    NetworkConfig cfg = direct_dominant_config();
    cfg.Pc = 1.0;  // upper bound P*eta*g_sr/Pc drops below P/Pmax
    const ChannelState chan = channel_gains(cfg);
    const ContinuousSolution sol = solve_case2(chan, cfg, opts);
    CHECK_FALSE(sol.feasible);
  }
}

TEST_CASE("integer conversion") {
  NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);

  SUBCASE("integral share is unchanged by every rule") {
    ContinuousSolution cont;
    cont.feasible = true;
    cont.P0 = 10.0;
    cont.P1 = 5.0;
    cont.rho = 0.4;  // M* = 8 exactly
    cont.beta = 0.5;
    cont.branch = ContinuousCase::case1_lowrho;
    const IntegerSplit split = integer_convert(cont, chan, cfg);
    CHECK(split.M == 8);
    CHECK(split.N == 12);
  }
  SUBCASE("larger carrier power floors the share") {
    ContinuousSolution cont;
    cont.feasible = true;
    cont.P0 = 10.0;
    cont.P1 = 5.0;
    cont.rho = 0.37;  // M* = 7.4
    cont.beta = 0.5;
    cont.branch = ContinuousCase::case1_lowrho;
    const IntegerSplit split = integer_convert(cont, chan, cfg);
    CHECK(split.M == 7);
    CHECK(split.N == 13);
    CHECK(split.rule == IntegerRule::floor_rule);
  }
  SUBCASE("larger forward power ceils the share") {
    ContinuousSolution cont;
    cont.feasible = true;
    cont.P0 = 5.0;
    cont.P1 = 10.0;
    cont.rho = 0.37;
    cont.beta = 0.5;
    cont.branch = ContinuousCase::case1_lowrho;
    const IntegerSplit split = integer_convert(cont, chan, cfg);
    CHECK(split.M == 8);
    CHECK(split.rule == IntegerRule::ceil_rule);
  }
  SUBCASE("equal powers keep the better candidate") {
    ContinuousSolution cont;
    cont.feasible = true;
    cont.P0 = 20.0;
    cont.P1 = 20.0;
    cont.rho = 0.755;
    cont.beta = optimal_beta(20.0, chan, cfg);
    cont.branch = ContinuousCase::case1_highrho;
    const IntegerSplit split = integer_convert(cont, chan, cfg);
    CHECK((split.rule == IntegerRule::tie_floor ||
           split.rule == IntegerRule::tie_ceil));
    // Two-point comparison oracle.
    auto value_at = [&](int m) {
      Allocation a;
      a.M = m;
      a.N = cfg.L - m;
      a.P0 = cont.P0;
      a.P1 = cont.P1;
      a.beta = cont.beta;
      a.eigenvalues = optimal_eigenvalues(a.M, a.N);
      return rate_sum(a, chan, cfg).r_sum;
    };
    CHECK(value_at(split.M) >= value_at(split.M == 15 ? 16 : 15));
  }
}

TEST_CASE("power re-optimization at a fixed split") {
  SolverOptions opts;

  SUBCASE("direct-link case with the whole block backscattering") {
    NetworkConfig cfg = direct_dominant_config();
    const ChannelState chan = channel_gains(cfg);
    REQUIRE(chan.g_sd > chan.g_sr);
    const PowerSolution pw = reoptimize_powers(cfg.L, 0, chan, cfg, opts);
    REQUIRE(pw.feasible);
    CHECK(pw.P0 == doctest::Approx(cfg.P).epsilon(1e-12));
    CHECK(pw.P1 == 0.0);
  }
  SUBCASE("budget binds at the concave optimum") {
    NetworkConfig cfg = test::reference_config();
    cfg.Pmax = 30.0;  // keep the carrier cap from freezing the budget
    const ChannelState chan = channel_gains(cfg);
    const PowerSolution pw = reoptimize_powers(14, 6, chan, cfg, opts);
    REQUIRE(pw.feasible);
    const double used = (14.0 * pw.P0 + 6.0 * pw.P1) / cfg.L;
    CHECK(used == doctest::Approx(cfg.P).epsilon(1e-6));
  }
  SUBCASE("matches a dense power grid") {
    NetworkConfig cfg = test::reference_config();
    cfg.alpha1 = 3.0;
    const ChannelState chan = channel_gains(cfg);
    const ReducedRates rr = ReducedRates::make(chan, cfg);
    const int M = 14, N = 6;
    const PowerSolution pw = reoptimize_powers(M, N, chan, cfg, opts);
    REQUIRE(pw.feasible);

    const double rho = double(M) / cfg.L;
    const double step = cfg.Pmax / 2000.0;
    double best = -1e300;
    for (int i = 0; i <= 2000; ++i) {
      const double p0 = i * step;
      if (cfg.Pc > cfg.eta * p0 * chan.g_sr) continue;
      const double p1_cap =
          std::min(cfg.Pmax, (cfg.P - rho * p0) / (1.0 - rho));
      if (p1_cap < 0.0) continue;
      for (int j = 0; j * step <= p1_cap; ++j) {
        const double p1 = j * step;
        best = std::max(best,
                        std::min(rr.r_sr(rho, p0), rr.r_d(rho, p0, p1)));
      }
    }
    CHECK(pw.t == doctest::Approx(best).epsilon(1e-3));
  }
  SUBCASE("division guard in the direct-link case") {
    NetworkConfig cfg = direct_dominant_config();
    const ChannelState chan = channel_gains(cfg);
    const PowerSolution pw = reoptimize_powers(0, cfg.L, chan, cfg, opts);
    CHECK_FALSE(pw.feasible);
  }
}

TEST_CASE("full pipeline") {
  SolverOptions opts;

  SUBCASE("degenerate circuit power is infeasible at the PRC stage") {
    NetworkConfig cfg = test::reference_config();
    const ChannelState chan = channel_gains(cfg);
    NetworkConfig bad = cfg;
    bad.Pc = cfg.eta * cfg.Pmax * chan.g_sr * 2.0;
    const SolverReport rep = allocate(channel_gains(bad), bad, opts);
    CHECK_FALSE(rep.feasible);
    CHECK(rep.failed_stage == "prc-feasibility");
  }
  SUBCASE("close to exhaustive search on the reference scenario") {
    NetworkConfig cfg = test::reference_config();
    cfg.alpha1 = 3.0;
    const ChannelState chan = channel_gains(cfg);
    const SolverReport rep = allocate(chan, cfg, opts);
    const SolverReport exact = exhaustive_allocate(chan, cfg, opts);
    REQUIRE(rep.feasible);
    REQUIRE(exact.feasible);
    CHECK(rep.throughput >= 0.95 * exact.throughput);
    CHECK(rep.throughput <= exact.throughput * (1.0 + 1e-6));
  }
  SUBCASE("output allocation always passes the constraint audit") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 10; ++i) {
      const NetworkConfig cfg = test::random_config(rng);
      const ChannelState chan = channel_gains(cfg);
      const SolverReport rep = allocate(chan, cfg, opts);
      if (!rep.feasible) continue;
      CHECK(check_constraints(rep.allocation, chan, cfg).empty());
      CHECK(rep.log_guard_activations == 0);
      CHECK(rep.throughput ==
            rate_sum(rep.allocation, chan, cfg).r_sum);
    }
  }
  SUBCASE("auxiliary objective sits on the binding rate") {
    NetworkConfig cfg = test::reference_config();
    cfg.alpha1 = 3.4;
    const ChannelState chan = channel_gains(cfg);
    const ReducedRates rr = ReducedRates::make(chan, cfg);
    const SolverReport rep = allocate(chan, cfg, opts);
    REQUIRE(rep.feasible);
    const auto& c = rep.continuous;
    const double tmin =
        std::min(rr.r_sr(c.rho, c.P0), rr.r_d(c.rho, c.P0, c.P1));
    CHECK(c.t == doctest::Approx(tmin).epsilon(1e-6));
    const double used = c.rho * c.P0 + (1.0 - c.rho) * c.P1;
    CHECK(used == doctest::Approx(cfg.P).epsilon(1e-6));
    const double c21 = cfg.eta * (1.0 - c.beta) * c.P0 * chan.g_sr;
    CHECK(c21 == doctest::Approx(cfg.Pc).epsilon(1e-6));
  }
}

TEST_SUITE_END();
