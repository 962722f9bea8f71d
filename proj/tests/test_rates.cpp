#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "relaybc/rates.hpp"

using namespace relaybc;

namespace {

// Single-expression oracle for the direct-link rate.
double rate_sd_oracle(const Allocation& a, const ChannelState& c,
                      const NetworkConfig& cfg) {
  return double(a.M) / cfg.L * cfg.Ts * cfg.W *
         std::log2(1.0 + a.beta * a.P0 * c.g_sr * c.g_sd / c.noise_bw);
}

}  // namespace

TEST_SUITE_BEGIN("rates");

TEST_CASE("direct-link rate") {
  NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);
  Allocation alloc;
  alloc.M = 10;
  alloc.N = 10;
  alloc.P0 = 20.0;
  alloc.P1 = 5.0;
  alloc.eigenvalues = optimal_eigenvalues(10, 10);

  SUBCASE("zero reflection carries nothing") {
    alloc.beta = 0.0;
    CHECK(rate_sd(alloc, chan, cfg) == 0.0);
  }
  SUBCASE("unit SNR gives one bit per channel use") {
    Allocation a2 = alloc;
    a2.M = cfg.L;
    a2.N = 0;
    a2.eigenvalues.clear();
    ChannelState c2 = chan;
    a2.beta = 1.0;
    a2.P0 = 1.0;
    c2.g_sr = 1.0;
    c2.g_sd = chan.noise_bw;  // beta*P0*g_sr*g_sd == noise_bw
    CHECK(rate_sd(a2, c2, cfg) ==
          doctest::Approx(cfg.Ts * cfg.W).epsilon(1e-12));
  }
  SUBCASE("reference arithmetic oracle") {
    alloc.beta = 0.5;
    CHECK(rate_sd(alloc, chan, cfg) ==
          doctest::Approx(rate_sd_oracle(alloc, chan, cfg)).epsilon(1e-12));
  }
}

TEST_CASE("decode rate mirrors the direct rate under symmetric gains") {
  NetworkConfig cfg = test::reference_config();
  ChannelState chan = channel_gains(cfg);
  Allocation alloc;
  alloc.M = 8;
  alloc.N = 12;
  alloc.P0 = 15.0;
  alloc.P1 = 3.0;
  alloc.beta = 0.6;
  alloc.eigenvalues = optimal_eigenvalues(8, 12);

  SUBCASE("zero reflection") {
    alloc.beta = 0.0;
    CHECK(rate_sr(alloc, chan, cfg) == 0.0);
  }
  SUBCASE("g_sd == g_sr collapses the two rates") {
    chan.g_sd = chan.g_sr;
    CHECK(rate_sr(alloc, chan, cfg) ==
          doctest::Approx(rate_sd(alloc, chan, cfg)).epsilon(1e-14));
  }
}

TEST_CASE("combined destination rate") {
  NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);
  Allocation alloc;
  alloc.M = 12;
  alloc.N = 8;
  alloc.P0 = 18.0;
  alloc.P1 = 6.0;
  alloc.beta = 0.7;
  alloc.eigenvalues = optimal_eigenvalues(12, 8);

  SUBCASE("idle relay adds nothing") {
    alloc.P1 = 0.0;
    CHECK(rate_relay_combined(alloc, chan, cfg) ==
          doctest::Approx(rate_sd(alloc, chan, cfg)).epsilon(1e-14));
  }
  SUBCASE("branches meet at the equal split") {
    Allocation eq = alloc;
    eq.M = 10;
    eq.N = 10;
    eq.eigenvalues = optimal_eigenvalues(10, 10);
    // Evaluate both closed forms directly.
    const double s_sd = eq.beta * eq.P0 * chan.g_sr * chan.g_sd / chan.noise_bw;
    const double s_rd = eq.P1 * chan.g_rd / chan.noise_bw;
    const double tw = cfg.Ts * cfg.W;
    const double high = tw * 10 / cfg.L * std::log2(1 + s_sd + s_rd);
    const double low = tw * 10 / cfg.L * std::log2(1 + s_sd + (10.0 / 10.0) * s_rd);
    CHECK(high == doctest::Approx(low).epsilon(1e-15));
    CHECK(rate_relay_combined(eq, chan, cfg) ==
          doctest::Approx(high).epsilon(1e-12));
  }
  SUBCASE("empty backscatter phase carries nothing forward") {
    Allocation m0 = alloc;
    m0.M = 0;
    m0.N = cfg.L;
    m0.eigenvalues.clear();
    CHECK(rate_relay_combined(m0, chan, cfg) == 0.0);
  }
  SUBCASE("never below the direct rate") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
      const NetworkConfig c = test::random_config(rng);
      const ChannelState ch = channel_gains(c);
      const Allocation a = test::random_feasible_allocation(rng, c, ch);
      CHECK(rate_relay_combined(a, ch, c) >=
            rate_sd(a, ch, c) - 1e-12 * std::max(1.0, rate_sd(a, ch, c)));
    }
  }
}

TEST_CASE("throughput combiner") {
  NetworkConfig cfg = test::reference_config();
  ChannelState chan = channel_gains(cfg);

  SUBCASE("dominant direct link wins the outer max") {
    chan.g_sd = chan.g_sr * 100.0;
    Allocation alloc;
    alloc.M = 10;
    alloc.N = 10;
    alloc.P0 = 10.0;
    alloc.P1 = 1.0;
    alloc.beta = 0.5;
    alloc.eigenvalues = optimal_eigenvalues(10, 10);
    const RateBreakdown bd = rate_sum(alloc, chan, cfg);
    CHECK(bd.r_sd > bd.r_sr);
    CHECK(bd.r_sum == bd.r_sd);
    CHECK(bd.case_label == RateLimiter::sd_dominant);
  }
  SUBCASE("idle relay with weak direct link") {
    chan = channel_gains(cfg);
    Allocation alloc;
    alloc.M = 10;
    alloc.N = 10;
    alloc.P0 = 10.0;
    alloc.P1 = 0.0;
    alloc.beta = 0.5;
    alloc.eigenvalues = optimal_eigenvalues(10, 10);
    const RateBreakdown bd = rate_sum(alloc, chan, cfg);
    // g_sd <= g_sr: the combined rate collapses onto r_sd and wins the min.
    CHECK(bd.r_sum == doctest::Approx(bd.r_sd).epsilon(1e-14));
  }
  SUBCASE("random draws match brute-force recomputation") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
      const NetworkConfig c = test::random_config(rng);
      const ChannelState ch = channel_gains(c);
      const Allocation a = test::random_feasible_allocation(rng, c, ch);
      const RateBreakdown bd = rate_sum(a, ch, c);
      const double expect =
          std::max(bd.r_sd, std::min(bd.r_sr, bd.r_relay));
      CHECK(bd.r_sum == expect);
      CHECK(bd.gamma_sd ==
            doctest::Approx(a.beta * a.P0 * ch.g_sr * ch.g_sd / ch.noise_bw)
                .epsilon(1e-14));
      CHECK(bd.gamma_sr ==
            doctest::Approx(a.beta * a.P0 * ch.g_sr * ch.g_sr / ch.noise_bw)
                .epsilon(1e-14));
      CHECK(bd.gamma_rd ==
            doctest::Approx(a.P1 * ch.g_rd / ch.noise_bw).epsilon(1e-14));
    }
  }
}

TEST_CASE("comparator upper bound") {
  NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);

  SUBCASE("tight without relay power") {
    Allocation alloc;
    alloc.M = 14;
    alloc.N = 6;
    alloc.P0 = 12.0;
    alloc.P1 = 0.0;
    alloc.beta = 0.4;
    alloc.eigenvalues = optimal_eigenvalues(14, 6);
    CHECK(rate_sum_upper(alloc, chan, cfg) ==
          doctest::Approx(rate_sum(alloc, chan, cfg).r_sum).epsilon(1e-14));
  }
  SUBCASE("equal split closed form") {
    Allocation alloc;
    alloc.M = 10;
    alloc.N = 10;
    alloc.P0 = 16.0;
    alloc.P1 = 9.0;
    alloc.beta = 0.8;
    alloc.eigenvalues = optimal_eigenvalues(10, 10);
    const RateBreakdown bd = rate_sum(alloc, chan, cfg);
    const double expect =
        cfg.Ts * cfg.W / 2.0 *
        std::log2(1.0 + std::max(bd.gamma_sd,
                                 std::min(bd.gamma_sr,
                                          bd.gamma_sd + bd.gamma_rd +
                                              bd.gamma_sd * bd.gamma_rd)));
    CHECK(rate_sum_upper(alloc, chan, cfg) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("dominates the accurate sum on random draws") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
      const NetworkConfig c = test::random_config(rng);
      const ChannelState ch = channel_gains(c);
      const Allocation a = test::random_feasible_allocation(rng, c, ch);
      const double sum = rate_sum(a, ch, c).r_sum;
      CHECK(rate_sum_upper(a, ch, c) >= sum - 1e-9 * std::max(1.0, sum));
    }
  }
}

TEST_CASE("equal-time reference") {
  NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);

  SUBCASE("idle relay closed form") {
    const double beta = 0.5, P0 = 10.0;
    const double g_sd = beta * P0 * chan.g_sr * chan.g_sd / chan.noise_bw;
    const double g_sr = beta * P0 * chan.g_sr * chan.g_sr / chan.noise_bw;
    const double expect =
        cfg.Ts * cfg.W / 2.0 *
        std::log2(1.0 + std::max(g_sd, std::min(g_sr, g_sd)));
    CHECK(equal_time_reference(chan, cfg, beta, P0, 0.0) ==
          doctest::Approx(expect).epsilon(1e-14));
  }
  SUBCASE("equal split equals the reference exactly") {
    std::mt19937_64 rng(15);
    for (int i = 0; i < 200; ++i) {
      NetworkConfig c = test::random_config(rng);
      c.L = 2 * (c.L / 2);
      if (c.L < 2) c.L = 2;
      const ChannelState ch = channel_gains(c);
      Allocation a = test::random_feasible_allocation(rng, c, ch);
      a.M = c.L / 2;
      a.N = c.L - a.M;
      a.eigenvalues = optimal_eigenvalues(a.M, a.N);
      const double sum = rate_sum(a, ch, c).r_sum;
      const double ref = equal_time_reference(ch, c, a.beta, a.P0, a.P1);
      CHECK(sum == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("bound-case classification") {
  NetworkConfig cfg = test::reference_config();
  ChannelState chan = channel_gains(cfg);

  SUBCASE("idle relay sits on the tight boundary") {
    Allocation alloc;
    alloc.M = 12;
    alloc.N = 8;
    alloc.P0 = 10.0;
    alloc.P1 = 0.0;
    alloc.beta = 0.5;
    alloc.eigenvalues = optimal_eigenvalues(12, 8);
    const UpperBoundCase c = classify_case(alloc, chan, cfg);
    CHECK(rate_sum_upper(alloc, chan, cfg) ==
          doctest::Approx(rate_sum(alloc, chan, cfg).r_sum).epsilon(1e-12));
    CHECK((c == UpperBoundCase::decode_limited ||
           c == UpperBoundCase::destination_limited));
  }
  SUBCASE("strong decode link") {
    chan.g_sr = chan.g_sd * 1e4;
    Allocation alloc;
    alloc.M = 12;
    alloc.N = 8;
    alloc.P0 = 10.0;
    alloc.P1 = 1e-3;
    alloc.beta = 0.9;
    alloc.eigenvalues = optimal_eigenvalues(12, 8);
    CHECK(classify_case(alloc, chan, cfg) ==
          UpperBoundCase::destination_limited);
  }
  SUBCASE("labels agree with direct inequality evaluation") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 500; ++i) {
      const NetworkConfig c = test::random_config(rng);
      const ChannelState ch = channel_gains(c);
      const Allocation a = test::random_feasible_allocation(rng, c, ch);
      const RateBreakdown bd = rate_sum(a, ch, c);
      const double upper = rate_sum_upper(a, ch, c);
      const UpperBoundCase label = classify_case(a, ch, c);
      if (upper_bound_tight(label)) {
        CHECK(upper == doctest::Approx(bd.r_sum).epsilon(1e-12));
      } else {
        CHECK(upper >= bd.r_sum - 1e-12 * std::max(1.0, bd.r_sum));
      }
    }
  }
}

TEST_CASE("scaling and monotonicity") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    NetworkConfig cfg = test::random_config(rng);
    const ChannelState chan = channel_gains(cfg);
    Allocation a = test::random_feasible_allocation(rng, cfg, chan);
    const RateBreakdown bd = rate_sum(a, chan, cfg);

    NetworkConfig scaled = cfg;
    scaled.Ts *= 3.0;
    const ChannelState chan_scaled = channel_gains(scaled);
    CHECK(rate_sum(a, chan_scaled, scaled).r_sum ==
          doctest::Approx(3.0 * bd.r_sum).epsilon(1e-12));

    Allocation up = a;
    up.beta = std::min(1.0, a.beta * 1.05 + 1e-6);
    CHECK(rate_sum(up, chan, cfg).r_sum >= bd.r_sum - 1e-12);
    up = a;
    up.P0 = std::min(cfg.Pmax, a.P0 * 1.05);
    CHECK(rate_sum(up, chan, cfg).r_sum >= bd.r_sum - 1e-12);
    up = a;
    up.P1 = std::min(cfg.Pmax, a.P1 * 1.05 + 1e-9);
    CHECK(rate_sum(up, chan, cfg).r_sum >= bd.r_sum - 1e-12);
  }
}

TEST_SUITE_END();
