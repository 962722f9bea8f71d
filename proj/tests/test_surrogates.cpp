#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "relaybc/surrogates.hpp"

using namespace relaybc;

namespace {

struct Point {
  double rho, a, b;
};

Point random_expansion_point(std::mt19937_64& rng, const NetworkConfig& cfg,
                             const ChannelState& chan) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Point pt;
  pt.rho = 0.55 + 0.4 * u01(rng);
  const double s = 1.0 - pt.rho;
  const double a_need = cfg.Pc * s / (cfg.eta * chan.g_sr);
  pt.a = a_need + (cfg.Pmax * s - a_need) * u01(rng);
  pt.b = cfg.Pmax * s * u01(rng) + 1e-9;
  return pt;
}

}  // namespace

TEST_SUITE_BEGIN("surrogates");

TEST_CASE("surrogates equal the originals at the expansion point") {
  std::mt19937_64 rng(51);
  const NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  for (int i = 0; i < 200; ++i) {
    const Point p = random_expansion_point(rng, cfg, chan);
    const SurrogatePoint pt = make_surrogate_point(p.rho, p.a, p.b, chan, cfg);
    const SurrogateBundle sur = sca_surrogates(pt);
    const double tol = 1e-12 * std::max(1.0, std::abs(pt.g));
    CHECK(std::abs(sur.y_lb(p.rho) - sca_y(p.rho)) <= tol);
    CHECK(std::abs(sur.f_ub(p.rho, p.b) - sca_f(p.rho, p.b)) <= tol);
    CHECK(std::abs(sur.g_lb(p.rho, p.a) - sca_g(rr, p.rho, p.a)) <= tol);
    CHECK(std::abs(sur.w_lb(p.rho, p.a) - sca_w(rr, p.rho, p.a)) <= tol);
  }
}

TEST_CASE("stored partials match central differences of the originals") {
  std::mt19937_64 rng(53);
  const NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  auto close = [](double got, double want) {
    return std::abs(got - want) <=
           1e-4 * std::max({1.0, std::abs(got), std::abs(want)});
  };
  for (int i = 0; i < 100; ++i) {
    const Point p = random_expansion_point(rng, cfg, chan);
    const SurrogatePoint pt = make_surrogate_point(p.rho, p.a, p.b, chan, cfg);
    const double h = 1e-6;
    CHECK(close(pt.y_rho, (sca_y(p.rho + h) - sca_y(p.rho - h)) / (2 * h)));
    CHECK(close(pt.f_rho,
                (sca_f(p.rho + h, p.b) - sca_f(p.rho - h, p.b)) / (2 * h)));
    CHECK(close(pt.f_b,
                (sca_f(p.rho, p.b + h) - sca_f(p.rho, p.b - h)) / (2 * h)));
    CHECK(close(pt.g_rho, (sca_g(rr, p.rho + h, p.a) -
                           sca_g(rr, p.rho - h, p.a)) /
                              (2 * h)));
    CHECK(close(pt.g_a, (sca_g(rr, p.rho, p.a + h) -
                         sca_g(rr, p.rho, p.a - h)) /
                            (2 * h)));
    CHECK(close(pt.w_rho, (sca_w(rr, p.rho + h, p.a) -
                           sca_w(rr, p.rho - h, p.a)) /
                              (2 * h)));
    CHECK(close(pt.w_a, (sca_w(rr, p.rho, p.a + h) -
                         sca_w(rr, p.rho, p.a - h)) /
                            (2 * h)));
  }
}

TEST_CASE("reciprocal minorant holds everywhere on the branch") {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> u(0.5, 0.9999);
  const NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);
  for (int i = 0; i < 100; ++i) {
    const Point p = random_expansion_point(rng, cfg, chan);
    const SurrogateBundle sur =
        sca_surrogates(make_surrogate_point(p.rho, p.a, p.b, chan, cfg));
    for (int k = 0; k < 100; ++k) {
      const double rho = u(rng);
      CHECK(sca_y(rho) >= sur.y_lb(rho) - 1e-12);
    }
  }
}

TEST_CASE("cross-term majorant holds along its own axes") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.5, 0.9999);
  const NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);
  for (int i = 0; i < 100; ++i) {
    const Point p = random_expansion_point(rng, cfg, chan);
    const SurrogateBundle sur =
        sca_surrogates(make_surrogate_point(p.rho, p.a, p.b, chan, cfg));
    for (int k = 0; k < 50; ++k) {
      const double rho = u(rng);  // rho >= rho_j/2 always holds here
      CHECK(sca_f(rho, p.b) <= sur.f_ub(rho, p.b) + 1e-12);
      const double b = p.b * (0.5 + k * 0.02);
      // Linear in b: the surrogate tracks it exactly on the b-axis.
      CHECK(sca_f(p.rho, b) ==
            doctest::Approx(sur.f_ub(p.rho, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("rate minorants hold for small interior steps") {
  // The doubled curvature term guarantees the direction for steps that are
  // small against the local log-argument scale; expansion points are kept
  // away from the circuit-power boundary where that scale collapses.
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const NetworkConfig cfg = test::reference_config();
  const ChannelState chan = channel_gains(cfg);
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  for (int i = 0; i < 100; ++i) {
    Point p = random_expansion_point(rng, cfg, chan);
    const double s = 1.0 - p.rho;
    const double a_need = cfg.Pc * s / (cfg.eta * chan.g_sr);
    p.a = std::max(p.a, 3.0 * a_need);  // keep the log argument >= 3
    const SurrogateBundle sur =
        sca_surrogates(make_surrogate_point(p.rho, p.a, p.b, chan, cfg));
    const double scale = std::max(1.0, std::abs(sur.pt.g));
    for (int k = 0; k < 100; ++k) {
      const double da = p.a * 0.005 * (2.0 * u01(rng) - 1.0);
      CHECK(sca_g(rr, p.rho, p.a + da) >=
            sur.g_lb(p.rho, p.a + da) - 1e-9 * scale);
      CHECK(sca_w(rr, p.rho, p.a + da) >=
            sur.w_lb(p.rho, p.a + da) - 1e-9 * scale);
    }
  }
}

TEST_SUITE_END();
