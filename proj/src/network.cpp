#include "relaybc/network.hpp"

#include <cmath>
#include <stdexcept>

namespace relaybc {

double distance(const Coord& a, const Coord& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

NetworkConfig NetworkConfig::reference() {
  NetworkConfig cfg;
  cfg.coord_s = {0.0, 0.0};
  cfg.coord_r = {20.0, 20.0};
  cfg.coord_d = {100.0, 0.0};
  cfg.alpha1 = 2.7;
  cfg.alpha2 = 2.7;
  cfg.alpha3 = 2.7;
  cfg.Ts = 0.01;
  cfg.W = 1.0e4;
  cfg.sigma2 = 1e-13;  // -100 dBm/Hz
  cfg.eta = 0.5;
  cfg.Pc = 200e-6;
  cfg.P = 20.0;
  cfg.Pmax = 20.0;
  cfg.L = 20;
  return cfg;
}

void NetworkConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be strictly positive");
    }
  };
  positive(Ts, "Ts");
  positive(W, "W");
  positive(sigma2, "sigma2");
  positive(Pc, "Pc");
  positive(P, "P");
  positive(Pmax, "Pmax");
  positive(xi_sd, "xi_sd");
  positive(xi_sr, "xi_sr");
  positive(xi_rd, "xi_rd");
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1]");
  }
  if (P > Pmax * (1.0 + 1e-12)) {
    throw std::invalid_argument("average power budget P must not exceed Pmax");
  }
  if (L < 2) {
    throw std::invalid_argument("L must be at least 2");
  }
  for (double a : {alpha1, alpha2, alpha3}) {
    if (!(a >= 1.0 && a <= 6.0)) {
      throw std::invalid_argument("path-loss exponents must lie in [1, 6]");
    }
  }
}

ChannelState channel_gains(const NetworkConfig& cfg) {
  const double d_sd = distance(cfg.coord_s, cfg.coord_d);
  const double d_sr = distance(cfg.coord_s, cfg.coord_r);
  const double d_rd = distance(cfg.coord_r, cfg.coord_d);
  if (d_sd <= 0.0 || d_sr <= 0.0 || d_rd <= 0.0) {
    throw std::domain_error("degenerate geometry: coincident coordinates");
  }
  ChannelState chan;
  chan.g_sd = cfg.xi_sd * std::pow(d_sd, -cfg.alpha1);
  chan.g_sr = cfg.xi_sr * std::pow(d_sr, -cfg.alpha2);
  chan.g_rd = cfg.xi_rd * std::pow(d_rd, -cfg.alpha3);
  chan.noise_bw = cfg.W * cfg.sigma2;
  return chan;
}

double harvested_energy(const Allocation& alloc, const ChannelState& chan,
                        const NetworkConfig& cfg) {
  const double frac = static_cast<double>(alloc.M) / cfg.L;
  return frac * cfg.Ts * cfg.eta * (1.0 - alloc.beta) * alloc.P0 * chan.g_sr;
}

std::vector<ConstraintViolation> check_constraints(const Allocation& alloc,
                                                   const ChannelState& chan,
                                                   const NetworkConfig& cfg,
                                                   double rel_tol) {
  std::vector<ConstraintViolation> out;
  auto violated = [&](const char* name, double slack, double scale) {
    if (slack < -rel_tol * std::max(1.0, std::abs(scale))) {
      out.push_back({name, slack});
    }
  };

  const double mfrac = static_cast<double>(alloc.M) / cfg.L;
  const double nfrac = static_cast<double>(alloc.N) / cfg.L;

  // C1: block energy budget, in the P = E/Ts form.
  const double used = mfrac * alloc.P0 + nfrac * alloc.P1;
  violated("C1", cfg.P - used, cfg.P);

  // C2: energy causality of the IoT node.
  const double eh = harvested_energy(alloc, chan, cfg);
  const double consumed = mfrac * cfg.Ts * cfg.Pc;
  violated("C2", eh - consumed, consumed);

  // C3: subframe split (equality).
  const double c3 = static_cast<double>(alloc.M + alloc.N - cfg.L);
  violated("C3", -std::abs(c3), cfg.L);

  // C4: nonnegative counts.
  violated("C4", std::min(alloc.M, alloc.N), 1.0);

  // C5: relay power profile sums to N (equality). With M = 0 there is no
  // forwarded signal and the profile must be empty.
  if (alloc.M > 0 && alloc.N > 0) {
    const std::size_t want = static_cast<std::size_t>(std::min(alloc.M, alloc.N));
    if (alloc.eigenvalues.size() != want) {
      out.push_back({"C5", -static_cast<double>(alloc.eigenvalues.size()) +
                               static_cast<double>(want)});
    } else {
      double sum = 0.0;
      double least = 0.0;
      for (double v : alloc.eigenvalues) {
        sum += v;
        least = std::min(least, v);
      }
      violated("C5", -std::abs(sum - alloc.N), alloc.N);
      violated("C5-nonneg", least, 1.0);
    }
  } else if (!alloc.eigenvalues.empty()) {
    out.push_back({"C5", -static_cast<double>(alloc.eigenvalues.size())});
  }

  // C6: transmit power ranges.
  violated("C6", std::min({alloc.P0, alloc.P1, cfg.Pmax - alloc.P0,
                           cfg.Pmax - alloc.P1}),
           cfg.Pmax);

  // C7: reflection coefficient range.
  violated("C7", std::min(alloc.beta, 1.0 - alloc.beta), 1.0);

  return out;
}

FeasibilityConstants feasibility_constants(const ChannelState& chan,
                                           const NetworkConfig& cfg) {
  FeasibilityConstants fc;
  fc.A = 1.0 - cfg.Pc * chan.g_sr / (cfg.eta * chan.noise_bw);
  fc.B = 1.0 - cfg.Pc * chan.g_sd / (cfg.eta * chan.noise_bw);
  return fc;
}

}  // namespace relaybc
