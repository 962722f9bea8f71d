#pragma once

#include <random>

#include "relaybc/allocator.hpp"
#include "relaybc/linmap.hpp"
#include "relaybc/network.hpp"

namespace relaybc::test {

inline NetworkConfig reference_config() { return NetworkConfig::reference(); }

inline NetworkConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  NetworkConfig cfg = reference_config();
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

// Allocation satisfying the type invariants plus the circuit-power bound.
inline Allocation random_feasible_allocation(std::mt19937_64& rng,
                                             const NetworkConfig& cfg,
                                             const ChannelState& chan) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Allocation alloc;
  alloc.M = 1 + static_cast<int>(u01(rng) * (cfg.L - 1));
  alloc.N = cfg.L - alloc.M;
  const double p0_min = cfg.Pc / (cfg.eta * chan.g_sr);
  alloc.P0 = std::min(cfg.Pmax, p0_min + (cfg.Pmax - p0_min) * u01(rng));
  alloc.P1 = cfg.Pmax * u01(rng);
  alloc.beta = optimal_beta(alloc.P0, chan, cfg) * u01(rng);
  alloc.eigenvalues = optimal_eigenvalues(alloc.M, alloc.N);
  return alloc;
}

}  // namespace relaybc::test
