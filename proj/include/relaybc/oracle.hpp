#pragma once

#include <vector>

#include "relaybc/allocator.hpp"

namespace relaybc {

struct PerSplitResult {
  int M = 0;
  int N = 0;
  bool feasible = false;
  double P0 = 0.0;
  double P1 = 0.0;
  double beta = 0.0;
  double throughput = 0.0;
};

// Ground-truth baseline: enumerates every subframe split, solves the
// per-split power problem (closed form when the direct link dominates,
// concave program otherwise) and returns the best. Ties go to the smaller
// M. Guarded to L <= 1000. The optional table receives one row per split.
SolverReport exhaustive_allocate(const ChannelState& chan,
                                 const NetworkConfig& cfg,
                                 const SolverOptions& opts = {},
                                 std::vector<PerSplitResult>* table = nullptr);

struct GapPoint {
  int L = 0;
  double gap = 0.0;  // exhaustive minus three-step throughput, bits/block
};

// Relaxation cost of the continuous time share as the block grows finer.
std::vector<GapPoint> timesharing_gap(const ChannelState& chan,
                                      const NetworkConfig& cfg_base,
                                      const std::vector<int>& L_list,
                                      const SolverOptions& opts = {});

}  // namespace relaybc
