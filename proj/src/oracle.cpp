#include "relaybc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "relaybc/linmap.hpp"

namespace relaybc {

SolverReport exhaustive_allocate(const ChannelState& chan,
                                 const NetworkConfig& cfg,
                                 const SolverOptions& opts,
                                 std::vector<PerSplitResult>* table) {
  cfg.validate();
  if (cfg.L > 1000) {
    throw std::invalid_argument("exhaustive search guarded to L <= 1000");
  }

  SolverReport best;
  best.failed_stage = "exhaustive: no feasible split";
  bool have_best = false;

  for (int M = 0; M <= cfg.L; ++M) {
    const int N = cfg.L - M;
    PerSplitResult row;
    row.M = M;
    row.N = N;

    Allocation alloc;
    alloc.M = M;
    alloc.N = N;
    PowerSolution pw;
    if (M == 0) {
      pw.feasible = true;  // idle backscatter phase, zero throughput
    } else {
      pw = reoptimize_powers(M, N, chan, cfg, opts);
    }
    if (pw.feasible) {
      alloc.P0 = pw.P0;
      alloc.P1 = pw.P1;
      alloc.beta = pw.beta;
      alloc.eigenvalues = optimal_eigenvalues(M, N);
      const RateBreakdown bd = rate_sum(alloc, chan, cfg);
      row.feasible = true;
      row.P0 = pw.P0;
      row.P1 = pw.P1;
      row.beta = pw.beta;
      row.throughput = bd.r_sum;

      const bool better =
          !have_best || bd.r_sum > best.throughput ||
          (bd.r_sum == best.throughput && M < best.allocation.M);
      if (better) {
        have_best = true;
        best.feasible = true;
        best.failed_stage.clear();
        best.allocation = alloc;
        best.breakdown = bd;
        best.throughput = bd.r_sum;
        best.integer_rule = IntegerRule::floor_rule;
        best.iterations = 1;
        best.continuous.feasible = true;
        best.continuous.rho = static_cast<double>(M) / cfg.L;
        best.continuous.P0 = pw.P0;
        best.continuous.P1 = pw.P1;
        best.continuous.beta = pw.beta;
        best.continuous.t = pw.t;
        best.continuous.branch = chan.g_sd > chan.g_sr
                                     ? ContinuousCase::case2
                                     : (2 * M >= cfg.L
                                            ? ContinuousCase::case1_highrho
                                            : ContinuousCase::case1_lowrho);
      }
    }
    if (table) table->push_back(row);
  }
  return best;
}

std::vector<GapPoint> timesharing_gap(const ChannelState& chan,
                                      const NetworkConfig& cfg_base,
                                      const std::vector<int>& L_list,
                                      const SolverOptions& opts) {
  if (L_list.empty()) {
    throw std::invalid_argument("timesharing_gap needs at least one L");
  }
  std::vector<GapPoint> out;
  out.reserve(L_list.size());
  for (int L : L_list) {
    NetworkConfig cfg = cfg_base;
    cfg.L = L;
    const SolverReport exact = exhaustive_allocate(chan, cfg, opts);
    const SolverReport heur = allocate(chan, cfg, opts);
    GapPoint gp;
    gp.L = L;
    gp.gap = exact.throughput - heur.throughput;
    out.push_back(gp);
  }
  return out;
}

}  // namespace relaybc
