#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaybc/convex.hpp"
#include "relaybc/network.hpp"
#include "relaybc/rates.hpp"
#include "relaybc/surrogates.hpp"

namespace relaybc {

enum class ContinuousCase { case1_highrho, case1_lowrho, case2 };

const char* to_string(ContinuousCase c);

/// Solution of the time-shared relaxation, before integer conversion.
/// rho is the backscatter time share; t the auxiliary min-rate objective.
/// The optimal PRC is always beta = 1 - Pc/(eta*P0*g_sr).
struct ContinuousSolution {
  bool feasible = false;
  std::string failed_stage;
  double P0 = 0.0;
  double P1 = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  double t = 0.0;  // bits per block
  ContinuousCase branch = ContinuousCase::case2;
};

struct ScaIterate {
  double rho = 0.0, a = 0.0, b = 0.0, t = 0.0;
};

enum class IntegerRule { floor_rule, ceil_rule, tie_floor, tie_ceil };

const char* to_string(IntegerRule r);

struct SolverOptions {
  double sca_tol = 1e-6;     // stop when t improves less than this (relative)
  int sca_max_iter = 300;    // the budget surrogate can make the iteration
                             // crawl; an exact share search finishes the job
                             // when the cap is exhausted
  double bisect_tol = 1e-9;  // time-share accuracy of the 1-D branch
  double rho0 = 0.7;         // SCA starting point
  double a0 = 6.0;
  std::optional<double> b0;  // default: P*(1-rho0)/2 projected feasible
  KernelOptions kernel;
};

struct SolverReport {
  bool feasible = false;
  std::string failed_stage;
  Allocation allocation;
  double throughput = 0.0;  // bits per block, rate_sum on the allocation
  RateBreakdown breakdown;
  ContinuousSolution continuous;
  std::vector<ScaIterate> sca_trace;
  IntegerRule integer_rule = IntegerRule::floor_rule;
  int iterations = 0;             // outer iterations of the continuous stage
  long log_guard_activations = 0; // must stay 0 on feasible runs
};

// Throughput-maximizing PRC for a given carrier power. Throws
// std::domain_error when P0 cannot power the backscatter circuit.
double optimal_beta(double P0, const ChannelState& chan,
                    const NetworkConfig& cfg);

// Convexified iteration on the rho >= 1/2 branch (auxiliary variables
// a = P0(1-rho), b = P1(1-rho); surrogate program rebuilt at each point).
ContinuousSolution solve_case1_highrho(const ChannelState& chan,
                                       const NetworkConfig& cfg,
                                       const SolverOptions& opts,
                                       std::vector<ScaIterate>* trace = nullptr,
                                       LogGuard* guard = nullptr);

// Single concave solve of the rho < 1/2 branch in u = P0*rho,
// v = P1*(1-rho).
ContinuousSolution solve_case1_lowrho(const ChannelState& chan,
                                      const NetworkConfig& cfg,
                                      const SolverOptions& opts,
                                      LogGuard* guard = nullptr);

// Runs both branches and keeps the larger objective.
ContinuousSolution solve_case1(const ChannelState& chan,
                               const NetworkConfig& cfg,
                               const SolverOptions& opts,
                               std::vector<ScaIterate>* trace = nullptr,
                               LogGuard* guard = nullptr);

// Direct-link-dominant case: P1 = 0, P0 = P/rho, concave 1-D maximization
// over the time share by monotonicity or bisection.
ContinuousSolution solve_case2(const ChannelState& chan,
                               const NetworkConfig& cfg,
                               const SolverOptions& opts);

struct IntegerSplit {
  int M = 0;
  int N = 0;
  IntegerRule rule = IntegerRule::floor_rule;
};

// Budget-preserving rounding of M* = rho*L: floor when P0 > P1, ceil when
// P0 < P1 (relative tolerance 1e-6), otherwise the better of the two
// candidates with ties to floor.
IntegerSplit integer_convert(const ContinuousSolution& cont,
                             const ChannelState& chan,
                             const NetworkConfig& cfg);

struct PowerSolution {
  bool feasible = false;
  std::string failed_stage;
  double P0 = 0.0;
  double P1 = 0.0;
  double beta = 0.0;
  double t = 0.0;
};

// Re-optimizes the transmit powers at a fixed integer split: a concave
// program when g_sd <= g_sr, the closed form P0 = P*L/M, P1 = 0 otherwise.
PowerSolution reoptimize_powers(int M, int N, const ChannelState& chan,
                                const NetworkConfig& cfg,
                                const SolverOptions& opts,
                                LogGuard* guard = nullptr);

// Full pipeline: case dispatch, continuous solve, integer conversion,
// power re-optimization, final constraint audit and throughput evaluation.
SolverReport allocate(const ChannelState& chan, const NetworkConfig& cfg,
                      const SolverOptions& opts = {});

}  // namespace relaybc
