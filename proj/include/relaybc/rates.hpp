#pragma once

#include "relaybc/network.hpp"

namespace relaybc {

/// Which term attains the achievable throughput
/// r_sum = max(r_sd, min(r_sr, r_relay)).
enum class RateLimiter {
  sd_dominant,          // direct link wins the outer max
  relay_limited,        // the S-R decode rate is the bottleneck
  destination_limited,  // the combined destination rate is the bottleneck
};

const char* to_string(RateLimiter c);

struct RateBreakdown {
  double r_sd = 0.0;     // bits per block
  double r_sr = 0.0;
  double r_relay = 0.0;  // combined destination rate with the optimal profile
  double r_sum = 0.0;
  double gamma_sd = 0.0;  // linear SINRs
  double gamma_sr = 0.0;
  double gamma_rd = 0.0;
  RateLimiter case_label = RateLimiter::sd_dominant;
};

// Direct-link rate: (M/L)*Ts*W*log2(1 + beta*P0*g_sr*g_sd/noise_bw).
double rate_sd(const Allocation& alloc, const ChannelState& chan,
               const NetworkConfig& cfg);

// Backscatter decode rate at the HAP: g_sr^2 in place of g_sr*g_sd.
double rate_sr(const Allocation& alloc, const ChannelState& chan,
               const NetworkConfig& cfg);

// Combined destination rate with the uniform relay power profile.
// Two-branch closed form; the degenerate M=0, N>0 split is defined as 0.
double rate_relay_combined(const Allocation& alloc, const ChannelState& chan,
                           const NetworkConfig& cfg);

RateBreakdown rate_sum(const Allocation& alloc, const ChannelState& chan,
                       const NetworkConfig& cfg);

// Comparator used by earlier continuous-time treatments: replaces the
// combined destination rate with R_SD + R_RD. Never below rate_sum.
double rate_sum_upper(const Allocation& alloc, const ChannelState& chan,
                      const NetworkConfig& cfg);

// Equal-split throughput (Ts*W/2)*log2(1 + max[g_sd, min(g_sr, g_sd+g_rd)])
// in SINR terms; equals rate_sum whenever M == N.
double equal_time_reference(const ChannelState& chan, const NetworkConfig& cfg,
                            double beta, double P0, double P1);

/// Three-way classification of where the decode rate sits relative to the
/// two destination rates, which fixes the relation between the upper bound
/// and the achievable throughput.
enum class UpperBoundCase {
  destination_limited,  // r_sr >= upper combined rate  => bound >= sum
  decode_limited,       // r_sr <  r_relay              => bound == sum
  straddling,           // r_relay <= r_sr < upper rate => bound >= sum
};

const char* to_string(UpperBoundCase c);

// True exactly when the case forces rate_sum_upper == rate_sum.
bool upper_bound_tight(UpperBoundCase c);

UpperBoundCase classify_case(const Allocation& alloc, const ChannelState& chan,
                             const NetworkConfig& cfg);

}  // namespace relaybc
