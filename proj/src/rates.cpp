#include "relaybc/rates.hpp"

#include <algorithm>
#include <cmath>

namespace relaybc {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;

double log2_1p(double x) { return std::log1p(x) * kInvLn2; }

struct Sinrs {
  double sd, sr, rd;
};

Sinrs sinrs(const Allocation& alloc, const ChannelState& chan) {
  Sinrs s;
  s.sd = alloc.beta * alloc.P0 * chan.g_sr * chan.g_sd / chan.noise_bw;
  s.sr = alloc.beta * alloc.P0 * chan.g_sr * chan.g_sr / chan.noise_bw;
  s.rd = alloc.P1 * chan.g_rd / chan.noise_bw;
  return s;
}

// R_RD: what the relay-destination link alone would carry over N subframes.
double rate_rd_alone(const Allocation& alloc, const ChannelState& chan,
                     const NetworkConfig& cfg) {
  const Sinrs s = sinrs(alloc, chan);
  return cfg.Ts * cfg.W * alloc.N / cfg.L * log2_1p(s.rd);
}

}  // namespace

const char* to_string(RateLimiter c) {
  switch (c) {
    case RateLimiter::sd_dominant: return "SD-dominant";
    case RateLimiter::relay_limited: return "relay-limited";
    case RateLimiter::destination_limited: return "destination-limited";
  }
  return "?";
}

const char* to_string(UpperBoundCase c) {
  switch (c) {
    case UpperBoundCase::destination_limited: return "destination-limited";
    case UpperBoundCase::decode_limited: return "decode-limited";
    case UpperBoundCase::straddling: return "straddling";
  }
  return "?";
}

double rate_sd(const Allocation& alloc, const ChannelState& chan,
               const NetworkConfig& cfg) {
  const Sinrs s = sinrs(alloc, chan);
  return cfg.Ts * cfg.W * alloc.M / cfg.L * log2_1p(s.sd);
}

double rate_sr(const Allocation& alloc, const ChannelState& chan,
               const NetworkConfig& cfg) {
  const Sinrs s = sinrs(alloc, chan);
  return cfg.Ts * cfg.W * alloc.M / cfg.L * log2_1p(s.sr);
}

double rate_relay_combined(const Allocation& alloc, const ChannelState& chan,
                           const NetworkConfig& cfg) {
  const Sinrs s = sinrs(alloc, chan);
  const double tw = cfg.Ts * cfg.W;
  const int M = alloc.M;
  const int N = alloc.N;
  if (N == 0) return rate_sd(alloc, chan, cfg);
  if (M == 0) return 0.0;  // nothing reaches the relay to forward
  if (M >= N) {
    return tw * N / cfg.L * log2_1p(s.sd + s.rd) +
           tw * (M - N) / cfg.L * log2_1p(s.sd);
  }
  return tw * M / cfg.L *
         log2_1p(s.sd + static_cast<double>(N) / M * s.rd);
}

RateBreakdown rate_sum(const Allocation& alloc, const ChannelState& chan,
                       const NetworkConfig& cfg) {
  RateBreakdown r;
  const Sinrs s = sinrs(alloc, chan);
  r.gamma_sd = s.sd;
  r.gamma_sr = s.sr;
  r.gamma_rd = s.rd;
  r.r_sd = rate_sd(alloc, chan, cfg);
  r.r_sr = rate_sr(alloc, chan, cfg);
  r.r_relay = rate_relay_combined(alloc, chan, cfg);
  const double inner = std::min(r.r_sr, r.r_relay);
  r.r_sum = std::max(r.r_sd, inner);
  if (r.r_sd >= inner) {
    r.case_label = RateLimiter::sd_dominant;
  } else if (r.r_sr <= r.r_relay) {
    r.case_label = RateLimiter::relay_limited;
  } else {
    r.case_label = RateLimiter::destination_limited;
  }
  return r;
}

double rate_sum_upper(const Allocation& alloc, const ChannelState& chan,
                      const NetworkConfig& cfg) {
  const double r_sd = rate_sd(alloc, chan, cfg);
  const double r_sr = rate_sr(alloc, chan, cfg);
  const double r_d0 = r_sd + rate_rd_alone(alloc, chan, cfg);
  return std::max(r_sd, std::min(r_sr, r_d0));
}

double equal_time_reference(const ChannelState& chan, const NetworkConfig& cfg,
                            double beta, double P0, double P1) {
  const double g_sd = beta * P0 * chan.g_sr * chan.g_sd / chan.noise_bw;
  const double g_sr = beta * P0 * chan.g_sr * chan.g_sr / chan.noise_bw;
  const double g_rd = P1 * chan.g_rd / chan.noise_bw;
  const double arg = std::max(g_sd, std::min(g_sr, g_sd + g_rd));
  return cfg.Ts * cfg.W / 2.0 * log2_1p(arg);
}

bool upper_bound_tight(UpperBoundCase c) {
  return c == UpperBoundCase::decode_limited;
}

UpperBoundCase classify_case(const Allocation& alloc, const ChannelState& chan,
                             const NetworkConfig& cfg) {
  const double r_sr = rate_sr(alloc, chan, cfg);
  const double r_d0 =
      rate_sd(alloc, chan, cfg) + rate_rd_alone(alloc, chan, cfg);
  const double r_relay = rate_relay_combined(alloc, chan, cfg);
  if (r_sr >= r_d0) return UpperBoundCase::destination_limited;
  if (r_sr < r_relay) return UpperBoundCase::decode_limited;
  return UpperBoundCase::straddling;
}

}  // namespace relaybc
