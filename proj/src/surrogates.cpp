#include "relaybc/surrogates.hpp"

#include <algorithm>
#include <cmath>

namespace relaybc {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kSoftFloor = 0.5;

double log2_guarded(double x, LogGuard* guard) {
  static thread_local LogGuard fallback;
  LogGuard* g = guard ? guard : &fallback;
  return std::log2(g->clamp(x));
}

}  // namespace

double log2_soft(double x) {
  if (x >= kSoftFloor) return std::log2(x);
  return std::log2(kSoftFloor) + (x - kSoftFloor) / (kSoftFloor * kLn2);
}

double dlog2_soft(double x) {
  return 1.0 / (std::max(x, kSoftFloor) * kLn2);
}

ReducedRates ReducedRates::make(const ChannelState& chan,
                                const NetworkConfig& cfg) {
  ReducedRates rr;
  const FeasibilityConstants fc = feasibility_constants(chan, cfg);
  rr.TsW = cfg.Ts * cfg.W;
  rr.A = fc.A;
  rr.B = fc.B;
  rr.csr = chan.g_sr * chan.g_sr / chan.noise_bw;
  rr.csd = chan.g_sr * chan.g_sd / chan.noise_bw;
  rr.crd = chan.g_rd / chan.noise_bw;
  return rr;
}

double ReducedRates::r_sd(double rho, double P0, LogGuard* guard) const {
  return TsW * rho * log2_guarded(B + P0 * csd, guard);
}

double ReducedRates::r_sr(double rho, double P0, LogGuard* guard) const {
  return TsW * rho * log2_guarded(A + P0 * csr, guard);
}

double ReducedRates::r_d(double rho, double P0, double P1,
                         LogGuard* guard) const {
  if (rho >= 0.5) {
    return TsW * (1.0 - rho) * log2_guarded(B + P0 * csd + P1 * crd, guard) +
           TsW * (2.0 * rho - 1.0) * log2_guarded(B + P0 * csd, guard);
  }
  if (rho <= 0.0) return 0.0;
  return TsW * rho *
         log2_guarded(B + P0 * csd + (1.0 - rho) * P1 * crd / rho, guard);
}

double sca_y(double rho) { return 1.0 / rho; }

double sca_f(double rho, double b) { return b / rho; }

double sca_g(const ReducedRates& rr, double rho, double a, LogGuard* guard) {
  return rr.TsW * rho * log2_guarded(rr.A + a * rr.csr / (1.0 - rho), guard);
}

double sca_w(const ReducedRates& rr, double rho, double a, LogGuard* guard) {
  return rr.TsW * (2.0 * rho - 1.0) *
         log2_guarded(rr.B + a * rr.csd / (1.0 - rho), guard);
}

double sca_e(const ReducedRates& rr, double rho, double a, double b,
             LogGuard* guard) {
  const double s = 1.0 - rho;
  return rr.TsW * s *
         log2_guarded(rr.B + (a * rr.csd + b * rr.crd) / s, guard);
}

SurrogatePoint make_surrogate_point(double rho, double a, double b,
                                    const ChannelState& chan,
                                    const NetworkConfig& cfg) {
  const ReducedRates rr = ReducedRates::make(chan, cfg);
  SurrogatePoint pt;
  pt.rho = rho;
  pt.a = a;
  pt.b = b;

  pt.y = 1.0 / rho;
  pt.y_rho = -1.0 / (rho * rho);

  pt.f = b / rho;
  pt.f_rho = -b / (rho * rho);
  pt.f_b = 1.0 / rho;
  pt.f_rhorho = 2.0 * b / (rho * rho * rho);

  const double s = 1.0 - rho;
  const double ga = rr.A + a * rr.csr / s;   // decode-rate log argument
  const double gb = rr.B + a * rr.csd / s;   // direct-rate log argument

  pt.g = rr.TsW * rho * std::log2(ga);
  pt.g_rho = rr.TsW * std::log2(ga) +
             rr.TsW * rho * (a * rr.csr / (s * s)) / (ga * kLn2);
  pt.g_a = rr.TsW * rho * (rr.csr / s) / (ga * kLn2);
  pt.g_aa = -rr.TsW * rho * (rr.csr / s) * (rr.csr / s) / (ga * ga * kLn2);

  pt.w = rr.TsW * (2.0 * rho - 1.0) * std::log2(gb);
  pt.w_rho = 2.0 * rr.TsW * std::log2(gb) +
             rr.TsW * (2.0 * rho - 1.0) * (a * rr.csd / (s * s)) / (gb * kLn2);
  pt.w_a = rr.TsW * (2.0 * rho - 1.0) * (rr.csd / s) / (gb * kLn2);
  pt.w_aa = -rr.TsW * (2.0 * rho - 1.0) * (rr.csd / s) * (rr.csd / s) /
            (gb * gb * kLn2);

  return pt;
}

double SurrogateBundle::y_lb(double rho) const {
  return pt.y + pt.y_rho * (rho - pt.rho);
}

double SurrogateBundle::f_ub(double rho, double b) const {
  const double dr = rho - pt.rho;
  return pt.f + pt.f_rho * dr + pt.f_b * (b - pt.b) + pt.f_rhorho * dr * dr;
}

double SurrogateBundle::g_lb(double rho, double a) const {
  const double da = a - pt.a;
  return pt.g + pt.g_rho * (rho - pt.rho) + pt.g_a * da + pt.g_aa * da * da;
}

double SurrogateBundle::w_lb(double rho, double a) const {
  const double da = a - pt.a;
  return pt.w + pt.w_rho * (rho - pt.rho) + pt.w_a * da + pt.w_aa * da * da;
}

SurrogateBundle sca_surrogates(const SurrogatePoint& pt) { return {pt}; }

}  // namespace relaybc
