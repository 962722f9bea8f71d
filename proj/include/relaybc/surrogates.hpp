#pragma once

#include "relaybc/network.hpp"

namespace relaybc {

/// Counts how often a log argument had to be clamped at the 1e-12 floor.
/// Feasible iterates never trigger it; a nonzero count flags a solver bug.
struct LogGuard {
  long activations = 0;
  double floor_at = 1e-12;
  double clamp(double x) {
    if (x < floor_at) {
      ++activations;
      return floor_at;
    }
    return x;
  }
};

// log2 extended below 0.5 by its tangent line: concave, C^1, exact on
// [0.5, inf). Keeps barrier and phase-1 steps consistent when a probe
// leaves a log argument's domain; feasible iterates never reach the
// extension (their arguments stay >= 1).
double log2_soft(double x);
// d/dx of log2_soft.
double dlog2_soft(double x);

/// The reduced rate expressions after the optimal-PRC substitution, shared
/// by the continuous solvers, the fixed-split power re-optimization and the
/// report audits. rho is the backscatter time share (M/L for integer splits).
struct ReducedRates {
  double TsW = 0.0;
  double A = 1.0;
  double B = 1.0;
  double csr = 0.0;  // g_sr^2   / noise_bw
  double csd = 0.0;  // g_sr*g_sd/ noise_bw
  double crd = 0.0;  // g_rd     / noise_bw

  static ReducedRates make(const ChannelState& chan, const NetworkConfig& cfg);

  double r_sd(double rho, double P0, LogGuard* guard = nullptr) const;
  double r_sr(double rho, double P0, LogGuard* guard = nullptr) const;
  // Two-branch combined destination rate; branches agree at rho = 1/2.
  double r_d(double rho, double P0, double P1, LogGuard* guard = nullptr) const;
};

/// Expansion point of the convexification used on the rho >= 1/2 branch,
/// in the decoupled variables a = P0(1-rho), b = P1(1-rho). Holds the four
/// helper functions' values and the partial derivatives entering the
/// first-order surrogates.
struct SurrogatePoint {
  double rho = 0.0, a = 0.0, b = 0.0;
  double y = 0.0, y_rho = 0.0;
  double f = 0.0, f_rho = 0.0, f_b = 0.0, f_rhorho = 0.0;
  double g = 0.0, g_rho = 0.0, g_a = 0.0, g_aa = 0.0;
  double w = 0.0, w_rho = 0.0, w_a = 0.0, w_aa = 0.0;
};

/// Original nonconvex pieces of the decoupled problem.
///   y = 1/rho                        (budget reciprocal)
///   f = b/rho                        (budget cross term)
///   g = TsW rho log2(A + a csr/(1-rho))      (decode rate)
///   w = TsW (2rho-1) log2(B + a csd/(1-rho)) (direct-surplus rate)
///   e = TsW (1-rho) log2(B + (a csd + b crd)/(1-rho)), jointly concave.
double sca_y(double rho);
double sca_f(double rho, double b);
double sca_g(const ReducedRates& rr, double rho, double a,
             LogGuard* guard = nullptr);
double sca_w(const ReducedRates& rr, double rho, double a,
             LogGuard* guard = nullptr);
double sca_e(const ReducedRates& rr, double rho, double a, double b,
             LogGuard* guard = nullptr);

SurrogatePoint make_surrogate_point(double rho, double a, double b,
                                    const ChannelState& chan,
                                    const NetworkConfig& cfg);

/// The four closed-form surrogates anchored at an expansion point: a linear
/// minorant of y, a convex quadratic majorant of f and concave quadratic
/// minorants of g and w. All match value and gradient at the point.
struct SurrogateBundle {
  SurrogatePoint pt;
  double y_lb(double rho) const;
  double f_ub(double rho, double b) const;
  double g_lb(double rho, double a) const;
  double w_lb(double rho, double a) const;
};

SurrogateBundle sca_surrogates(const SurrogatePoint& pt);

}  // namespace relaybc
