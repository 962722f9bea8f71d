#pragma once

#include <string>
#include <vector>

namespace relaybc {

struct Coord {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Coord& a, const Coord& b);

/// Scenario parameters: geometry, path-loss model, radio constants and the
/// HAP power budgets. All values are linear SI units; dBm conversion happens
/// at JSON ingestion only.
struct NetworkConfig {
  Coord coord_s;  // IoT node
  Coord coord_r;  // HAP (power beacon / relay)
  Coord coord_d;  // receiver

  double alpha1 = 2.7;  // path-loss exponent, S-D
  double alpha2 = 2.7;  // path-loss exponent, S-R
  double alpha3 = 2.7;  // path-loss exponent, R-D

  double xi_sd = 1.0;  // small-scale fading power gains
  double xi_sr = 1.0;
  double xi_rd = 1.0;

  double Ts = 0.01;      // block duration [s]
  double W = 1.0e4;      // bandwidth [Hz]
  double sigma2 = 1e-13; // noise PSD [W/Hz]
  double eta = 0.5;      // energy conversion efficiency
  double Pc = 2e-4;      // backscatter circuit power [W]
  double P = 20.0;       // HAP average-power budget [W]; block energy E = P*Ts
  double Pmax = 20.0;    // HAP peak transmit power [W]
  int L = 20;            // subframes per block

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;

  // The bundled reference scenario: S=(0,0), R=(20,20), D=(100,0),
  // Ts=10ms, W=10kHz, sigma2=-100dBm/Hz, eta=0.5, Pc=200uW, P=20W.
  static NetworkConfig reference();
};

/// Link power gains |h|^2 = xi * d^(-alpha) plus the W*sigma2 product every
/// rate expression divides by.
struct ChannelState {
  double g_sd = 0.0;
  double g_sr = 0.0;
  double g_rd = 0.0;
  double noise_bw = 0.0;  // W * sigma2 [W]
};

// Throws std::domain_error when two coordinates coincide.
ChannelState channel_gains(const NetworkConfig& cfg);

/// One block's decision variables: the subframe split, the HAP transmit
/// powers, the IoT node's power reflection coefficient and the relay
/// re-encoding power profile (eigenvalues of G*G^H).
struct Allocation {
  int M = 0;  // backscatter subframes
  int N = 0;  // relay subframes
  double P0 = 0.0;
  double P1 = 0.0;
  double beta = 0.0;
  std::vector<double> eigenvalues;  // min(M,N) entries summing to N
};

// Energy harvested by the IoT node over one block: (M/L)*Ts*eta*(1-beta)*P0*g_sr.
double harvested_energy(const Allocation& alloc, const ChannelState& chan,
                        const NetworkConfig& cfg);

struct ConstraintViolation {
  std::string name;   // "C1", "C2", ...
  double slack;       // negative = violated by that amount
};

// Evaluates C1..C7 on an allocation. Empty result = feasible. Infeasibility
// is data, not an error. rel_tol applies to the equality constraints C3, C5.
std::vector<ConstraintViolation> check_constraints(const Allocation& alloc,
                                                   const ChannelState& chan,
                                                   const NetworkConfig& cfg,
                                                   double rel_tol = 1e-9);

/// Constants of the reparameterized rate expressions after the optimal PRC
/// substitution. Either may be negative; they are stored as-is.
struct FeasibilityConstants {
  double A = 1.0;  // 1 - Pc*g_sr/(eta*W*sigma2)
  double B = 1.0;  // 1 - Pc*g_sd/(eta*W*sigma2)
};

FeasibilityConstants feasibility_constants(const ChannelState& chan,
                                           const NetworkConfig& cfg);

}  // namespace relaybc
