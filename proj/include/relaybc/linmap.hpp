#pragma once

#include <Eigen/Dense>
#include <vector>

#include "relaybc/network.hpp"

namespace relaybc {

// Uniform relay power profile N/min(M,N), length min(M,N).
// Empty when either phase has no subframes.
std::vector<double> optimal_eigenvalues(int M, int N);

/// N x M re-encoding matrix G. Satisfies (1/N)tr(G G^H) = 1, and
/// G G^H = I_N when M >= N, G^H G = (N/M) I_M when M < N.
struct MappingMatrix {
  Eigen::MatrixXcd G;
  int rows() const { return static_cast<int>(G.rows()); }  // N
  int cols() const { return static_cast<int>(G.cols()); }  // M
};

// Rows (or scaled columns) of a unitary DFT matrix; any unitary completion
// with the same Gram spectrum is equivalent.
MappingMatrix build_mapping_matrix(int M, int N);

// Stacks the two receive blocks into the (M+N) x M joint channel and returns
// (Ts*W/L) * log2 det(I_M + H^H H / noise_bw) via Cholesky.
// Throws std::domain_error on non-finite entries.
double numeric_logdet_rate(const MappingMatrix& map, double beta, double P0,
                           double P1, const ChannelState& chan,
                           const NetworkConfig& cfg);

struct EigenSearchResult {
  std::vector<double> profile;
  double rate;  // best relay-phase contribution, bits per block
};

// Enumerates profiles on the simplex {lambda >= 0, sum = N} with the given
// grid step and maximizes the relay-phase rate term. Guarded to
// min(M,N) <= 4; ties go to the lexicographically first profile.
EigenSearchResult brute_force_eigen_search(int M, int N, double beta,
                                           double P0, double P1,
                                           const ChannelState& chan,
                                           const NetworkConfig& cfg,
                                           double grid_step);

// Relay-phase rate for an arbitrary profile:
// (Ts*W/L) * sum_i log2(1 + lambda_i * gamma_rd / (1 + gamma_sd)).
double relay_profile_rate(const std::vector<double>& eigenvalues, double beta,
                          double P0, double P1, const ChannelState& chan,
                          const NetworkConfig& cfg);

}  // namespace relaybc
