#include "relaybc/linmap.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace relaybc {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;

// log2 det(I + S/x) for Hermitian PSD S, via Cholesky of I + S/x.
double logdet_i_plus(const Eigen::MatrixXcd& S, double x) {
  const auto n = S.rows();
  const double herm_err = (S - S.adjoint()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if (herm_err > 1e-10 * scale) {
    throw std::domain_error("matrix is not Hermitian within tolerance");
  }
  Eigen::MatrixXcd A =
      Eigen::MatrixXcd::Identity(n, n) + (S + S.adjoint()) / (2.0 * x);
  Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("Cholesky factorization failed");
  }
  double acc = 0.0;
  const auto& Lfac = llt.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += std::log(std::real(Lfac(i, i)));
  }
  return 2.0 * acc * kInvLn2;
}

// DFT entry exp(-2*pi*i*j*k/n)/sqrt(n).
std::complex<double> dft_entry(int j, int k, int n) {
  const double phase = -2.0 * std::numbers::pi * j * k / n;
  return std::polar(1.0 / std::sqrt(static_cast<double>(n)), phase);
}

void enumerate_profiles(int parts, int units_left, double step,
                        std::vector<double>& current,
                        const std::function<void(const std::vector<double>&)>& visit) {
  if (parts == 1) {
    current.push_back(units_left * step);
    visit(current);
    current.pop_back();
    return;
  }
  for (int k = 0; k <= units_left; ++k) {
    current.push_back(k * step);
    enumerate_profiles(parts - 1, units_left - k, step, current, visit);
    current.pop_back();
  }
}

}  // namespace

std::vector<double> optimal_eigenvalues(int M, int N) {
  const int k = std::min(M, N);
  if (k <= 0) return {};
  return std::vector<double>(static_cast<std::size_t>(k),
                             static_cast<double>(N) / k);
}

MappingMatrix build_mapping_matrix(int M, int N) {
  if (M < 1 || N < 1) {
    throw std::invalid_argument("mapping matrix needs M >= 1 and N >= 1");
  }
  MappingMatrix map;
  map.G.resize(N, M);
  if (M >= N) {
    // First N rows of the M-point unitary DFT: orthonormal rows.
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < M; ++c) map.G(r, c) = dft_entry(r, c, M);
  } else {
    // First M columns of the N-point unitary DFT, scaled so that
    // G^H G = (N/M) I_M.
    const double s = std::sqrt(static_cast<double>(N) / M);
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < M; ++c) map.G(r, c) = s * dft_entry(r, c, N);
  }
  return map;
}

double numeric_logdet_rate(const MappingMatrix& map, double beta, double P0,
                           double P1, const ChannelState& chan,
                           const NetworkConfig& cfg) {
  const int N = map.rows();
  const int M = map.cols();
  const double h_sd = std::sqrt(chan.g_sd);
  const double h_sr = std::sqrt(chan.g_sr);
  const double h_rd = std::sqrt(chan.g_rd);

  // Unit-power all-ones energy signal makes F = h_sr * I_M.
  Eigen::MatrixXcd H(M + N, M);
  H.setZero();
  const double c_top = std::sqrt(beta * P0) * h_sd * h_sr;
  for (int i = 0; i < M; ++i) H(i, i) = c_top;
  H.bottomRows(N) = std::sqrt(P1) * h_rd * map.G;
  if (!H.allFinite()) {
    throw std::domain_error("non-finite joint channel entries");
  }

  const Eigen::MatrixXcd S = H.adjoint() * H;
  return cfg.Ts * cfg.W / cfg.L * logdet_i_plus(S, chan.noise_bw);
}

double relay_profile_rate(const std::vector<double>& eigenvalues, double beta,
                          double P0, double P1, const ChannelState& chan,
                          const NetworkConfig& cfg) {
  const double gamma_sd = beta * P0 * chan.g_sr * chan.g_sd / chan.noise_bw;
  const double gamma_rd = P1 * chan.g_rd / chan.noise_bw;
  double acc = 0.0;
  for (double lam : eigenvalues) {
    acc += std::log1p(lam * gamma_rd / (1.0 + gamma_sd)) * kInvLn2;
  }
  return cfg.Ts * cfg.W / cfg.L * acc;
}

EigenSearchResult brute_force_eigen_search(int M, int N, double beta,
                                           double P0, double P1,
                                           const ChannelState& chan,
                                           const NetworkConfig& cfg,
                                           double grid_step) {
  const int k = std::min(M, N);
  if (k < 1) throw std::invalid_argument("empty simplex: min(M,N) < 1");
  if (k > 4) {
    throw std::invalid_argument("search-space guard: min(M,N) must be <= 4");
  }
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");

  if (k == 1) {
    std::vector<double> profile{static_cast<double>(N)};
    return {profile, relay_profile_rate(profile, beta, P0, P1, chan, cfg)};
  }

  const int units = std::max(1, static_cast<int>(std::lround(N / grid_step)));
  const double step = static_cast<double>(N) / units;

  EigenSearchResult best;
  best.rate = -1.0;
  std::vector<double> current;
  enumerate_profiles(k, units, step, current,
                     [&](const std::vector<double>& profile) {
                       const double r = relay_profile_rate(profile, beta, P0,
                                                           P1, chan, cfg);
                       // Enumeration is lexicographically ascending, so strict
                       // improvement keeps the first profile on exact ties.
                       if (r > best.rate) {
                         best.rate = r;
                         best.profile = profile;
                       }
                     });
  return best;
}

}  // namespace relaybc
