#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spinsync/config.hpp"
#include "spinsync/hilbert.hpp"
#include "spinsync/trace.hpp"

namespace spinsync::stoch {

std::uint64_t splitmix64(std::uint64_t& state);
// Counter-based per-trajectory seed: scramble(master + (index+1) * golden).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

// Gaussian increments dW ~ N(0, gamma * dt), Box-Muller over splitmix64.
std::vector<double> sample_noise_path(std::uint64_t seed, int n_steps, double gamma, double dt);

// One realization, spin register: per internal step the exact unitary of the
// frozen increment, psi <- exp(-i(H dt + V dW)) psi (truncated Taylor; the
// step norm is guarded). Channels sz_1..sz_n on the output grid.
Trace evolve_trajectory(const Vec& psi0, const Mat& h, const Mat& v,
                        const std::vector<double>& path, double t_max, double dt_out,
                        double dt_int);

// Same realization in the correlation-matrix picture: Z = psi psi^dag stays
// rank one, psi (length n) steps by exp(+i(Omega dt + 2Y dW)).
Trace evolve_trajectory_z(const Vec& psi0, const RMat& omega, const std::vector<int>& sites,
                          const std::vector<double>& path, double t_max, double dt_out,
                          double dt_int);

struct EnsembleResult {
  std::vector<double> tau;
  std::vector<std::string> names;  // sz_1..sz_n
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> se;
  int trajectories = 0;
};

enum class TrajectoryPicture { Spin, Correlation };

using SeedFn = std::function<std::uint64_t(std::uint64_t, std::uint64_t)>;

// Mean and standard error over m trajectories seeded from master_seed.
// Reduction order is fixed by trajectory index (blockwise), so the result is
// bitwise identical for any worker count; seed_fn overrides split_seed.
EnsembleResult ensemble_average(const ChainConfig& cfg, int m, std::uint64_t master_seed,
                                TrajectoryPicture picture = TrajectoryPicture::Correlation,
                                ExecMode mode = ExecMode::OpenMP, const SeedFn& seed_fn = {});

}  // namespace spinsync::stoch
