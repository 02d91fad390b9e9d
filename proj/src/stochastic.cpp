#include "spinsync/stochastic.hpp"

#include <cmath>
#include <stdexcept>

#include "spinsync/jw.hpp"

namespace spinsync::stoch {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

struct StepGrid {
  int n_out;
  int per_out;
  double dt_eff;
};

StepGrid make_grid(double t_max, double dt_out, double dt_int) {
  if (t_max <= 0.0 || dt_out <= 0.0 || dt_int <= 0.0)
    throw std::invalid_argument("time grid parameters must be positive");
  StepGrid g;
  g.n_out = static_cast<int>(std::lround(t_max / dt_out));
  g.per_out = std::max(1, static_cast<int>(std::lround(dt_out / dt_int)));
  g.dt_eff = dt_out / g.per_out;
  return g;
}

void check_path(const std::vector<double>& path, const StepGrid& g) {
  if (static_cast<long long>(path.size()) < static_cast<long long>(g.n_out) * g.per_out)
    throw std::invalid_argument("noise path shorter than the step grid");
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += golden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master + (index + 1) * golden;
  return splitmix64(state);
}

std::vector<double> sample_noise_path(std::uint64_t seed, int n_steps, double gamma, double dt) {
  if (n_steps < 0) throw std::invalid_argument("negative step count");
  if (gamma < 0.0 || dt <= 0.0) throw std::invalid_argument("invalid noise path parameters");
  double sigma = std::sqrt(gamma * dt);
  std::vector<double> path(n_steps);
  std::uint64_t state = seed;
  for (int i = 0; i < n_steps; i += 2) {
    double u1 = ((splitmix64(state) >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = (splitmix64(state) >> 11) * 0x1.0p-53;        // [0, 1)
    double r = std::sqrt(-2.0 * std::log(u1));
    path[i] = sigma * r * std::cos(2.0 * pi * u2);
    if (i + 1 < n_steps) path[i + 1] = sigma * r * std::sin(2.0 * pi * u2);
  }
  return path;
}

Trace evolve_trajectory(const Vec& psi0, const Mat& h, const Mat& v,
                        const std::vector<double>& path, double t_max, double dt_out,
                        double dt_int) {
  StepGrid grid = make_grid(t_max, dt_out, dt_int);
  check_path(path, grid);
  int dim = static_cast<int>(psi0.size());
  if (h.rows() != dim || v.rows() != dim)
    throw std::invalid_argument("operator/state dimension mismatch");
  int n = 0;
  while ((1 << n) < dim) ++n;
  if ((1 << n) != dim) throw std::invalid_argument("state dimension is not a power of two");

  SparseApply hs(h), vs(v);
  Vec psi = psi0, acc(dim), term(dim), th(dim), tv(dim);

  Trace t;
  t.tau.resize(grid.n_out + 1);
  for (int s = 1; s <= n; ++s) t.add("sz_" + std::to_string(s));
  for (auto& c : t.cols) c.resize(grid.n_out + 1);
  auto record = [&](int i) {
    t.tau[i] = i * dt_out;
    for (int s = 1; s <= n; ++s) t.cols[s - 1][i] = expect_local_z_state(psi, s);
  };

  record(0);
  size_t step = 0;
  for (int i = 1; i <= grid.n_out; ++i) {
    for (int s = 0; s < grid.per_out; ++s, ++step) {
      double dw = path[step];
      double theta = grid.dt_eff * hs.norm1 + std::abs(dw) * vs.norm1;
      if (theta > 2.0)
        throw std::runtime_error("noise increment too large for the exponential series; reduce dt_internal");
      acc = psi;
      term = psi;
      for (int order = 1; order <= 24; ++order) {
        hs.vec(term, th);
        vs.vec(term, tv);
        term = (-I / double(order)) * (grid.dt_eff * th + dw * tv);
        acc += term;
        if (term.norm() < 1e-16 * acc.norm()) break;
      }
      psi = acc;
    }
    record(i);
  }
  return t;
}

Trace evolve_trajectory_z(const Vec& psi0, const RMat& omega, const std::vector<int>& sites,
                          const std::vector<double>& path, double t_max, double dt_out,
                          double dt_int) {
  StepGrid grid = make_grid(t_max, dt_out, dt_int);
  check_path(path, grid);
  int n = static_cast<int>(psi0.size());
  if (omega.rows() != n) throw std::invalid_argument("operator/state dimension mismatch");
  RVec y = RVec::Zero(n);
  for (int u : sites) {
    if (u < 1 || u > n) throw std::invalid_argument("noise site out of range: " + std::to_string(u));
    y(u - 1) = 1.0;
  }
  double omega_norm1 = omega.cwiseAbs().colwise().sum().maxCoeff();

  Vec psi = psi0, acc(n), term(n), tmp(n);
  Trace t;
  t.tau.resize(grid.n_out + 1);
  for (int s = 1; s <= n; ++s) t.add("sz_" + std::to_string(s));
  for (auto& c : t.cols) c.resize(grid.n_out + 1);
  auto record = [&](int i) {
    t.tau[i] = i * dt_out;
    for (int s = 1; s <= n; ++s) t.cols[s - 1][i] = 2.0 * std::norm(psi(s - 1)) - 1.0;
  };

  record(0);
  size_t step = 0;
  for (int i = 1; i <= grid.n_out; ++i) {
    for (int s = 0; s < grid.per_out; ++s, ++step) {
      double dw = path[step];
      double theta = grid.dt_eff * omega_norm1 + 2.0 * std::abs(dw);
      if (theta > 2.0)
        throw std::runtime_error("noise increment too large for the exponential series; reduce dt_internal");
      acc = psi;
      term = psi;
      for (int order = 1; order <= 24; ++order) {
        tmp = grid.dt_eff * (omega * term);
        tmp.array() += (2.0 * dw) * y.array().cast<cplx>() * term.array();
        term = (I / double(order)) * tmp;
        acc += term;
        if (term.norm() < 1e-16 * acc.norm()) break;
      }
      psi = acc;
    }
    record(i);
  }
  return t;
}

EnsembleResult ensemble_average(const ChainConfig& cfg, int m, std::uint64_t master_seed,
                                TrajectoryPicture picture, ExecMode mode, const SeedFn& seed_fn) {
  cfg.validate();
  if (m < 2) throw std::invalid_argument("ensemble needs at least two trajectories");
  StepGrid grid = make_grid(cfg.t_max, cfg.dt, cfg.dt_internal);
  int total_steps = grid.n_out * grid.per_out;

  RMat omega;
  Mat h, v;
  Vec psi0;
  if (picture == TrajectoryPicture::Correlation) {
    omega = jw::build_omega(cfg.n, cfg.j, cfg.g, jw::Parity::Odd, cfg.detuning);
    psi0 = Vec::Zero(cfg.n);
    psi0(0) = 1.0;
  } else {
    h = build_hamiltonian(cfg);
    v = build_noise_operator(cfg.noise_sites, cfg.n);
    psi0 = basis_state({1}, cfg.n);
  }

  int n_t = grid.n_out + 1;
  int block_size = 64;
  int n_blocks = (m + block_size - 1) / block_size;
  std::vector<RMat> bsum(n_blocks), bsq(n_blocks);

#pragma omp parallel for schedule(dynamic) if (mode == ExecMode::OpenMP)
  for (int b = 0; b < n_blocks; ++b) {
    RMat sum = RMat::Zero(cfg.n, n_t), sq = RMat::Zero(cfg.n, n_t);
    int lo = b * block_size, hi = std::min(m, lo + block_size);
    for (int i = lo; i < hi; ++i) {
      std::uint64_t seed = seed_fn ? seed_fn(master_seed, static_cast<std::uint64_t>(i))
                                   : split_seed(master_seed, static_cast<std::uint64_t>(i));
      auto path = sample_noise_path(seed, total_steps, cfg.gamma, grid.dt_eff);
      Trace t = picture == TrajectoryPicture::Correlation
                    ? evolve_trajectory_z(psi0, omega, cfg.noise_sites, path, cfg.t_max, cfg.dt,
                                          cfg.dt_internal)
                    : evolve_trajectory(psi0, h, v, path, cfg.t_max, cfg.dt, cfg.dt_internal);
      for (int s = 0; s < cfg.n; ++s)
        for (int ti = 0; ti < n_t; ++ti) {
          double x = t.cols[s][ti];
          sum(s, ti) += x;
          sq(s, ti) += x * x;
        }
    }
    bsum[b] = std::move(sum);
    bsq[b] = std::move(sq);
  }

  RMat sum = RMat::Zero(cfg.n, n_t), sq = RMat::Zero(cfg.n, n_t);
  for (int b = 0; b < n_blocks; ++b) {
    sum += bsum[b];
    sq += bsq[b];
  }

  EnsembleResult r;
  r.trajectories = m;
  r.tau.resize(n_t);
  for (int ti = 0; ti < n_t; ++ti) r.tau[ti] = ti * cfg.dt;
  r.names.reserve(cfg.n);
  r.mean.assign(cfg.n, std::vector<double>(n_t));
  r.se.assign(cfg.n, std::vector<double>(n_t));
  for (int s = 0; s < cfg.n; ++s) {
    r.names.push_back("sz_" + std::to_string(s + 1));
    for (int ti = 0; ti < n_t; ++ti) {
      double mu = sum(s, ti) / m;
      double var = (sq(s, ti) - sum(s, ti) * sum(s, ti) / m) / (m - 1);
      r.mean[s][ti] = mu;
      r.se[s][ti] = std::sqrt(std::max(0.0, var) / m);
    }
  }
  return r;
}

}  // namespace spinsync::stoch
