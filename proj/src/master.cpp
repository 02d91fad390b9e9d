#include "spinsync/master.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsync/jw.hpp"

namespace spinsync {

namespace {

constexpr cplx I{0.0, 1.0};

bool is_diagonal(const Mat& m) {
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r)
      if (r != c && m(r, c) != 0.0) return false;
  return true;
}

void check_hermitian(const Mat& m, const char* what) {
  double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > 1e-10 * scale)
    throw std::invalid_argument(std::string(what) + " must be Hermitian");
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

int site_count(const Mat& rho) {
  int dim = static_cast<int>(rho.rows());
  int n = 0;
  while ((1 << n) < dim) ++n;
  if ((1 << n) != dim) throw std::invalid_argument("state dimension is not a power of two");
  return n;
}

}  // namespace

Mat MasterGenerator::apply(const Mat& rho) const {
  Mat out = -I * (h * rho - rho * h);
  if (gamma != 0.0) {
    Mat vv = v * v;
    out -= 0.5 * gamma * (vv * rho - 2.0 * (v * rho * v) + rho * vv);
  }
  return out;
}

MasterGenerator make_generator(const ChainConfig& cfg) {
  cfg.validate();
  return {build_hamiltonian(cfg), build_noise_operator(cfg.noise_sites, cfg.n), cfg.gamma};
}

EvolveOptions options_from(const ChainConfig& cfg) {
  EvolveOptions opt;
  opt.t_max = cfg.t_max;
  opt.dt = cfg.dt;
  opt.dt_internal = cfg.dt_internal;
  return opt;
}

// RK4 with the derivative expressed through sparse left/right applications of
// H and, for diagonal V, an elementwise damping array. Non-diagonal V falls
// back to dense products (small test systems only).
Trace evolve_master(const Mat& rho0, const MasterGenerator& gen, const EvolveOptions& opt) {
  int dim = static_cast<int>(rho0.rows());
  if (gen.h.rows() != dim || gen.v.rows() != dim)
    throw std::invalid_argument("generator/state dimension mismatch");
  int n_out = static_cast<int>(std::lround(opt.t_max / opt.dt));
  int per_out = std::max(1, static_cast<int>(std::lround(opt.dt / opt.dt_internal)));
  double h_step = opt.dt / per_out;

  SparseApply hs(gen.h);
  bool vdiag = is_diagonal(gen.v);
  Eigen::ArrayXXcd damp;
  Mat vsq;
  if (vdiag) {
    damp.resize(dim, dim);
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < dim; ++r) {
        double d = (gen.v(r, r) - gen.v(c, c)).real();
        damp(r, c) = 0.5 * gen.gamma * d * d;
      }
  } else {
    vsq = gen.v * gen.v;
  }

  double theta = h_step * (2.0 * hs.norm1 + gen.gamma * gen.v.norm() * gen.v.norm());
  if (theta > 1.5)
    throw std::runtime_error("internal step too large for the integrator: |generator| dt = " +
                             std::to_string(theta));

  Mat bl(dim, dim), br(dim, dim);
  auto deriv = [&](const Mat& y, Mat& out) {
    hs.left(y, bl, opt.mode);
    hs.right(y, br, opt.mode);
    out = -I * (bl - br);
    if (gen.gamma != 0.0) {
      if (vdiag)
        out.array() -= damp * y.array();
      else
        out -= 0.5 * gen.gamma * (vsq * y - 2.0 * (gen.v * y * gen.v) + y * vsq);
    }
  };

  int n = site_count(rho0);
  Trace t;
  t.tau.resize(n_out + 1);
  for (int j = 1; j <= n; ++j) t.add("sz_" + std::to_string(j));
  if (opt.with_purity) t.add("purity");
  if (opt.with_loschmidt) t.add("loschmidt");
  for (auto& c : t.cols) c.resize(n_out + 1);
  for (auto [u, v] : opt.pairs) {
    PairSeries ps;
    ps.u = std::min(u, v);
    ps.v = std::max(u, v);
    ps.rho.reserve(n_out + 1);
    t.pairs.push_back(std::move(ps));
  }
  t.snapshot_stride = opt.snapshot_stride;

  int ip = t.index_of("purity"), il = t.index_of("loschmidt");
  auto record = [&](int i, const Mat& rho) {
    t.tau[i] = i * opt.dt;
    for (int j = 1; j <= n; ++j) t.cols[j - 1][i] = expect_local_z(rho, j);
    if (ip >= 0) t.cols[ip][i] = rho.squaredNorm();
    if (il >= 0) t.cols[il][i] = (rho.conjugate().array() * rho0.array()).sum().real();
    for (auto& ps : t.pairs) ps.rho.push_back(partial_trace(rho, {ps.u, ps.v}));
    if (opt.snapshot_stride > 0 && i % opt.snapshot_stride == 0) t.snapshots.push_back(rho);
  };

  Mat y = rho0, k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), yt(dim, dim);
  record(0, y);
  for (int i = 1; i <= n_out; ++i) {
    for (int s = 0; s < per_out; ++s) {
      deriv(y, k1);
      yt = y + (0.5 * h_step) * k1;
      deriv(yt, k2);
      yt = y + (0.5 * h_step) * k2;
      deriv(yt, k3);
      yt = y + h_step * k3;
      deriv(yt, k4);
      y += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    record(i, y);
  }
  return t;
}

double convergence_defect(const Mat& rho0, const MasterGenerator& gen, const EvolveOptions& opt) {
  EvolveOptions fine = opt;
  fine.dt_internal = opt.dt_internal / 2.0;
  fine.pairs.clear();
  EvolveOptions coarse = fine;
  coarse.dt_internal = opt.dt_internal;
  Trace a = evolve_master(rho0, gen, coarse);
  Trace b = evolve_master(rho0, gen, fine);
  int n = site_count(rho0);
  double worst = 0.0;
  for (int j = 1; j <= n; ++j) {
    const auto& xa = a.channel("sz_" + std::to_string(j));
    const auto& xb = b.channel("sz_" + std::to_string(j));
    for (size_t i = 0; i < xa.size(); ++i) worst = std::max(worst, std::abs(xa[i] - xb[i]));
  }
  return worst;
}

LiouvilleSpectrum spectral_decompose(const Mat& h) {
  check_hermitian(h, "spectral_decompose input");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Mat mode_overlap(const Mat& rho0, const LiouvilleSpectrum& s) {
  if (rho0.rows() != s.evecs.rows()) throw std::invalid_argument("mode_overlap dimension mismatch");
  return s.evecs.adjoint() * rho0 * s.evecs;
}

Mat reconstruct_unitary(const Mat& rho0, const LiouvilleSpectrum& s, double tau) {
  Mat c = mode_overlap(rho0, s);
  int d = static_cast<int>(c.rows());
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) c(k, l) *= std::exp(-I * (s.evals(k) - s.evals(l)) * tau);
  return s.evecs * c * s.evecs.adjoint();
}

Mat build_superoperator(const MasterGenerator& gen) {
  int dim = static_cast<int>(gen.h.rows());
  if (dim > 64)
    throw std::length_error(
        "superoperator limited to registers up to 64 states; use the correlation-matrix generator");
  Mat id = Mat::Identity(dim, dim);
  Mat sup = -I * (kron(id, gen.h) - kron(gen.h.transpose(), id));
  if (gen.gamma != 0.0) {
    Mat vv = gen.v * gen.v;
    sup -= 0.5 * gen.gamma *
           (kron(id, vv) + kron(vv.transpose(), id) - 2.0 * kron(gen.v.transpose(), gen.v));
  }
  return sup;
}

std::vector<DecayMode> numeric_decay_rates(const MasterGenerator& gen, const Mat* rho0) {
  if (gen.gamma <= 0.0) throw std::domain_error("numeric_decay_rates requires gamma > 0");
  Mat sup = build_superoperator(gen);
  Eigen::ComplexEigenSolver<Mat> es(sup, rho0 != nullptr);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  int d = static_cast<int>(sup.rows());
  Vec alpha;
  if (rho0 != nullptr) {
    Vec v0 = Eigen::Map<const Vec>(rho0->data(), rho0->size());
    alpha = es.eigenvectors().partialPivLu().solve(v0);
  }
  std::vector<DecayMode> modes(d);
  for (int i = 0; i < d; ++i) {
    modes[i].frequency = es.eigenvalues()(i).imag();
    modes[i].rate = -es.eigenvalues()(i).real() / gen.gamma;
    modes[i].visibility = rho0 ? std::abs(alpha(i)) : 0.0;
  }
  std::sort(modes.begin(), modes.end(), [](const DecayMode& a, const DecayMode& b) {
    return a.frequency != b.frequency ? a.frequency < b.frequency : a.rate < b.rate;
  });
  return modes;
}

MasterGenerator sector_generator(const ChainConfig& cfg) {
  cfg.validate();
  RMat omega = jw::build_omega(cfg.n, cfg.j, cfg.g, jw::Parity::Odd, cfg.detuning);
  Mat h = omega.cast<cplx>();
  h -= cfg.g * cfg.n * Mat::Identity(cfg.n, cfg.n);
  Mat v = Mat::Zero(cfg.n, cfg.n);
  for (int i = 0; i < cfg.n; ++i) v(i, i) = -static_cast<double>(cfg.noise_sites.size());
  for (int u : cfg.noise_sites) v(u - 1, u - 1) += 2.0;
  return {h, v, cfg.gamma};
}

std::vector<DecayMode> sector_decay_rates(const ChainConfig& cfg, const Mat* rho0) {
  return numeric_decay_rates(sector_generator(cfg), rho0);
}

}  // namespace spinsync
