#include "spinsync/jw.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinsync/types.hpp"

namespace spinsync::jw {

namespace {

constexpr cplx I{0.0, 1.0};

RVec site_indicator(int n, const std::vector<int>& sites) {
  RVec y = RVec::Zero(n);
  for (int u : sites) {
    if (u < 1 || u > n) throw std::invalid_argument("noise site out of range: " + std::to_string(u));
    y(u - 1) = 1.0;
  }
  return y;
}

}  // namespace

RMat build_omega(int n, double j, double g, Parity parity, double detuning) {
  if (n < 2) throw std::invalid_argument("chain needs at least two sites");
  if (detuning != 0.0 && n < 5) throw std::invalid_argument("detuning requires at least five sites");
  RMat omega = RMat::Zero(n, n);
  omega.diagonal().setConstant(2.0 * g);
  for (int r = 0; r + 1 < n; ++r) {
    omega(r, r + 1) += -j;
    omega(r + 1, r) += -j;
  }
  double corner = parity == Parity::Odd ? -j : j;
  omega(0, n - 1) += corner;
  omega(n - 1, 0) += corner;
  if (detuning != 0.0) {
    omega(0, 0) += detuning;
    omega(4, 4) -= detuning;
  }
  return omega;
}

std::vector<EigenPair> analytic_eigenpairs(int n, double j, double g) {
  if (n < 2) throw std::invalid_argument("chain needs at least two sites");
  std::vector<EigenPair> out;
  out.reserve(n - 1);
  for (int k = 1; k < n; ++k) {
    EigenPair p;
    p.k = k;
    p.lambda = 2.0 * g - 2.0 * j * std::cos(k * pi / n);
    p.phi = RVec::Zero(n);
    for (int s = 1; s < n; ++s) p.phi(s - 1) = std::sqrt(2.0 / n) * std::sin(s * k * pi / n);
    p.sector = k % 2 == 0 ? Parity::Odd : Parity::Even;
    out.push_back(std::move(p));
  }
  return out;
}

Mat ZGenerator::apply(const Mat& z) const {
  Mat out = I * (omega * z - z * omega);
  out.array() -= damp.cast<cplx>() * z.array();
  return out;
}

Mat ZGenerator::materialize() const {
  int n = static_cast<int>(omega.rows());
  Mat sup = Mat::Zero(n * n, n * n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      int row = c * n + r;
      for (int m = 0; m < n; ++m) {
        sup(row, c * n + m) += I * omega(r, m);   // (I x Omega) vec(Z)
        sup(row, m * n + r) -= I * omega(m, c);   // vec(Z Omega)
      }
      sup(row, row) -= damp(r, c);
    }
  return sup;
}

ZGenerator build_z_generator(const RMat& omega, const std::vector<int>& sites, double gamma) {
  int n = static_cast<int>(omega.rows());
  RVec y = site_indicator(n, sites);
  ZGenerator gen;
  gen.omega = omega;
  gen.gamma = gamma;
  gen.sites = sites;
  gen.damp.resize(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      double d = y(r) - y(c);
      gen.damp(r, c) = 2.0 * gamma * d * d;
    }
  return gen;
}

ZGenerator ring_generator(const ChainConfig& cfg) {
  cfg.validate();
  return build_z_generator(build_omega(cfg.n, cfg.j, cfg.g, Parity::Odd, cfg.detuning),
                           cfg.noise_sites, cfg.gamma);
}

ZGenerator reduced_generator(int n, double j, double g, const std::vector<int>& sites, double gamma) {
  if (n < 2) throw std::invalid_argument("chain needs at least two sites");
  RMat omega = RMat::Zero(n - 1, n - 1);
  omega.diagonal().setConstant(2.0 * g);
  for (int r = 0; r + 2 < n; ++r) {
    omega(r, r + 1) = -j;
    omega(r + 1, r) = -j;
  }
  std::vector<int> kept;
  for (int u : sites) {
    if (u < 1 || u > n) throw std::invalid_argument("noise site out of range: " + std::to_string(u));
    if (u < n) kept.push_back(u);
  }
  return build_z_generator(omega, kept, gamma);
}

Trace evolve_z(const Mat& z0, const ZGenerator& gen, const ZEvolveOptions& opt) {
  int n = static_cast<int>(z0.rows());
  if (gen.omega.rows() != n) throw std::invalid_argument("generator/state dimension mismatch");
  int n_out = static_cast<int>(std::lround(opt.t_max / opt.dt));
  int per_out = std::max(1, static_cast<int>(std::lround(opt.dt / opt.dt_internal)));
  double h_step = opt.dt / per_out;

  Eigen::ArrayXXcd dampc = gen.damp.cast<cplx>();
  auto deriv = [&](const Mat& y, Mat& out) {
    out = I * (gen.omega * y - y * gen.omega);
    out.array() -= dampc * y.array();
  };

  Trace t;
  t.tau.resize(n_out + 1);
  for (int s = 1; s <= n; ++s) t.add("sz_" + std::to_string(s));
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
  auto record = [&](int i, const Mat& z) {
    t.tau[i] = i * opt.dt;
    for (int s = 1; s <= n; ++s) t.cols[s - 1][i] = 2.0 * z(s - 1, s - 1).real() - 1.0;
    if (ip >= 0) t.cols[ip][i] = z.squaredNorm();
    if (il >= 0) t.cols[il][i] = (z * z0).trace().real();
    for (auto& ps : t.pairs) ps.rho.push_back(two_qubit_from_z(z, ps.u, ps.v));
    if (opt.snapshot_stride > 0 && i % opt.snapshot_stride == 0) t.snapshots.push_back(z);
  };

  Mat y = z0, k1(n, n), k2(n, n), k3(n, n), k4(n, n), yt(n, n);
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

Eigen::Matrix2cd one_qubit_from_z(const Mat& z, int u) {
  int n = static_cast<int>(z.rows());
  if (u < 1 || u > n) throw std::invalid_argument("site out of range: " + std::to_string(u));
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  rho(0, 0) = 1.0 - z(u - 1, u - 1);
  rho(1, 1) = z(u - 1, u - 1);
  return rho;
}

Eigen::Matrix4cd two_qubit_from_z(const Mat& z, int u, int v) {
  int n = static_cast<int>(z.rows());
  if (u < 1 || u > n || v < 1 || v > n || u == v)
    throw std::invalid_argument("invalid site pair");
  if (u > v) std::swap(u, v);
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  cplx zu = z(u - 1, u - 1), zv = z(v - 1, v - 1);
  rho(0, 0) = 1.0 - zu - zv;
  rho(1, 1) = zu;                 // bit 0 carries the lower site u
  rho(2, 2) = zv;
  rho(1, 2) = z(v - 1, u - 1);
  rho(2, 1) = z(u - 1, v - 1);
  return rho;
}

}  // namespace spinsync::jw
