#include "spinsync/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace spinsync {

namespace {

constexpr cplx I{0.0, 1.0};

int require_register(const Mat& m) {
  int dim = static_cast<int>(m.rows());
  if (dim < 2 || m.cols() != dim || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("operator dimension is not a power of two");
  return std::countr_zero(static_cast<unsigned>(dim));
}

void check_site(int site, int n) {
  if (site < 1 || site > n) throw std::invalid_argument("site out of range: " + std::to_string(site));
}

}  // namespace

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

// Basis order (|0> = ground, |1> = excited): sigma^z = diag(-1,+1), and
// sigma^y carries the signs that keep [x,y] = 2iz.
Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, I, -I, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << -1, 0, 0, 1;
  return m;
}

Mat op_at(const Eigen::Matrix2cd& op, int site, int n) {
  check_site(site, n);
  int dim = 1 << n;
  int bit = 1 << (site - 1);
  Mat out = Mat::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    int a = (s & bit) ? 1 : 0;
    for (int b = 0; b < 2; ++b) {
      cplx val = op(b, a);
      if (val != 0.0) out((s & ~bit) | (b ? bit : 0), s) += val;
    }
  }
  return out;
}

Mat build_hamiltonian(const ChainConfig& cfg) {
  cfg.validate();
  int n = cfg.n;
  int dim = 1 << n;
  Mat h = Mat::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    double diag = cfg.g * (2.0 * std::popcount(static_cast<unsigned>(s)) - n);
    if (cfg.detuning != 0.0) {
      double z1 = (s & 1) ? 1.0 : -1.0;
      double z5 = (s & (1 << 4)) ? 1.0 : -1.0;
      diag += 0.5 * cfg.detuning * (z1 - z5);
    }
    h(s, s) = diag;
  }
  // -(J/2)(xx + yy) on each bond is a hop of amplitude -J between
  // basis states whose bits differ on the bond.
  for (int j = 1; j <= n; ++j) {
    int a = 1 << (j - 1);
    int b = 1 << (j % n);
    for (int s = 0; s < dim; ++s) {
      bool ba = s & a, bb = s & b;
      if (ba != bb) h(s ^ a ^ b, s) += -cfg.j;
    }
  }
  return h;
}

Mat build_noise_operator(const std::vector<int>& sites, int n) {
  if (sites.empty()) throw std::invalid_argument("noise operator needs at least one site");
  int dim = 1 << n;
  Mat v = Mat::Zero(dim, dim);
  for (int u : sites) check_site(u, n);
  for (int s = 0; s < dim; ++s) {
    double z = 0.0;
    for (int u : sites) z += (s & (1 << (u - 1))) ? 1.0 : -1.0;
    v(s, s) = z;
  }
  return v;
}

Vec basis_state(const std::vector<int>& excited, int n) {
  int idx = 0;
  for (int u : excited) {
    check_site(u, n);
    idx |= 1 << (u - 1);
  }
  Vec psi = Vec::Zero(1 << n);
  psi(idx) = 1.0;
  return psi;
}

int one_excitation_index(int site, int n) {
  check_site(site, n);
  return 1 << (site - 1);
}

Mat partial_trace(const Mat& rho, const std::vector<int>& keep) {
  int n = require_register(rho);
  if (keep.empty()) throw std::invalid_argument("keep must be nonempty");
  if (!std::is_sorted(keep.begin(), keep.end()) ||
      std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw std::invalid_argument("keep must be strictly increasing");
  for (int u : keep) check_site(u, n);

  int nk = static_cast<int>(keep.size());
  std::vector<int> kbits(keep.size());
  for (int i = 0; i < nk; ++i) kbits[i] = keep[i] - 1;
  std::vector<int> ebits;
  for (int b = 0; b < n; ++b)
    if (std::find(kbits.begin(), kbits.end(), b) == kbits.end()) ebits.push_back(b);

  auto scatter = [](int packed, const std::vector<int>& bits) {
    int s = 0;
    for (size_t i = 0; i < bits.size(); ++i)
      if (packed & (1 << i)) s |= 1 << bits[i];
    return s;
  };

  int dk = 1 << nk, de = 1 << static_cast<int>(ebits.size());
  Mat out = Mat::Zero(dk, dk);
  for (int a = 0; a < dk; ++a) {
    int sa = scatter(a, kbits);
    for (int b = 0; b < dk; ++b) {
      int sb = scatter(b, kbits);
      cplx sum = 0.0;
      for (int e = 0; e < de; ++e) {
        int se = scatter(e, ebits);
        sum += rho(sa | se, sb | se);
      }
      out(a, b) = sum;
    }
  }
  return out;
}

double expect_local_z(const Mat& rho, int site) {
  int n = require_register(rho);
  check_site(site, n);
  int bit = 1 << (site - 1);
  cplx sum = 0.0;
  for (int s = 0; s < rho.rows(); ++s) sum += ((s & bit) ? 1.0 : -1.0) * rho(s, s);
  return sum.real();
}

double expect_local_z_state(const Vec& psi, int site) {
  int dim = static_cast<int>(psi.size());
  int bit = 1 << (site - 1);
  double sum = 0.0;
  for (int s = 0; s < dim; ++s) sum += ((s & bit) ? 1.0 : -1.0) * std::norm(psi(s));
  return sum;
}

SparseApply::SparseApply(const Mat& a) : dim(static_cast<int>(a.rows())) {
  if (a.cols() != dim) throw std::invalid_argument("SparseApply needs a square matrix");
  rows.resize(dim);
  cols.resize(dim);
  for (int c = 0; c < dim; ++c) {
    double colsum = 0.0;
    for (int r = 0; r < dim; ++r) {
      cplx v = a(r, c);
      if (v != 0.0) {
        rows[r].emplace_back(c, v);
        cols[c].emplace_back(r, v);
        colsum += std::abs(v);
      }
    }
    norm1 = std::max(norm1, colsum);
  }
}

void SparseApply::left(const Mat& x, Mat& out, ExecMode mode) const {
  out.setZero(dim, x.cols());
  int nc = static_cast<int>(x.cols());
#pragma omp parallel for schedule(static) if (mode == ExecMode::OpenMP)
  for (int c = 0; c < nc; ++c)
    for (int r = 0; r < dim; ++r) {
      cplx sum = 0.0;
      for (const auto& [k, v] : rows[r]) sum += v * x(k, c);
      out(r, c) = sum;
    }
}

void SparseApply::right(const Mat& x, Mat& out, ExecMode mode) const {
  out.setZero(x.rows(), dim);
#pragma omp parallel for schedule(static) if (mode == ExecMode::OpenMP)
  for (int c = 0; c < dim; ++c) {
    out.col(c).setZero();
    for (const auto& [k, v] : cols[c]) out.col(c) += v * x.col(k);
  }
}

void SparseApply::vec(const Vec& x, Vec& out) const {
  out.setZero(dim);
  for (int r = 0; r < dim; ++r) {
    cplx sum = 0.0;
    for (const auto& [k, v] : rows[r]) sum += v * x(k);
    out(r) = sum;
  }
}

}  // namespace spinsync
