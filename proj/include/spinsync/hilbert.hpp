#pragma once

#include <utility>
#include <vector>

#include "spinsync/config.hpp"
#include "spinsync/types.hpp"

namespace spinsync {

// Single-site operators in the (|0> = ground, |1> = excited) basis,
// so sigma^z |1> = +|1>.
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();

// Embed a single-site operator at site j (1-based) of an n-site register.
// Site j occupies bit (j-1) of the basis index.
Mat op_at(const Eigen::Matrix2cd& op, int site, int n);

// Periodic XX ring in a uniform transverse field, with an optional
// antisymmetric field offset (+detuning on site 1, -detuning on site 5).
Mat build_hamiltonian(const ChainConfig& cfg);

// V = sum of sigma^z over the noise sites.
Mat build_noise_operator(const std::vector<int>& sites, int n);

// Computational product state with the listed sites excited; unit norm.
Vec basis_state(const std::vector<int>& excited, int n);

// Reduced density matrix over the kept sites (1-based, strictly increasing).
// Output bit i corresponds to keep[i].
Mat partial_trace(const Mat& rho, const std::vector<int>& keep);

double expect_local_z(const Mat& rho, int site);
double expect_local_z_state(const Vec& psi, int site);

// Basis index of the state with exactly site j excited.
int one_excitation_index(int site, int n);

// Row/column sparse view of a dense operator for fast application against
// dense matrices and vectors. Entries equal to zero are dropped exactly.
struct SparseApply {
  int dim = 0;
  std::vector<std::vector<std::pair<int, cplx>>> rows;  // (col, val) per row
  std::vector<std::vector<std::pair<int, cplx>>> cols;  // (row, val) per col
  double norm1 = 0.0;  // max column absolute sum

  SparseApply() = default;
  explicit SparseApply(const Mat& a);
  void left(const Mat& x, Mat& out, ExecMode mode) const;   // out = A * x
  void right(const Mat& x, Mat& out, ExecMode mode) const;  // out = x * A
  void vec(const Vec& x, Vec& out) const;                   // out = A * x
};

}  // namespace spinsync
