#pragma once

#include <utility>
#include <vector>

#include "spinsync/config.hpp"
#include "spinsync/trace.hpp"

namespace spinsync::jw {

enum class Parity { Odd, Even };  // fermion-number parity sector

// Single-particle matrix: tridiagonal (-J, 2g, -J) with corner (1,n)/(n,1)
// equal to -J in the odd sector (periodic) and +J in the even sector
// (antiperiodic); optional field offset +detuning at 1, -detuning at 5.
RMat build_omega(int n, double j, double g, Parity parity, double detuning = 0.0);

struct EigenPair {
  int k = 0;       // 1..n-1
  double lambda;   // 2g - 2 j cos(k pi / n)
  RVec phi;        // sqrt(2/n) sin(j k pi / n)
  Parity sector;   // corner sign for which phi is an exact eigenvector
};

// The sin-family eigenpairs. k = n gives the null vector and is omitted; each
// phi_k is validated against the omega of its own parity sector.
std::vector<EigenPair> analytic_eigenpairs(int n, double j, double g);

// Generator of the correlation matrix Z_jk = <c_j^dag c_k>:
//   Z' = i[Omega, Z] - 2 gamma [Y, [Y, Z]],  Y = sum over noise sites of e_u e_u^T.
// The double commutator acts elementwise: entry (j,k) damps at
// 2 gamma (y_j - y_k)^2 where y is the diagonal of Y.
struct ZGenerator {
  RMat omega;
  Eigen::ArrayXXd damp;  // 2 gamma (y_j - y_k)^2
  double gamma = 0.0;
  std::vector<int> sites;

  Mat apply(const Mat& z) const;
  Mat materialize() const;  // explicit n^2 x n^2 matrix, column-stacked
};

ZGenerator build_z_generator(const RMat& omega, const std::vector<int>& sites, double gamma);

// Ring generator for the physical one-excitation dynamics (odd-parity corner).
ZGenerator ring_generator(const ChainConfig& cfg);

// Open-chain generator on n-1 sites whose exact eigenbasis is the sin family;
// the numeric reference point for the analytic decay-rate formulas. Noise at
// site n maps to the zero operator (every sin vector vanishes there).
ZGenerator reduced_generator(int n, double j, double g, const std::vector<int>& sites, double gamma);

struct ZEvolveOptions {
  double t_max = 60.0;
  double dt = 0.01;
  double dt_internal = 1e-3;
  std::vector<std::pair<int, int>> pairs;
  int snapshot_stride = 0;  // Z snapshots
  bool with_purity = true;
  bool with_loschmidt = true;
};

// RK4 evolution; channels sz_j = 2 Re Z_jj - 1, purity = ||Z||_F^2 and
// loschmidt = Tr(Z Z0) (exact state values for one-excitation states).
Trace evolve_z(const Mat& z0, const ZGenerator& gen, const ZEvolveOptions& opt);

// Reduced density matrices of ring sites reconstructed from Z, valid for
// states inside the single-excitation sector.
Eigen::Matrix2cd one_qubit_from_z(const Mat& z, int u);
Eigen::Matrix4cd two_qubit_from_z(const Mat& z, int u, int v);

}  // namespace spinsync::jw
