#pragma once

#include <utility>
#include <vector>

#include "spinsync/hilbert.hpp"
#include "spinsync/trace.hpp"

namespace spinsync {

// Noise-averaged generator rho' = -i[H,rho] - (gamma/2)[V,[V,rho]].
struct MasterGenerator {
  Mat h;
  Mat v;
  double gamma = 0.0;

  Mat apply(const Mat& rho) const;
};

MasterGenerator make_generator(const ChainConfig& cfg);

struct EvolveOptions {
  double t_max = 60.0;
  double dt = 0.01;
  double dt_internal = 1e-3;
  std::vector<std::pair<int, int>> pairs;  // record reduced two-qubit states
  int snapshot_stride = 0;                 // full-state snapshots (0 = off)
  bool with_purity = true;
  bool with_loschmidt = true;
  ExecMode mode = ExecMode::OpenMP;
};

EvolveOptions options_from(const ChainConfig& cfg);

// Fixed-step RK4 on the output grid; dt_internal subdivides each output step.
// Channels: sz_1..sz_n, plus purity and loschmidt (against rho0) if enabled.
Trace evolve_master(const Mat& rho0, const MasterGenerator& gen, const EvolveOptions& opt);

// Step-halving convergence check: max |sz| change when dt_internal is halved.
double convergence_defect(const Mat& rho0, const MasterGenerator& gen, const EvolveOptions& opt);

struct LiouvilleSpectrum {
  RVec evals;  // ascending
  Mat evecs;   // columns
  // Frequency of the coherence |E_k><E_l| with 1-based ascending labels.
  double frequency(int k, int l) const { return evals(k - 1) - evals(l - 1); }
};

LiouvilleSpectrum spectral_decompose(const Mat& h);

// Coefficients c_kl = <E_k| rho0 |E_l>; under gamma = 0 evolution the state is
// sum_kl c_kl exp(-i(E_k-E_l) tau) |E_k><E_l|.
Mat mode_overlap(const Mat& rho0, const LiouvilleSpectrum& s);
Mat reconstruct_unitary(const Mat& rho0, const LiouvilleSpectrum& s, double tau);

// Dense superoperator of gen acting on column-stacked rho. Guarded by dim:
// inputs above 64 (spin registers beyond n = 6) are refused.
Mat build_superoperator(const MasterGenerator& gen);

struct DecayMode {
  double frequency = 0.0;   // Im(eigenvalue)
  double rate = 0.0;        // -Re(eigenvalue) / gamma
  double visibility = 0.0;  // |coefficient of rho0 on this mode|, if rho0 given
};

// Eigenvalues of the explicit superoperator of gen, as (frequency, rate) rows
// sorted by frequency then rate. Works for any generator dimension the
// superoperator guard admits; pass the sector generator for ring spectra.
std::vector<DecayMode> numeric_decay_rates(const MasterGenerator& gen, const Mat* rho0 = nullptr);

// Restriction of the spin generator to the single-excitation sector: an n x n
// generator isomorphic to the correlation-matrix one (h = Omega - g n I,
// v = 2Y - |sites| I). Used as the default space for numeric_decay_rates.
MasterGenerator sector_generator(const ChainConfig& cfg);
std::vector<DecayMode> sector_decay_rates(const ChainConfig& cfg, const Mat* rho0 = nullptr);

}  // namespace spinsync
