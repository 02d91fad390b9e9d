#pragma once

#include <string>
#include <vector>

#include "spinsync/types.hpp"

namespace spinsync::sync {

// First-order decay rate (units of gamma) of the coherence (k,l) under
// dephasing at site u; the degenerate flag doubles the cross-term coefficient.
double decay_rate_one_site(int n, int u, int k, int l, bool degenerate = false);
// Common two-site noise at (u,v), closed form.
double decay_rate_two_site(int n, int u, int v, int k, int l, bool degenerate = false);

struct ModeEntry {
  int k = 0, l = 0;
  double frequency = 0.0;  // lambda_k - lambda_l
  double rate = 0.0;       // units of gamma
  std::string source;      // analytic-nondeg | analytic-deg | numeric
  int group = -1;          // degeneracy group id (-1: singleton)
  bool accidental = false; // group larger than the generic mirror pair
};

// Analytic rate table over ordered pairs k < l: pairs are grouped by equal
// frequency within freq_tol; each group's rates are the eigenvalues of the
// perturbation matrix with entries 2<<a| [Y,[Y,.]] |b>> in the sin-product
// basis (sorted ascending within the group, labels in (k,l) order).
std::vector<ModeEntry> degenerate_block_rates(int n, const std::vector<int>& sites,
                                              double freq_tol = 1e-9, double j = 1.0,
                                              double g = 1.0);

// Numeric table from the explicit reduced-generator spectrum at small gamma,
// labels matched per frequency group (rates sorted ascending within a group).
std::vector<ModeEntry> numeric_rates(int n, const std::vector<int>& sites, double gamma = 1e-3,
                                     double j = 1.0, double g = 1.0, double freq_tol = 1e-9);

struct RateComparison {
  int k = 0, l = 0;
  double frequency = 0.0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;  // |a-n| / max(|a|, floor)
};

std::vector<RateComparison> compare_rates(int n, const std::vector<int>& sites,
                                          double gamma = 1e-3, double j = 1.0, double g = 1.0);

struct SyncConfigResult {
  int n = 0;
  std::vector<int> sites;
  int k = 0, l = 0;        // surviving pair (n/3, 2n/3)
  RVec mode;               // synchronized-mode magnetization vector
  int zero_pairs = 0;      // nonzero-frequency pairs with zero analytic rate
  bool stable_sync = false;  // exactly one such pair
};

// Enumerates the closed-form synchronizing configurations: even n with
// n/3 integer, noise sites multiples of 3 (single sites and, when
// max_noise_sites >= 2, site pairs), surviving pair (n/3, 2n/3). zero_pairs
// reports the brute-force count of zero-rate pairs in the analytic table.
std::vector<SyncConfigResult> find_sync_configs(int n_max, int max_noise_sites = 2);

// (3/n) * (1,-1,0,-1,1,0,...); requires n divisible by 6.
RVec synchronized_mode(int n);
// Magnetization pattern of the coherence (k,l): component j = (4/n) sin(jk pi/n) sin(jl pi/n).
RVec magnetization_mode(int n, int k, int l);

}  // namespace spinsync::sync
