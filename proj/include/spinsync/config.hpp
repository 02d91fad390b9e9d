#pragma once

#include <cstdint>
#include <vector>

namespace spinsync {

// One simulation setup: ring geometry, couplings, noise placement, grids.
// Energies are in units of the field g; time is the dimensionless tau.
struct ChainConfig {
  int n = 6;
  double j = 1.0;
  double g = 1.0;
  double gamma = 0.3;
  std::vector<int> noise_sites = {3};  // 1-based, distinct
  double detuning = 0.0;               // +delta on site 1, -delta on site 5
  double t_max = 60.0;
  double dt = 0.01;                    // output grid spacing
  double dt_internal = 1e-3;           // integrator step
  int trajectories = 2000;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
};

}  // namespace spinsync
