#include "spinsync/config.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace spinsync {

void ChainConfig::validate() const {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("n must be even and >= 2");
  if (noise_sites.empty()) throw std::invalid_argument("at least one noise site is required");
  if (noise_sites.size() > 2) throw std::invalid_argument("at most two noise sites");
  std::set<int> seen;
  for (int u : noise_sites) {
    if (u < 1 || u > n) throw std::invalid_argument("noise site out of range: " + std::to_string(u));
    if (!seen.insert(u).second) throw std::invalid_argument("duplicate noise site");
  }
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  if (detuning != 0.0 && n < 5) throw std::invalid_argument("detuning acts on sites (1,5); requires n >= 5");
  if (t_max <= 0.0) throw std::invalid_argument("t_max must be positive");
  if (dt <= 0.0 || dt_internal <= 0.0) throw std::invalid_argument("grid steps must be positive");
  if (dt_internal > dt + 1e-15) throw std::invalid_argument("dt_internal must not exceed dt");
  if (trajectories < 1) throw std::invalid_argument("trajectories must be >= 1");
}

}  // namespace spinsync
