#include "spinsync/trace.hpp"

#include <stdexcept>
#include <string>

namespace spinsync {

int Trace::index_of(std::string_view name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

const std::vector<double>& Trace::channel(std::string_view name) const {
  int i = index_of(name);
  if (i < 0) throw std::out_of_range("missing channel: " + std::string(name));
  return cols[static_cast<size_t>(i)];
}

std::vector<double>& Trace::add(std::string name) {
  names.push_back(std::move(name));
  cols.emplace_back();
  return cols.back();
}

const PairSeries& Trace::pair(int u, int v) const {
  for (const auto& p : pairs)
    if ((p.u == u && p.v == v) || (p.u == v && p.v == u)) return p;
  throw std::out_of_range("missing pair series (" + std::to_string(u) + "," + std::to_string(v) + ")");
}

double Trace::dt() const {
  if (tau.size() < 2) throw std::logic_error("trace grid too short");
  return tau[1] - tau[0];
}

}  // namespace spinsync
