#include "spinsync/sync.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinsync/jw.hpp"

namespace spinsync::sync {

namespace {

double sn(int n, int u, int k) { return std::sin(u * k * pi / n); }

void check_pair(int n, int k, int l) {
  if (n < 2) throw std::invalid_argument("chain needs at least two sites");
  if (k < 1 || k >= n || l < 1 || l >= n || k == l)
    throw std::invalid_argument("mode pair out of range");
}

void check_site(int n, int u) {
  if (u < 1 || u > n) throw std::invalid_argument("noise site out of range: " + std::to_string(u));
}

// Y in the sin basis restricted to the noise sites, Y_kk' = (2/n) sum_u s_uk s_uk'.
RMat y_matrix(int n, const std::vector<int>& sites) {
  RMat y = RMat::Zero(n - 1, n - 1);
  for (int u : sites) {
    check_site(n, u);
    for (int k = 1; k < n; ++k)
      for (int kp = 1; kp < n; ++kp) y(k - 1, kp - 1) += (2.0 / n) * sn(n, u, k) * sn(n, u, kp);
  }
  return y;
}

struct PairLabel {
  int k, l;
  double frequency;
};

std::vector<std::vector<PairLabel>> frequency_groups(int n, double j, double g, double freq_tol) {
  std::vector<PairLabel> pairs;
  auto lambda = [&](int k) { return 2.0 * g - 2.0 * j * std::cos(k * pi / n); };
  for (int k = 1; k < n; ++k)
    for (int l = k + 1; l < n; ++l) pairs.push_back({k, l, lambda(k) - lambda(l)});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const PairLabel& a, const PairLabel& b) { return a.frequency < b.frequency; });
  std::vector<std::vector<PairLabel>> groups;
  for (const auto& p : pairs) {
    if (groups.empty() || std::abs(p.frequency - groups.back().back().frequency) > freq_tol)
      groups.emplace_back();
    groups.back().push_back(p);
  }
  for (auto& grp : groups)
    std::sort(grp.begin(), grp.end(), [](const PairLabel& a, const PairLabel& b) {
      return a.k != b.k ? a.k < b.k : a.l < b.l;
    });
  return groups;
}

}  // namespace

double decay_rate_one_site(int n, int u, int k, int l, bool degenerate) {
  check_pair(n, k, l);
  check_site(n, u);
  double sk = sn(n, u, k), sl = sn(n, u, l);
  double cross = degenerate ? 32.0 : 16.0;
  return (4.0 / n) * (sk * sk + sl * sl) - (cross / (n * double(n))) * sk * sk * sl * sl;
}

double decay_rate_two_site(int n, int u, int v, int k, int l, bool degenerate) {
  check_pair(n, k, l);
  check_site(n, u);
  check_site(n, v);
  if (u == v) throw std::invalid_argument("noise sites must be distinct");
  double ak = sn(n, u, k) * sn(n, u, k) + sn(n, v, k) * sn(n, v, k);
  double al = sn(n, u, l) * sn(n, u, l) + sn(n, v, l) * sn(n, v, l);
  double cross = degenerate ? 32.0 : 16.0;
  return (4.0 / n) * (ak + al) - (cross / (n * double(n))) * ak * al;
}

std::vector<ModeEntry> degenerate_block_rates(int n, const std::vector<int>& sites, double freq_tol,
                                              double j, double g) {
  if (n < 2) throw std::invalid_argument("chain needs at least two sites");
  RMat y = y_matrix(n, sites);
  auto groups = frequency_groups(n, j, g, freq_tol);
  std::vector<ModeEntry> out;
  int group_id = 0;
  for (const auto& grp : groups) {
    int m = static_cast<int>(grp.size());
    RMat block(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double ykk = y(grp[b].k - 1, grp[a].k - 1);
        double yll = y(grp[a].l - 1, grp[b].l - 1);
        block(a, b) = 2.0 * (ykk * (grp[b].l == grp[a].l ? 1.0 : 0.0) +
                             (grp[b].k == grp[a].k ? 1.0 : 0.0) * yll - 2.0 * ykk * yll);
      }
    Eigen::SelfAdjointEigenSolver<RMat> es(block);
    RVec rates = es.eigenvalues();
    for (int a = 0; a < m; ++a) {
      ModeEntry e;
      e.k = grp[a].k;
      e.l = grp[a].l;
      e.frequency = grp[a].frequency;
      e.rate = rates(a);
      e.source = m > 1 ? "analytic-deg" : "analytic-nondeg";
      e.group = m > 1 ? group_id : -1;
      e.accidental = m > 2;
      out.push_back(std::move(e));
    }
    if (m > 1) ++group_id;
  }
  std::sort(out.begin(), out.end(),
            [](const ModeEntry& a, const ModeEntry& b) { return a.k != b.k ? a.k < b.k : a.l < b.l; });
  return out;
}

std::vector<ModeEntry> numeric_rates(int n, const std::vector<int>& sites, double gamma, double j,
                                     double g, double freq_tol) {
  if (gamma <= 0.0) throw std::domain_error("numeric rates require gamma > 0");
  auto analytic = degenerate_block_rates(n, sites, freq_tol, j, g);

  std::vector<double> group_freq;
  for (const auto& e : analytic) {
    bool seen = false;
    for (double f : group_freq) seen = seen || std::abs(f - e.frequency) <= freq_tol;
    if (!seen) group_freq.push_back(e.frequency);
  }
  double min_gap = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < group_freq.size(); ++a) {
    min_gap = std::min(min_gap, std::abs(group_freq[a]));
    for (size_t b = a + 1; b < group_freq.size(); ++b)
      min_gap = std::min(min_gap, std::abs(group_freq[a] - group_freq[b]));
  }
  double window = 0.4 * min_gap;

  Mat sup = jw::reduced_generator(n, j, g, sites, gamma).materialize();
  Eigen::ComplexEigenSolver<Mat> es(sup, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");

  std::vector<std::vector<std::pair<double, double>>> buckets(group_freq.size());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double f = es.eigenvalues()(i).imag();
    double rate = -es.eigenvalues()(i).real() / gamma;
    if (std::abs(f) < 1e-6) continue;
    size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (size_t gi = 0; gi < group_freq.size(); ++gi) {
      double d = std::abs(f - group_freq[gi]);
      if (d < dist) {
        dist = d;
        best = gi;
      }
    }
    if (dist <= window) buckets[best].push_back({rate, f});
  }
  for (auto& b : buckets) std::sort(b.begin(), b.end());

  std::vector<ModeEntry> out;
  std::vector<size_t> cursor(group_freq.size(), 0);
  std::vector<std::vector<const ModeEntry*>> by_group(group_freq.size());
  for (const auto& e : analytic) {
    size_t gi = 0;
    while (std::abs(group_freq[gi] - e.frequency) > freq_tol) ++gi;
    by_group[gi].push_back(&e);
  }
  for (size_t gi = 0; gi < group_freq.size(); ++gi) {
    auto members = by_group[gi];
    if (buckets[gi].size() != members.size())
      throw std::runtime_error("numeric spectrum does not match the analytic degeneracy pattern");
    std::sort(members.begin(), members.end(),
              [](const ModeEntry* a, const ModeEntry* b) { return a->rate < b->rate; });
    for (size_t i = 0; i < members.size(); ++i) {
      ModeEntry e;
      e.k = members[i]->k;
      e.l = members[i]->l;
      e.frequency = buckets[gi][i].second;
      e.rate = buckets[gi][i].first;
      e.source = "numeric";
      e.group = members[i]->group;
      e.accidental = members[i]->accidental;
      out.push_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ModeEntry& a, const ModeEntry& b) { return a.k != b.k ? a.k < b.k : a.l < b.l; });
  return out;
}

std::vector<RateComparison> compare_rates(int n, const std::vector<int>& sites, double gamma,
                                          double j, double g) {
  auto analytic = degenerate_block_rates(n, sites, 1e-9, j, g);
  auto numeric = numeric_rates(n, sites, gamma, j, g);
  std::vector<RateComparison> out;
  out.reserve(analytic.size());
  for (size_t i = 0; i < analytic.size(); ++i) {
    RateComparison c;
    c.k = analytic[i].k;
    c.l = analytic[i].l;
    c.frequency = analytic[i].frequency;
    c.analytic = analytic[i].rate;
    c.numeric = numeric[i].rate;
    c.rel_err = std::abs(c.analytic - c.numeric) /
                std::max({std::abs(c.analytic), std::abs(c.numeric), 1e-3});
    out.push_back(c);
  }
  return out;
}

std::vector<SyncConfigResult> find_sync_configs(int n_max, int max_noise_sites) {
  if (max_noise_sites < 1 || max_noise_sites > 2)
    throw std::invalid_argument("max_noise_sites must be 1 or 2");
  std::vector<SyncConfigResult> out;
  for (int n = 6; n <= n_max; n += 6) {
    int k = n / 3, l = 2 * n / 3;
    std::vector<std::vector<int>> site_sets;
    for (int u = 3; u <= n; u += 3) site_sets.push_back({u});
    if (max_noise_sites >= 2)
      for (int u = 3; u <= n; u += 3)
        for (int v = u + 3; v <= n; v += 3) site_sets.push_back({u, v});
    for (auto& sites : site_sets) {
      SyncConfigResult r;
      r.n = n;
      r.sites = sites;
      r.k = k;
      r.l = l;
      r.mode = magnetization_mode(n, k, l);
      auto table = degenerate_block_rates(n, sites);
      r.zero_pairs = 0;
      for (const auto& e : table)
        if (std::abs(e.rate) <= 1e-12) ++r.zero_pairs;
      r.stable_sync = r.zero_pairs == 1;
      out.push_back(std::move(r));
    }
  }
  return out;
}

RVec synchronized_mode(int n) {
  if (n < 6 || n % 6 != 0)
    throw std::invalid_argument("no-sync-config: n must be a positive multiple of 6");
  RVec mode(n);
  for (int s = 1; s <= n; ++s) {
    int r = s % 6;
    double v = 0.0;
    if (r == 1 || r == 5) v = 3.0 / n;
    if (r == 2 || r == 4) v = -3.0 / n;
    mode(s - 1) = v;
  }
  return mode;
}

RVec magnetization_mode(int n, int k, int l) {
  check_pair(n, k, l);
  RVec mode(n);
  for (int s = 1; s <= n; ++s) mode(s - 1) = (4.0 / n) * sn(n, s, k) * sn(n, s, l);
  return mode;
}

}  // namespace spinsync::sync
