#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "spinsync/hilbert.hpp"
#include "spinsync/jw.hpp"
#include "spinsync/master.hpp"

using namespace spinsync;

namespace {

Mat random_density(int dim) {
  Mat a = Mat::Random(dim, dim);
  Mat rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

Vec stack(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

}  // namespace

TEST_CASE("generator action matches the explicit superoperator") {
  ChainConfig cfg;
  cfg.n = 2;
  cfg.noise_sites = {1};
  cfg.gamma = 0.4;
  auto gen = make_generator(cfg);
  Mat sup = build_superoperator(gen);
  std::srand(3);
  Mat rho = random_density(4);
  Vec lhs = sup * stack(rho);
  Vec rhs = stack(gen.apply(rho));
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("evolution preserves trace and hermiticity, purity decays") {
  ChainConfig cfg;
  cfg.n = 4;
  cfg.noise_sites = {2};
  cfg.gamma = 0.5;
  cfg.t_max = 2.0;
  cfg.dt = 0.05;
  auto gen = make_generator(cfg);
  Vec psi = (basis_state({1}, 4) + basis_state({3}, 4)).normalized();
  Mat rho0 = psi * psi.adjoint();
  auto opt = options_from(cfg);
  opt.snapshot_stride = 5;
  Trace t = evolve_master(rho0, gen, opt);

  for (const Mat& s : t.snapshots) {
    CHECK(std::abs(s.trace().real() - 1.0) < 1e-10);
    CHECK(std::abs(s.trace().imag()) < 1e-12);
    CHECK((s - s.adjoint()).norm() < 1e-10);
  }
  const auto& p = t.channel("purity");
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1] + 1e-8);
  CHECK(t.channel("loschmidt")[0] == doctest::Approx(1.0));
  CHECK(convergence_defect(rho0, gen, opt) < 1e-8);
}

TEST_CASE("pair series agree with partial traces of snapshots") {
  ChainConfig cfg;
  cfg.n = 4;
  cfg.noise_sites = {2};
  cfg.gamma = 0.3;
  cfg.t_max = 1.0;
  cfg.dt = 0.1;
  auto gen = make_generator(cfg);
  Mat rho0 = Mat::Zero(16, 16);
  rho0(one_excitation_index(1, 4), one_excitation_index(1, 4)) = 1.0;
  auto opt = options_from(cfg);
  opt.pairs = {{1, 3}};
  opt.snapshot_stride = 1;
  Trace t = evolve_master(rho0, gen, opt);
  const auto& ps = t.pair(1, 3);
  REQUIRE(ps.rho.size() == t.tau.size());
  for (std::size_t i = 0; i < t.tau.size(); ++i)
    CHECK((Mat(ps.rho[i]) - partial_trace(t.snapshots[i], {1, 3})).norm() < 1e-12);
}

TEST_CASE("unitary evolution is reproduced by the spectral reconstruction") {
  ChainConfig cfg;
  cfg.n = 4;
  cfg.noise_sites = {2};
  cfg.gamma = 0.0;
  cfg.t_max = 2.0;
  cfg.dt = 0.1;
  auto gen = make_generator(cfg);
  std::srand(5);
  Mat rho0 = random_density(16);
  auto opt = options_from(cfg);
  opt.snapshot_stride = 4;
  Trace t = evolve_master(rho0, gen, opt);

  const auto& p = t.channel("purity");
  for (double v : p) CHECK(std::abs(v - p[0]) < 1e-10);

  auto s = spectral_decompose(gen.h);
  for (std::size_t m = 0; m < t.snapshots.size(); ++m) {
    double tau = t.tau[m * opt.snapshot_stride];
    CHECK((reconstruct_unitary(rho0, s, tau) - t.snapshots[m]).norm() < 1e-8);
  }
}

TEST_CASE("computational states are fixed points when J = 0") {
  ChainConfig cfg;
  cfg.n = 4;
  cfg.j = 0.0;
  cfg.noise_sites = {2};
  cfg.gamma = 0.3;
  cfg.t_max = 1.0;
  cfg.dt = 0.1;
  auto gen = make_generator(cfg);
  Vec psi = basis_state({1, 3}, 4);
  Trace t = evolve_master(psi * psi.adjoint(), gen, options_from(cfg));
  for (int u = 1; u <= 4; ++u) {
    const auto& sz = t.channel("sz_" + std::to_string(u));
    for (double v : sz) CHECK(std::abs(v - sz[0]) < 1e-10);
  }
}

TEST_CASE("dephased single qubit follows the closed form") {
  double g = 1.0, gamma = 0.25;
  MasterGenerator gen{g * pauli_z(), Mat(pauli_z()), gamma};
  Vec plus(2);
  plus << 1.0, 1.0;
  plus.normalize();
  Mat rho0 = plus * plus.adjoint();

  EvolveOptions opt;
  opt.t_max = 2.0;
  opt.dt = 0.02;
  opt.dt_internal = 5e-4;
  opt.snapshot_stride = 1;
  Trace t = evolve_master(rho0, gen, opt);
  for (std::size_t i = 0; i < t.tau.size(); ++i) {
    double want = std::exp(-2.0 * gamma * t.tau[i]) * std::cos(2.0 * t.tau[i]);
    CHECK(std::abs(2.0 * t.snapshots[i](0, 1).real() - want) < 1e-8);
  }

  auto modes = numeric_decay_rates(gen, &rho0);
  REQUIRE(modes.size() == 4);
  int oscillating = 0;
  for (const auto& m : modes) {
    if (std::abs(m.frequency) > 0.5) {
      ++oscillating;
      CHECK(std::abs(std::abs(m.frequency) - 2.0) < 1e-8);
      CHECK(m.rate == doctest::Approx(2.0).epsilon(1e-8));
      CHECK(m.visibility == doctest::Approx(0.5).epsilon(1e-6));
    }
  }
  CHECK(oscillating == 2);
  for (std::size_t i = 1; i < modes.size(); ++i)
    CHECK(modes[i].frequency >= modes[i - 1].frequency);
}

TEST_CASE("spectral decomposition basics") {
  Mat h = Mat::Zero(2, 2);
  h(0, 0) = 0.3;
  h(1, 1) = -0.2;
  auto s = spectral_decompose(h);
  CHECK(s.evals(0) == doctest::Approx(-0.2));
  CHECK(s.evals(1) == doctest::Approx(0.3));
  CHECK(s.frequency(1, 1) == doctest::Approx(0.0));
  CHECK(s.frequency(1, 2) == doctest::Approx(-0.5));
  CHECK(s.frequency(2, 1) == doctest::Approx(0.5));

  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(spectral_decompose(bad), std::invalid_argument);

  std::srand(9);
  Mat a = Mat::Random(4, 4);
  Mat herm = a + a.adjoint();
  auto sh = spectral_decompose(herm);
  Mat proj = sh.evecs.col(1) * sh.evecs.col(1).adjoint();
  Mat c = mode_overlap(proj, sh);
  CHECK(std::abs(c(1, 1) - 1.0) < 1e-12);
  CHECK(c.norm() == doctest::Approx(1.0));
  Mat mixed = Mat::Identity(4, 4) / 4.0;
  CHECK((mode_overlap(mixed, sh) - mixed).norm() < 1e-12);
}

TEST_CASE("superoperator guards") {
  ChainConfig cfg;
  cfg.n = 8;
  cfg.noise_sites = {3};
  auto gen = make_generator(cfg);
  CHECK_THROWS_AS(build_superoperator(gen), std::length_error);

  ChainConfig small;
  small.n = 2;
  small.noise_sites = {1};
  small.gamma = 0.0;
  CHECK_THROWS_AS(numeric_decay_rates(make_generator(small)), std::domain_error);
}

TEST_CASE("full-register and sector spectra agree on the visible modes") {
  ChainConfig cfg;
  cfg.n = 2;
  cfg.j = 0.7;
  cfg.g = 1.0;
  cfg.gamma = 0.2;
  cfg.noise_sites = {1};

  // coherence block eigenvalues -gamma +- i sqrt(delta^2 - gamma^2), delta = 4j
  double delta = 4.0 * cfg.j;
  double shifted = std::sqrt(delta * delta - cfg.gamma * cfg.gamma);

  Mat rho_sector = Mat::Zero(2, 2);
  rho_sector(0, 0) = 1.0;
  auto sector = sector_decay_rates(cfg, &rho_sector);
  REQUIRE(sector.size() == 4);
  int osc = 0;
  for (const auto& m : sector) {
    if (std::abs(m.frequency) > 0.5) {
      ++osc;
      CHECK(std::abs(std::abs(m.frequency) - shifted) < 1e-9);
      CHECK(m.rate == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(osc == 2);

  auto gen = make_generator(cfg);
  int idx = one_excitation_index(1, 2);
  Mat rho_full = Mat::Zero(4, 4);
  rho_full(idx, idx) = 1.0;
  auto full = numeric_decay_rates(gen, &rho_full);
  REQUIRE(full.size() == 16);

  bool extra_freq = false;
  for (const auto& m : full) {
    double f = std::abs(m.frequency);
    if (std::abs(f) > 1e-9 && std::abs(f - shifted) > 0.1) extra_freq = true;
    if (m.visibility > 1e-8) {
      bool known = std::abs(f) < 1e-6 || std::abs(f - shifted) < 1e-6;
      CHECK(known);
      if (std::abs(f - shifted) < 1e-6) CHECK(m.rate == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(extra_freq);
}

TEST_CASE("weak-noise sector frequencies approach the closed spectrum") {
  ChainConfig cfg;
  cfg.n = 6;
  cfg.noise_sites = {3};
  cfg.gamma = 0.01;
  auto modes = sector_decay_rates(cfg);

  // gamma = 0 sector frequencies: differences of the periodic one-excitation
  // spectrum {0, 1, 1, 3, 3, 4} (shifted by -g n, which drops out)
  auto spec = spectral_decompose(sector_generator(cfg).h);
  std::vector<double> diffs;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) diffs.push_back(spec.evals(a) - spec.evals(b));

  int dark = 0;
  for (const auto& m : modes) {
    double best = 1e9;
    for (double d : diffs) best = std::min(best, std::abs(m.frequency - d));
    CHECK(best < 5e-3);
    if (std::abs(m.frequency) > 0.5 && m.rate < 1e-6) {
      ++dark;
      CHECK(std::abs(std::abs(m.frequency) - 2.0) < 1e-3);
    }
  }
  CHECK(dark == 2);
}
