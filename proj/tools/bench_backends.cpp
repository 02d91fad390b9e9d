#include <chrono>
#include <cstdio>
#include <string>

#include "spinsync/config.hpp"
#include "spinsync/hilbert.hpp"
#include "spinsync/master.hpp"
#include "spinsync/stochastic.hpp"

using namespace spinsync;

namespace {

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds(t0, std::chrono::steady_clock::now());
}

void report(const char* name, double t_serial, double t_omp, bool match) {
  std::printf("%-22s %10.3f ms %10.3f ms %8.2fx   %s\n", name, 1e3 * t_serial, 1e3 * t_omp,
              t_serial / t_omp, match ? "bitwise match" : "MISMATCH");
}

}  // namespace

int main() {
  bool ok = true;
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    ChainConfig cfg;
    cfg.n = 8;
    cfg.noise_sites = {3};
    cfg.t_max = 1.0;
    cfg.dt = 0.02;
    cfg.dt_internal = 2e-3;
    auto gen = make_generator(cfg);
    int dim = 1 << cfg.n;
    Mat rho0 = Mat::Zero(dim, dim);
    rho0(one_excitation_index(1, cfg.n), one_excitation_index(1, cfg.n)) = 1.0;
    auto opt = options_from(cfg);

    Trace serial, parallel;
    opt.mode = ExecMode::Serial;
    double ts = timed([&] { serial = evolve_master(rho0, gen, opt); });
    opt.mode = ExecMode::OpenMP;
    double tp = timed([&] { parallel = evolve_master(rho0, gen, opt); });
    bool match = serial.tau == parallel.tau && serial.cols == parallel.cols;
    ok = ok && match;
    report("evolve_master n=8", ts, tp, match);
  }

  {
    ChainConfig cfg;
    cfg.t_max = 10.0;
    cfg.dt = 0.05;
    int m = 64;
    stoch::EnsembleResult serial, parallel;
    double ts = timed([&] {
      serial = stoch::ensemble_average(cfg, m, 7, stoch::TrajectoryPicture::Correlation,
                                       ExecMode::Serial);
    });
    double tp = timed([&] {
      parallel = stoch::ensemble_average(cfg, m, 7, stoch::TrajectoryPicture::Correlation,
                                         ExecMode::OpenMP);
    });
    bool match = serial.tau == parallel.tau && serial.mean == parallel.mean &&
                 serial.se == parallel.se;
    ok = ok && match;
    report("ensemble n=6 m=64", ts, tp, match);
  }

  if (!ok) {
    std::fprintf(stderr, "backend outputs differ\n");
    return 1;
  }
  return 0;
}
