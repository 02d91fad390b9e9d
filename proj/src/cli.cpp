#include "spinsync/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spinsync/config.hpp"
#include "spinsync/hilbert.hpp"
#include "spinsync/io.hpp"
#include "spinsync/jw.hpp"
#include "spinsync/master.hpp"
#include "spinsync/metrics.hpp"
#include "spinsync/stochastic.hpp"
#include "spinsync/sync.hpp"

namespace spinsync {

namespace {

using nlohmann::ordered_json;

std::vector<std::pair<int, int>> parse_flat_pairs(const std::vector<int>& flat, const char* what) {
  if (flat.size() % 2 != 0)
    throw std::invalid_argument(std::string(what) + " needs an even number of entries");
  std::vector<std::pair<int, int>> out;
  for (size_t i = 0; i < flat.size(); i += 2) out.push_back({flat[i], flat[i + 1]});
  return out;
}

ordered_json chain_json(const ChainConfig& c) {
  ordered_json j;
  j["n"] = c.n;
  j["j"] = c.j;
  j["g"] = c.g;
  j["gamma"] = c.gamma;
  j["noise_sites"] = c.noise_sites;
  j["detuning"] = c.detuning;
  j["tmax"] = c.t_max;
  j["dt"] = c.dt;
  j["dt_internal"] = c.dt_internal;
  return j;
}

void add_chain_options(CLI::App* cmd, ChainConfig& c) {
  cmd->add_option("--n", c.n, "chain length (even)")->capture_default_str();
  cmd->add_option("--j", c.j, "hopping J")->capture_default_str();
  cmd->add_option("--g", c.g, "field g")->capture_default_str();
  cmd->add_option("--gamma", c.gamma, "noise strength")->capture_default_str();
  cmd->add_option("--noise-sites", c.noise_sites, "dephased sites, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--detuning", c.detuning, "field offset +d/2 at site 1, -d/2 at site 5")
      ->capture_default_str();
  cmd->add_option("--tmax", c.t_max, "final time")->capture_default_str();
  cmd->add_option("--dt", c.dt, "output grid step")->capture_default_str();
  cmd->add_option("--dt-internal", c.dt_internal, "integrator step")->capture_default_str();
}

void report(const std::filesystem::path& path, size_t rows) {
  std::cout << "wrote " << path.string() << " (" << rows << " rows)\n";
}

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

// key=value lines applied to cmd's options; values given on the command line
// win. CLI11 only processes config files attached to the top-level app, so
// per-subcommand files are handled here.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key=value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\'')))
      value = value.substr(1, value.size() - 2);
    CLI::Option* op = cmd->get_option_no_throw("--" + key);
    if (op == nullptr) throw std::invalid_argument("unknown config key: " + key);
    if (op->count() > 0) continue;
    op->add_result(value);
    op->run_callback();
  }
}

struct SimulateArgs {
  ChainConfig chain;
  std::string backend = "jw";
  std::string out = "trace.csv";
  std::vector<int> pair_flat;
  std::vector<std::string> channels;
  int trajectories = 2000;
  std::uint64_t seed = 1;
};

void run_simulate(const SimulateArgs& a) {
  ChainConfig cfg = a.chain;
  cfg.trajectories = a.trajectories;
  cfg.seed = a.seed;
  cfg.validate();
  bool want_purity = false, want_loschmidt = false;
  for (const auto& ch : a.channels) {
    if (ch == "purity")
      want_purity = true;
    else if (ch == "loschmidt")
      want_loschmidt = true;
    else
      throw std::invalid_argument("unknown channel: " + ch);
  }
  auto pairs = parse_flat_pairs(a.pair_flat, "--pairs");
  auto path = io::resolve_out(a.out);

  ordered_json sidecar;
  sidecar["command"] = "simulate";
  sidecar["backend"] = a.backend;
  sidecar["config"] = chain_json(cfg);
  sidecar["channels"] = a.channels;
  {
    ordered_json jp = ordered_json::array();
    for (auto [u, v] : pairs) jp.push_back({u, v});
    sidecar["pairs"] = jp;
  }
  sidecar["csv"] = a.out;

  size_t rows = 0;
  if (a.backend == "full") {
    if (cfg.n > 12) throw std::invalid_argument("backend=full requires n <= 12");
    MasterGenerator gen = make_generator(cfg);
    EvolveOptions opt = options_from(cfg);
    opt.pairs = pairs;
    opt.with_purity = want_purity;
    opt.with_loschmidt = want_loschmidt;
    Mat rho0 = Mat::Zero(1 << cfg.n, 1 << cfg.n);
    int idx = one_excitation_index(1, cfg.n);
    rho0(idx, idx) = 1.0;
    Trace t = evolve_master(rho0, gen, opt);
    io::write_trace_csv(path, t);
    rows = t.tau.size();
  } else if (a.backend == "jw") {
    jw::ZGenerator gen = jw::ring_generator(cfg);
    jw::ZEvolveOptions opt;
    opt.t_max = cfg.t_max;
    opt.dt = cfg.dt;
    opt.dt_internal = cfg.dt_internal;
    opt.pairs = pairs;
    opt.with_purity = want_purity;
    opt.with_loschmidt = want_loschmidt;
    Mat z0 = Mat::Zero(cfg.n, cfg.n);
    z0(0, 0) = 1.0;
    Trace t = jw::evolve_z(z0, gen, opt);
    io::write_trace_csv(path, t);
    rows = t.tau.size();
  } else if (a.backend == "stochastic") {
    if (want_purity || want_loschmidt)
      throw std::invalid_argument("scalar channels need a state-carrying backend (full or jw)");
    if (!pairs.empty())
      throw std::invalid_argument("pair statistics need a state-carrying backend (full or jw)");
    auto r = stoch::ensemble_average(cfg, cfg.trajectories, cfg.seed);
    std::vector<std::string> header{"tau"};
    for (const auto& nme : r.names) header.push_back(nme);
    for (int s = 1; s <= cfg.n; ++s) header.push_back("se_" + std::to_string(s));
    std::vector<std::vector<double>> out_rows(r.tau.size());
    for (size_t i = 0; i < r.tau.size(); ++i) {
      auto& row = out_rows[i];
      row.reserve(header.size());
      row.push_back(r.tau[i]);
      for (int s = 0; s < cfg.n; ++s) row.push_back(r.mean[s][i]);
      for (int s = 0; s < cfg.n; ++s) row.push_back(r.se[s][i]);
    }
    io::write_csv(path, header, out_rows);
    rows = out_rows.size();
    sidecar["trajectories"] = cfg.trajectories;
    ordered_json js;
    js["master"] = cfg.seed;
    js["per_trajectory"] = "splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)";
    sidecar["seeds"] = js;
  } else {
    throw std::invalid_argument("unknown backend: " + a.backend);
  }
  io::write_sidecar(path, sidecar.dump(2));
  report(path, rows);
}

struct DecayRatesArgs {
  ChainConfig chain;
  double gamma = 1e-3;
  std::string method = "both";
  std::string out = "decay_rates.csv";
};

void run_decay_rates(const DecayRatesArgs& a) {
  const auto& c = a.chain;
  std::vector<std::string> header{"k", "l", "freq", "m_analytic", "m_numeric", "rel_err"};
  std::vector<std::vector<double>> rows;
  double nan = metrics::undefined_marker;
  if (a.method == "analytic") {
    for (const auto& e : sync::degenerate_block_rates(c.n, c.noise_sites, 1e-9, c.j, c.g))
      rows.push_back({double(e.k), double(e.l), e.frequency, e.rate, nan, nan});
  } else if (a.method == "numeric") {
    for (const auto& e : sync::numeric_rates(c.n, c.noise_sites, a.gamma, c.j, c.g))
      rows.push_back({double(e.k), double(e.l), e.frequency, nan, e.rate, nan});
  } else if (a.method == "both") {
    for (const auto& e : sync::compare_rates(c.n, c.noise_sites, a.gamma, c.j, c.g)) {
      if (e.rel_err > 0.02)
        throw std::runtime_error("analytic and numeric rates disagree beyond 2% at pair (" +
                                 std::to_string(e.k) + "," + std::to_string(e.l) + ")");
      rows.push_back({double(e.k), double(e.l), e.frequency, e.analytic, e.numeric, e.rel_err});
    }
  } else {
    throw std::invalid_argument("unknown method: " + a.method);
  }
  auto path = io::resolve_out(a.out);
  io::write_csv(path, header, rows);
  ordered_json sidecar;
  sidecar["command"] = "decay-rates";
  sidecar["method"] = a.method;
  sidecar["n"] = c.n;
  sidecar["j"] = c.j;
  sidecar["g"] = c.g;
  sidecar["noise_sites"] = c.noise_sites;
  sidecar["gamma"] = a.gamma;
  sidecar["csv"] = a.out;
  io::write_sidecar(path, sidecar.dump(2));
  report(path, rows.size());
}

struct SyncSearchArgs {
  int n_max = 12;
  int max_noise_sites = 2;
  std::string out = "sync_configs.csv";
};

void run_sync_search(const SyncSearchArgs& a) {
  std::vector<std::string> header{"n", "u", "v", "k", "l", "zero_pairs", "stable_sync"};
  std::vector<std::vector<double>> rows;
  for (const auto& r : sync::find_sync_configs(a.n_max, a.max_noise_sites)) {
    double u = r.sites[0];
    double v = r.sites.size() > 1 ? r.sites[1] : 0.0;
    rows.push_back({double(r.n), u, v, double(r.k), double(r.l), double(r.zero_pairs),
                    r.stable_sync ? 1.0 : 0.0});
  }
  auto path = io::resolve_out(a.out);
  io::write_csv(path, header, rows);
  ordered_json sidecar;
  sidecar["command"] = "sync-search";
  sidecar["n_max"] = a.n_max;
  sidecar["max_noise_sites"] = a.max_noise_sites;
  sidecar["csv"] = a.out;
  io::write_sidecar(path, sidecar.dump(2));
  report(path, rows.size());
}

struct MetricsArgs {
  std::string trace;
  std::vector<int> r_flat{1, 5, 2, 4, 1, 2};
  double window = 2.0 * pi;
  double threshold = 0.999;
  std::string out = "metrics.csv";
};

void run_metrics(const MetricsArgs& a) {
  Trace t = io::trace_from_table(io::read_csv(a.trace));
  if (t.tau.size() < 2) throw std::invalid_argument("trace has fewer than two rows");
  auto pairs = parse_flat_pairs(a.r_flat, "--r");
  std::vector<std::string> header{"tau"};
  std::vector<std::vector<double>> cols;
  cols.push_back(t.tau);
  size_t len = t.tau.size();

  ordered_json speaks = ordered_json::array();
  for (size_t ci = 0; ci < t.names.size(); ++ci) {
    const std::string& nme = t.names[ci];
    if (nme.rfind("sz_", 0) != 0) continue;
    auto s = metrics::fft_spectrum(t.cols[ci], t.dt());
    ordered_json e;
    e["channel"] = nme;
    e["peak_freq"] = s.peak_freq;
    e["peak_amp"] = s.peak_amp;
    e["peak_freq_refined"] = s.peak_freq_refined;
    speaks.push_back(e);
  }

  ordered_json jsync = ordered_json::array();
  for (auto [u, v] : pairs) {
    std::string su = std::to_string(u), sv = std::to_string(v);
    auto r = metrics::windowed_pearson(t, "sz_" + su, "sz_" + sv, a.window);
    auto ts = metrics::sync_time(r, t.tau, a.threshold);
    ordered_json e;
    e["pair"] = {u, v};
    if (ts)
      e["tau_s"] = *ts;
    else
      e["tau_s"] = nullptr;
    jsync.push_back(e);
    r.resize(len, metrics::undefined_marker);
    header.push_back("r_" + su + "_" + sv);
    cols.push_back(std::move(r));
    const auto& xu = t.channel("sz_" + su);
    const auto& xv = t.channel("sz_" + sv);
    std::vector<double> d(len);
    for (size_t i = 0; i < len; ++i) d[i] = 0.5 * std::abs(xu[i] - xv[i]);
    header.push_back("d_" + su + "_" + sv);
    cols.push_back(std::move(d));
  }

  for (const auto& ps : t.pairs) {
    std::string suffix = "_" + std::to_string(ps.u) + "_" + std::to_string(ps.v);
    std::vector<double> conc(len), ef(len), mi(len);
    for (size_t i = 0; i < len; ++i) {
      conc[i] = metrics::concurrence(ps.rho[i]);
      ef[i] = metrics::entanglement_of_formation(ps.rho[i]);
      mi[i] = metrics::mutual_information(ps.rho[i]);
    }
    header.push_back("conc" + suffix);
    cols.push_back(std::move(conc));
    header.push_back("ef" + suffix);
    cols.push_back(std::move(ef));
    header.push_back("mi" + suffix);
    cols.push_back(std::move(mi));
  }

  std::vector<std::vector<double>> rows(len, std::vector<double>(header.size()));
  for (size_t i = 0; i < len; ++i)
    for (size_t c = 0; c < header.size(); ++c) rows[i][c] = cols[c][i];
  auto path = io::resolve_out(a.out);
  io::write_csv(path, header, rows);

  ordered_json sidecar;
  sidecar["command"] = "metrics";
  sidecar["trace"] = a.trace;
  sidecar["window"] = a.window;
  sidecar["threshold"] = a.threshold;
  sidecar["sync_times"] = jsync;
  sidecar["fft_peaks"] = speaks;
  sidecar["csv"] = a.out;
  io::write_sidecar(path, sidecar.dump(2));
  report(path, rows.size());
}

struct SweepArgs {
  ChainConfig chain;
  std::vector<double> gamma_grid{0.0, 0.05, 0.1, 0.2, 0.3};
  std::vector<double> delta_grid;
  double at = 4.5 * pi;
  double window = 2.0 * pi;
  double threshold = 0.999;
  std::string out = "sweep.csv";
};

void run_sweep(const SweepArgs& a) {
  std::vector<double> deltas = a.delta_grid;
  if (deltas.empty())
    for (int i = 0; i <= 10; ++i) deltas.push_back(0.05 * i);
  ChainConfig base = a.chain;
  base.t_max = std::max(base.t_max, a.at + a.window + base.dt);
  size_t ng = a.gamma_grid.size(), nd = deltas.size();
  std::vector<std::vector<double>> rows(ng * nd);

  std::exception_ptr failure;
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (size_t gi = 0; gi < ng; ++gi)
    for (size_t di = 0; di < nd; ++di) {
      try {
        ChainConfig cfg = base;
        cfg.gamma = a.gamma_grid[gi];
        cfg.detuning = deltas[di];
        cfg.validate();
        jw::ZGenerator gen = jw::ring_generator(cfg);
        jw::ZEvolveOptions opt;
        opt.t_max = cfg.t_max;
        opt.dt = cfg.dt;
        opt.dt_internal = cfg.dt_internal;
        opt.with_purity = false;
        opt.with_loschmidt = false;
        Mat z0 = Mat::Zero(cfg.n, cfg.n);
        z0(0, 0) = 1.0;
        Trace t = jw::evolve_z(z0, gen, opt);
        auto r = metrics::windowed_pearson(t, "sz_1", "sz_5", a.window);
        size_t at_idx = static_cast<size_t>(std::lround(a.at / cfg.dt));
        if (at_idx >= r.size()) throw std::runtime_error("sweep window exceeds the trace");
        double r15 = r[at_idx];
        double locked = !metrics::is_undefined(r15) && r15 >= a.threshold ? 1.0 : 0.0;
        rows[gi * nd + di] = {cfg.gamma, cfg.detuning, r15, locked};
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::string> header{"gamma", "delta", "r_15", "locked"};
  auto path = io::resolve_out(a.out);
  io::write_csv(path, header, rows);

  ordered_json widths = ordered_json::array();
  for (size_t gi = 0; gi < ng; ++gi) {
    int locked_count = 0;
    for (size_t di = 0; di < nd; ++di) locked_count += rows[gi * nd + di][3] > 0.5 ? 1 : 0;
    ordered_json e;
    e["gamma"] = a.gamma_grid[gi];
    e["locked_points"] = locked_count;
    widths.push_back(e);
  }
  ordered_json sidecar;
  sidecar["command"] = "sweep";
  sidecar["config"] = chain_json(base);
  sidecar["gamma_grid"] = a.gamma_grid;
  sidecar["delta_grid"] = deltas;
  sidecar["at"] = a.at;
  sidecar["window"] = a.window;
  sidecar["threshold"] = a.threshold;
  sidecar["widths"] = widths;
  sidecar["csv"] = a.out;
  io::write_sidecar(path, sidecar.dump(2));
  report(path, rows.size());
}

}  // namespace

int cli_main(std::vector<std::string> args) {
  CLI::App app{"noise-induced synchronization in periodic XX spin chains"};
  app.require_subcommand(1);

  std::string sim_cfg, dr_cfg, ss_cfg, me_cfg, sw_cfg;

  SimulateArgs sim;
  auto* csim = app.add_subcommand("simulate", "evolve the chain and write a trace CSV");
  add_chain_options(csim, sim.chain);
  csim->add_option("--backend", sim.backend, "full | jw | stochastic")
      ->check(CLI::IsMember({"full", "jw", "stochastic"}))
      ->capture_default_str();
  csim->add_option("--pairs", sim.pair_flat, "site pairs for reduced-state columns, flattened")
      ->delimiter(',');
  csim->add_option("--channels", sim.channels, "extra scalar channels: purity, loschmidt")
      ->delimiter(',');
  csim->add_option("--trajectories", sim.trajectories, "ensemble size (stochastic)")
      ->capture_default_str();
  csim->add_option("--seed", sim.seed, "master seed (stochastic)")->capture_default_str();
  csim->add_option("--out", sim.out, "output CSV path")->capture_default_str();
  csim->add_option("--config", sim_cfg, "key-value config file; flags override");

  DecayRatesArgs dr;
  auto* cdr = app.add_subcommand("decay-rates", "analytic vs numeric decay-rate table");
  cdr->add_option("--n", dr.chain.n, "chain length (even)")->capture_default_str();
  cdr->add_option("--j", dr.chain.j, "hopping J")->capture_default_str();
  cdr->add_option("--g", dr.chain.g, "field g")->capture_default_str();
  cdr->add_option("--noise-sites", dr.chain.noise_sites, "dephased sites")
      ->delimiter(',')
      ->capture_default_str();
  cdr->add_option("--gamma", dr.gamma, "noise strength for the numeric method")
      ->capture_default_str();
  cdr->add_option("--method", dr.method, "analytic | numeric | both")
      ->check(CLI::IsMember({"analytic", "numeric", "both"}))
      ->capture_default_str();
  cdr->add_option("--out", dr.out, "output CSV path")->capture_default_str();
  cdr->add_option("--config", dr_cfg, "key-value config file; flags override");

  SyncSearchArgs ss;
  auto* css = app.add_subcommand("sync-search", "enumerate synchronizing configurations");
  css->add_option("--nmax", ss.n_max, "largest chain length")->capture_default_str();
  css->add_option("--max-noise-sites", ss.max_noise_sites, "1 or 2")->capture_default_str();
  css->add_option("--out", ss.out, "output CSV path")->capture_default_str();
  css->add_option("--config", ss_cfg, "key-value config file; flags override");

  MetricsArgs me;
  auto* cme = app.add_subcommand("metrics", "evaluate metrics on a trace CSV");
  cme->add_option("trace", me.trace, "input trace CSV")->required();
  cme->add_option("--r", me.r_flat, "site pairs for windowed correlation, flattened")
      ->delimiter(',')
      ->capture_default_str();
  cme->add_option("--window", me.window, "correlation window")->capture_default_str();
  cme->add_option("--threshold", me.threshold, "lock threshold")->capture_default_str();
  cme->add_option("--out", me.out, "output CSV path")->capture_default_str();
  cme->add_option("--config", me_cfg, "key-value config file; flags override");

  SweepArgs sw;
  auto* csw = app.add_subcommand("sweep", "gamma x detuning grid of r_15");
  add_chain_options(csw, sw.chain);
  csw->add_option("--gamma-grid", sw.gamma_grid, "gamma values")
      ->delimiter(',')
      ->capture_default_str();
  csw->add_option("--delta-grid", sw.delta_grid, "detuning values (default 0..0.5 step 0.05)")
      ->delimiter(',');
  csw->add_option("--at", sw.at, "window start time")->capture_default_str();
  csw->add_option("--window", sw.window, "correlation window")->capture_default_str();
  csw->add_option("--threshold", sw.threshold, "lock threshold")->capture_default_str();
  csw->add_option("--out", sw.out, "output CSV path")->capture_default_str();
  csw->add_option("--config", sw_cfg, "key-value config file; flags override");

  try {
    std::reverse(args.begin(), args.end());  // CLI11 vector overload wants reversed args
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (csim->parsed()) {
      apply_config_file(csim, sim_cfg);
      run_simulate(sim);
    }
    if (cdr->parsed()) {
      apply_config_file(cdr, dr_cfg);
      run_decay_rates(dr);
    }
    if (css->parsed()) {
      apply_config_file(css, ss_cfg);
      run_sync_search(ss);
    }
    if (cme->parsed()) {
      apply_config_file(cme, me_cfg);
      run_metrics(me);
    }
    if (csw->parsed()) {
      apply_config_file(csw, sw_cfg);
      run_sweep(sw);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace spinsync
