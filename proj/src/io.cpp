#include "spinsync/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace spinsync::io {

namespace {

double parse_double(std::string_view field, const std::filesystem::path& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::invalid_argument("malformed numeric field '" + std::string(field) + "' in " +
                                path.string());
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

struct PairCols {
  int u, v;
  int pu = -1, pv = -1, rec = -1, imc = -1;
};

bool parse_pair_name(const std::string& name, std::string_view prefix, int& u, int& v) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return false;
  std::string_view rest(name.data() + prefix.size(), name.size() - prefix.size());
  size_t sep = rest.find('_');
  if (sep == std::string_view::npos) return false;
  auto num = [](std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  return num(rest.substr(0, sep), u) && num(rest.substr(sep + 1), v);
}

}  // namespace

std::string format12(double v) {
  char buf[48];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format12(row[i]);
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed on " + path.string());
}

void write_trace_csv(const std::filesystem::path& path, const Trace& t) {
  std::vector<std::string> header;
  header.push_back("tau");
  for (const auto& n : t.names) header.push_back(n);
  for (const auto& ps : t.pairs) {
    std::string suffix = "_" + std::to_string(ps.u) + "_" + std::to_string(ps.v);
    header.push_back("pu" + suffix);
    header.push_back("pv" + suffix);
    header.push_back("rec" + suffix);
    header.push_back("imc" + suffix);
  }
  std::vector<std::vector<double>> rows(t.tau.size());
  for (size_t i = 0; i < t.tau.size(); ++i) {
    auto& row = rows[i];
    row.reserve(header.size());
    row.push_back(t.tau[i]);
    for (const auto& c : t.cols) row.push_back(c[i]);
    for (const auto& ps : t.pairs) {
      const auto& rho = ps.rho[i];
      row.push_back(rho(1, 1).real());
      row.push_back(rho(2, 2).real());
      row.push_back(rho(1, 2).real());
      row.push_back(rho(1, 2).imag());
    }
  }
  write_csv(path, header, rows);
}

int Table::col(std::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> Table::column(std::string_view name) const {
  int c = col(name);
  if (c < 0) throw std::out_of_range("missing column: " + std::string(name));
  std::vector<double> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][c];
  return out;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(f, line)) throw std::invalid_argument("empty csv: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (auto h : split(line)) t.header.emplace_back(h);
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header.size())
      throw std::invalid_argument("row width does not match the header in " + path.string());
    std::vector<double> row(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) row[i] = parse_double(fields[i], path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Trace trace_from_table(const Table& table) {
  int tau_col = table.col("tau");
  if (tau_col < 0) throw std::invalid_argument("trace file needs a tau column");
  Trace t;
  t.tau = table.column("tau");

  std::vector<PairCols> pairs;
  auto pair_slot = [&](int u, int v) -> PairCols& {
    for (auto& p : pairs)
      if (p.u == u && p.v == v) return p;
    pairs.push_back({u, v});
    return pairs.back();
  };
  for (size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (static_cast<int>(c) == tau_col) continue;
    int u = 0, v = 0;
    if (parse_pair_name(name, "pu_", u, v))
      pair_slot(u, v).pu = static_cast<int>(c);
    else if (parse_pair_name(name, "pv_", u, v))
      pair_slot(u, v).pv = static_cast<int>(c);
    else if (parse_pair_name(name, "rec_", u, v))
      pair_slot(u, v).rec = static_cast<int>(c);
    else if (parse_pair_name(name, "imc_", u, v))
      pair_slot(u, v).imc = static_cast<int>(c);
    else {
      t.names.push_back(name);
      t.cols.push_back(table.column(name));
    }
  }
  for (const auto& p : pairs) {
    if (p.pu < 0 || p.pv < 0 || p.rec < 0 || p.imc < 0)
      throw std::invalid_argument("incomplete pair columns for sites " + std::to_string(p.u) +
                                  "," + std::to_string(p.v));
    PairSeries ps;
    ps.u = p.u;
    ps.v = p.v;
    ps.rho.reserve(table.rows.size());
    for (const auto& row : table.rows) {
      Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
      double pu = row[p.pu], pv = row[p.pv];
      rho(0, 0) = 1.0 - pu - pv;
      rho(1, 1) = pu;
      rho(2, 2) = pv;
      rho(1, 2) = cplx(row[p.rec], row[p.imc]);
      rho(2, 1) = std::conj(rho(1, 2));
      ps.rho.push_back(rho);
    }
    t.pairs.push_back(std::move(ps));
  }
  return t;
}

std::filesystem::path resolve_out(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    const char* base = std::getenv("SPINSYNC_OUT_DIR");
    if (base != nullptr && *base != '\0') return std::filesystem::path(base) / p;
  }
  return p;
}

void write_sidecar(const std::filesystem::path& csv_path, const std::string& json_text) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << json_text;
  if (json_text.empty() || json_text.back() != '\n') f << '\n';
  if (!f) throw std::runtime_error("write failed on " + p.string());
}

}  // namespace spinsync::io
