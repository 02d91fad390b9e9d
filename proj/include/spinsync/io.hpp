#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spinsync/trace.hpp"

namespace spinsync::io {

// 12 significant digits, '.' decimal point, locale-independent.
std::string format12(double v);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Trace channels plus, per recorded pair (u,v), the sufficient statistics of
// the reduced two-qubit state: pu_u_v, pv_u_v, rec_u_v, imc_u_v.
void write_trace_csv(const std::filesystem::path& path, const Trace& t);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int col(std::string_view name) const;  // -1 if absent
  std::vector<double> column(std::string_view name) const;  // throws if absent
};

Table read_csv(const std::filesystem::path& path);
Trace trace_from_table(const Table& table);  // rebuilds pair series if present

// Applies the output-directory override (SPINSYNC_OUT_DIR) to relative paths.
std::filesystem::path resolve_out(const std::string& out);

// Writes pre-serialized JSON next to the CSV (extension replaced by .json).
void write_sidecar(const std::filesystem::path& csv_path, const std::string& json_text);

}  // namespace spinsync::io
