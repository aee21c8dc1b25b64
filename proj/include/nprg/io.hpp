#pragma once
// Run configuration, JSON result documents, and CSV plot tables.
//
// Result documents are byte-deterministic for identical configurations:
// wall-clock data goes to a separate .meta.json sidecar, never into results.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nprg/flow.hpp"
#include "nprg/model.hpp"
#include "nprg/scan.hpp"
#include "nprg/spectral.hpp"

namespace nprg {

struct ScanConfig {
  std::vector<double> eta_grid;             // explicit grid; empty = refinement recipe
  EtaGridSettings recipe;
  double window_chi_ratio{5.0};
  double window_chi_ratio_hi{100.0};
  std::vector<double> lambdas{0.3, 0.5, 1.0};  // surface sweep
};

struct RunConfig {
  ModelParams model;
  bool units_explicit{false};  // M, hbar, omega0 set by the user
  double qmax{kDefaultQmax};
  int grid_n{kDefaultGridN};
  FlowSettings flow;
  SpectralSettings spectral;
  ScanConfig scan;
  int fit_window{9};
  int jobs{0};                 // 0 = all threads
  std::string out_dir{"."};
  std::string format{"json"};  // "csv" additionally writes plot tables
  std::string fit_input;       // scan CSV path for the fit command

  void validate() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

// FNV-1a 64-bit hex digest of the canonical config dump.
std::string config_hash(const RunConfig& cfg);

// Envelope shared by every command's result document.
nlohmann::json result_document(const std::string& command, const RunConfig& cfg,
                               nlohmann::json result);

// Temp file + rename; never leaves partial output at the target path.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form (matches JSON number formatting).
std::string format_double(double x);

// CSV plot tables (LF line endings, '.' decimal separator).
std::string csv_flow_potential(const PotentialGrid& bare, const PotentialGrid& effective);
std::string csv_flow_trace(const std::vector<TracePoint>& trace);
std::string csv_scan(const ScanTable& table);
std::string csv_surface(const std::vector<SurfaceRow>& rows);

// Parses a table written by csv_scan (used by the fit command).
ScanTable read_scan_csv(const std::filesystem::path& path, double lam);

nlohmann::json scan_table_to_json(const ScanTable& table);
nlohmann::json fit_result_to_json(const FitResult& fit);
nlohmann::json surface_to_json(const std::vector<SurfaceRow>& rows);
nlohmann::json spectral_to_json(const SpectralResult& res);
nlohmann::json flow_outcome_to_json(const FlowOutcome& outcome);

}  // namespace nprg
