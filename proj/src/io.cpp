#include "nprg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nprg/version.hpp"

namespace nprg {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw std::invalid_argument(std::string("unknown config key '") + key + "' in " + where);
  }
}

template <class T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json nan_to_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "converged") return StopReason::converged;
  if (s == "reached_t_max") return StopReason::reached_t_max;
  if (s == "spinodal") return StopReason::spinodal;
  throw std::invalid_argument("unknown stop reason '" + s + "'");
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  flow.validate();
  spectral.validate();
  scan.recipe.validate();
  if (grid_n < 32 || !(qmax > 0.0))
    throw std::invalid_argument("invalid parameter: grid needs n >= 32 and qmax > 0");
  if (fit_window < 5) throw std::invalid_argument("invalid parameter: fit_window must be >= 5");
  if (jobs < 0) throw std::invalid_argument("invalid parameter: jobs must be >= 0");
  if (format != "json" && format != "csv")
    throw std::invalid_argument("invalid parameter: format must be json or csv");
  for (std::size_t i = 0; i < scan.eta_grid.size(); ++i) {
    if (!(scan.eta_grid[i] >= 0.0))
      throw std::invalid_argument("invalid parameter: eta grid must be >= 0");
    if (i > 0 && !(scan.eta_grid[i] > scan.eta_grid[i - 1]))
      throw std::invalid_argument("invalid parameter: eta grid must be strictly increasing");
  }
  for (double lam : scan.lambdas)
    if (!(lam > 0.0)) throw std::invalid_argument("invalid parameter: lambdas must be > 0");
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["model"] = {{"mass", cfg.model.mass},     {"hbar", cfg.model.hbar},
                {"omega0", cfg.model.omega0}, {"lambda0", cfg.model.lambda0},
                {"eta", cfg.model.eta},       {"cutoff", cfg.model.cutoff}};
  j["units_explicit"] = cfg.units_explicit;
  j["grid"] = {{"qmax", cfg.qmax}, {"n", cfg.grid_n}};
  j["flow"] = {{"t_max", cfg.flow.t_max},
               {"dt", cfg.flow.dt},
               {"stencil_order", cfg.flow.stencil_order},
               {"spinodal_eps", cfg.flow.spinodal_eps},
               {"convergence_tol", cfg.flow.convergence_tol},
               {"cfl_safety", cfg.flow.cfl_safety},
               {"trace_stride", cfg.flow.trace_stride},
               {"max_steps", cfg.flow.max_steps},
               {"backend", cfg.flow.backend == kernels::Backend::openmp ? "openmp" : "serial"}};
  j["spectral"] = {{"box_halfwidth", cfg.spectral.box_halfwidth},
                   {"basis_size", cfg.spectral.basis_size},
                   {"tilt", cfg.spectral.tilt},
                   {"eigencount", cfg.spectral.eigencount}};
  j["scan"] = {{"eta_grid", cfg.scan.eta_grid},
               {"recipe",
                {{"coarse_step_factor", cfg.scan.recipe.coarse_step_factor},
                 {"cap_factor", cfg.scan.recipe.cap_factor},
                 {"bisections", cfg.scan.recipe.bisections},
                 {"ladder_points", cfg.scan.recipe.ladder_points},
                 {"ladder_depth", cfg.scan.recipe.ladder_depth},
                 {"ladder_dmin_rel", cfg.scan.recipe.ladder_dmin_rel}}},
               {"window_chi_ratio", cfg.scan.window_chi_ratio},
               {"window_chi_ratio_hi", cfg.scan.window_chi_ratio_hi},
               {"lambdas", cfg.scan.lambdas}};
  j["fit_window"] = cfg.fit_window;
  j["jobs"] = cfg.jobs;
  j["out_dir"] = cfg.out_dir;
  j["format"] = cfg.format;
  j["fit_input"] = cfg.fit_input;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  check_keys(j, {"model", "units_explicit", "grid", "flow", "spectral", "scan", "fit_window",
                 "jobs", "out_dir", "format", "fit_input"},
             "config");
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, {"mass", "hbar", "omega0", "lambda0", "eta", "cutoff"}, "model");
    get_if(m, "mass", cfg.model.mass);
    get_if(m, "hbar", cfg.model.hbar);
    get_if(m, "omega0", cfg.model.omega0);
    get_if(m, "lambda0", cfg.model.lambda0);
    get_if(m, "eta", cfg.model.eta);
    get_if(m, "cutoff", cfg.model.cutoff);
  }
  get_if(j, "units_explicit", cfg.units_explicit);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, {"qmax", "n"}, "grid");
    get_if(g, "qmax", cfg.qmax);
    get_if(g, "n", cfg.grid_n);
  }
  if (j.contains("flow")) {
    const json& f = j.at("flow");
    check_keys(f,
               {"t_max", "dt", "stencil_order", "spinodal_eps", "convergence_tol", "cfl_safety",
                "trace_stride", "max_steps", "backend"},
               "flow");
    get_if(f, "t_max", cfg.flow.t_max);
    get_if(f, "dt", cfg.flow.dt);
    get_if(f, "stencil_order", cfg.flow.stencil_order);
    get_if(f, "spinodal_eps", cfg.flow.spinodal_eps);
    get_if(f, "convergence_tol", cfg.flow.convergence_tol);
    get_if(f, "cfl_safety", cfg.flow.cfl_safety);
    get_if(f, "trace_stride", cfg.flow.trace_stride);
    get_if(f, "max_steps", cfg.flow.max_steps);
    if (f.contains("backend")) {
      const std::string b = f.at("backend").get<std::string>();
      if (b == "openmp")
        cfg.flow.backend = kernels::Backend::openmp;
      else if (b == "serial")
        cfg.flow.backend = kernels::Backend::serial;
      else
        throw std::invalid_argument("invalid parameter: backend must be serial or openmp");
    }
  }
  if (j.contains("spectral")) {
    const json& s = j.at("spectral");
    check_keys(s, {"box_halfwidth", "basis_size", "tilt", "eigencount"}, "spectral");
    get_if(s, "box_halfwidth", cfg.spectral.box_halfwidth);
    get_if(s, "basis_size", cfg.spectral.basis_size);
    get_if(s, "tilt", cfg.spectral.tilt);
    get_if(s, "eigencount", cfg.spectral.eigencount);
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    check_keys(s, {"eta_grid", "recipe", "window_chi_ratio", "window_chi_ratio_hi", "lambdas"},
               "scan");
    get_if(s, "eta_grid", cfg.scan.eta_grid);
    if (s.contains("recipe")) {
      const json& r = s.at("recipe");
      check_keys(r, {"coarse_step_factor", "cap_factor", "bisections", "ladder_points",
                     "ladder_depth", "ladder_dmin_rel"},
                 "scan.recipe");
      get_if(r, "coarse_step_factor", cfg.scan.recipe.coarse_step_factor);
      get_if(r, "cap_factor", cfg.scan.recipe.cap_factor);
      get_if(r, "bisections", cfg.scan.recipe.bisections);
      get_if(r, "ladder_points", cfg.scan.recipe.ladder_points);
      get_if(r, "ladder_depth", cfg.scan.recipe.ladder_depth);
      get_if(r, "ladder_dmin_rel", cfg.scan.recipe.ladder_dmin_rel);
    }
    get_if(s, "window_chi_ratio", cfg.scan.window_chi_ratio);
    get_if(s, "window_chi_ratio_hi", cfg.scan.window_chi_ratio_hi);
    get_if(s, "lambdas", cfg.scan.lambdas);
  }
  get_if(j, "fit_window", cfg.fit_window);
  get_if(j, "jobs", cfg.jobs);
  get_if(j, "out_dir", cfg.out_dir);
  get_if(j, "format", cfg.format);
  get_if(j, "fit_input", cfg.fit_input);
  cfg.validate();
  return cfg;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canon = config_to_json(cfg).dump();
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : canon) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

json result_document(const std::string& command, const RunConfig& cfg, json result) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc["command"] = command;
  doc["config"] = config_to_json(cfg);
  doc["config_hash"] = config_hash(cfg);
  doc["result"] = std::move(result);
  return doc;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_flow_potential(const PotentialGrid& bare, const PotentialGrid& effective) {
  if (bare.n != effective.n) throw std::invalid_argument("potential grids differ in size");
  std::string out = "qbar,V0bar,Veffbar\n";
  for (int i = 0; i < bare.n; ++i) {
    out += format_double(bare.q(i));
    out += ',';
    out += format_double(bare.values[i]);
    out += ',';
    out += format_double(effective.values[i]);
    out += '\n';
  }
  return out;
}

std::string csv_flow_trace(const std::vector<TracePoint>& trace) {
  std::string out = "lambda_bar,vpp0\n";
  for (const TracePoint& p : trace) {
    out += format_double(p.lambda);
    out += ',';
    out += format_double(p.vpp0);
    out += '\n';
  }
  return out;
}

std::string csv_scan(const ScanTable& table) {
  std::string out = "eta_bar,omega_eff,chi_bar,status\n";
  for (const ScanRecord& r : table.records) {
    out += format_double(r.etabar);
    out += ',';
    out += r.converged() && r.omega_eff_sq > 0.0 ? format_double(std::sqrt(r.omega_eff_sq)) : "";
    out += ',';
    out += format_double(r.chi);  // empty when censored
    out += ',';
    out += to_string(r.stop_reason);
    out += '\n';
  }
  return out;
}

std::string csv_surface(const std::vector<SurfaceRow>& rows) {
  std::string out = "lambda_bar,eta_c,gamma,residual,baseline\n";
  for (const SurfaceRow& r : rows) {
    out += format_double(r.lam);
    out += ',';
    out += format_double(r.eta_c);
    out += ',';
    out += format_double(r.gamma);
    out += ',';
    out += format_double(r.residual);
    out += ',';
    out += format_double(r.baseline);
    out += '\n';
  }
  return out;
}

ScanTable read_scan_csv(const std::filesystem::path& path, double lam) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan table: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty scan table: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "eta_bar,omega_eff,chi_bar,status")
    throw std::runtime_error("unexpected scan table header: " + line);

  ScanTable table;
  table.lam = lam;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 4) cells.emplace_back();
    auto parse = [&](const std::string& s) {
      return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
    };
    try {
      ScanRecord rec;
      rec.etabar = std::stod(cells[0]);
      const double omega = parse(cells[1]);
      rec.omega_eff_sq = std::isfinite(omega) ? omega * omega
                                              : std::numeric_limits<double>::quiet_NaN();
      rec.chi = parse(cells[2]);
      rec.stop_reason = stop_reason_from_string(cells[3]);
      table.records.push_back(rec);
    } catch (const std::exception& e) {
      throw std::runtime_error("parse error at " + path.string() + ":" +
                               std::to_string(lineno) + ": " + e.what());
    }
  }
  return table;
}

json scan_table_to_json(const ScanTable& table) {
  json records = json::array();
  for (const ScanRecord& r : table.records) {
    records.push_back({{"eta_bar", r.etabar},
                       {"omega_eff_sq", nan_to_null(r.omega_eff_sq)},
                       {"chi_bar", nan_to_null(r.chi)},
                       {"status", to_string(r.stop_reason)}});
  }
  return {{"lambda_bar", table.lam}, {"records", std::move(records)}};
}

json fit_result_to_json(const FitResult& fit) {
  return {{"eta_c", fit.eta_c},
          {"gamma", fit.gamma},
          {"amplitude", fit.amplitude},
          {"residual", fit.residual},
          {"window", {{"eta_lo", fit.window_lo}, {"eta_hi", fit.window_hi},
                      {"points", fit.points_used}}},
          {"stable", fit.stable},
          {"stability_delta", fit.stability_delta}};
}

json surface_to_json(const std::vector<SurfaceRow>& rows) {
  json arr = json::array();
  for (const SurfaceRow& r : rows) {
    arr.push_back({{"lambda_bar", r.lam},
                   {"fit_ok", r.fit_ok},
                   {"eta_c", nan_to_null(r.eta_c)},
                   {"gamma", nan_to_null(r.gamma)},
                   {"residual", nan_to_null(r.residual)},
                   {"baseline", r.baseline},
                   {"low_confidence", r.low_confidence},
                   {"fit_stable", r.fit_stable},
                   {"points_used", r.points_used}});
  }
  return arr;
}

json spectral_to_json(const SpectralResult& res) {
  return {{"eigenvalues", res.eigenvalues},
          {"gap", res.gap},
          {"chi_exact", nan_to_null(res.chi)},
          {"wall_density", res.wall_density}};
}

json flow_outcome_to_json(const FlowOutcome& outcome) {
  json j{{"stop_reason", to_string(outcome.stop_reason)},
         {"lambda_final", outcome.lambda_final},
         {"t_final", outcome.t_final},
         {"min_log_argument", outcome.min_log_argument},
         {"steps", outcome.steps},
         {"substeps", outcome.substeps},
         {"trace_points", outcome.curvature_trace.size()}};
  if (outcome.stop_reason == StopReason::spinodal) {
    j["spinodal"] = {{"qbar", outcome.spinodal_q}, {"lambda_bar", outcome.spinodal_lambda}};
  }
  return j;
}

}  // namespace nprg
