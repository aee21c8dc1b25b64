// Command-line driver: flow / oracle / compare / scan / fit / surface.
//
// Every command writes <out>/<command>.json (deterministic for a fixed
// config) plus a <command>.meta.json sidecar with wall-clock data; with
// --format csv the plot tables are written alongside.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nprg/flow.hpp"
#include "nprg/io.hpp"
#include "nprg/model.hpp"
#include "nprg/observables.hpp"
#include "nprg/scan.hpp"
#include "nprg/spectral.hpp"
#include "nprg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nprg;

namespace {

json observables_to_json(const Observables& obs) {
  json j{{"omega_eff_sq", obs.omega_eff_sq},
         {"lambda_eff", obs.lambda_eff},
         {"valid", obs.valid},
         {"near_critical", obs.near_critical},
         {"stencil_curvature", obs.stencil_curvature},
         {"fit_stencil_rel_dev", obs.fit_stencil_rel_dev}};
  j["chi_bar"] = obs.valid ? json(obs.chi) : json(nullptr);
  j["omega_eff"] = obs.valid ? json(std::sqrt(obs.omega_eff_sq)) : json(nullptr);
  return j;
}

void add_physical_units(json& result, const Observables& obs, const RunConfig& cfg) {
  if (!cfg.units_explicit || !obs.valid) return;
  result["physical"] = {
      {"omega_eff", std::sqrt(obs.omega_eff_sq) * cfg.model.omega0},
      {"chi", susceptibility(obs, cfg.model)},
  };
}

struct Emitter {
  const RunConfig& cfg;
  std::string command;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  fs::path path(const std::string& name) const { return fs::path(cfg.out_dir) / name; }

  void result(json res) const {
    const json doc = result_document(command, cfg, std::move(res));
    write_text_atomic(path(command + ".json"), doc.dump(2) + "\n");

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    const json meta{{"written_at", stamp}, {"elapsed_seconds", elapsed}};
    write_text_atomic(path(command + ".meta.json"), meta.dump(2) + "\n");
  }

  void csv(const std::string& name, const std::string& content) const {
    if (cfg.format == "csv") write_text_atomic(path(name), content);
  }
};

int cmd_flow(const RunConfig& cfg) {
  Emitter out{cfg, "flow"};
  const DimensionlessParams dp = reduce(cfg.model);
  const PotentialGrid bare = bare_potential(dp.lam, cfg.qmax, cfg.grid_n);
  const FlowOutcome outcome = run_flow(dp, cfg.flow, bare);
  const Observables obs = effective_couplings(outcome, cfg.fit_window);

  json res{{"params", {{"lambda_bar", dp.lam}, {"eta_bar", dp.etabar}, {"cutoff_bar", dp.cutbar}}},
           {"flow", flow_outcome_to_json(outcome)},
           {"observables", observables_to_json(obs)}};
  if (!cfg.model.cutoff_is_physical())
    res["warnings"] = json::array({"cutoff/omega0 below 100; run is outside the physical regime"});
  add_physical_units(res, obs, cfg);
  out.result(res);
  out.csv("flow_potential.csv", csv_flow_potential(bare, outcome.potential));
  out.csv("flow_trace.csv", csv_flow_trace(outcome.curvature_trace));
  std::printf("flow: %s omega_eff_sq=%.10g%s\n", to_string(outcome.stop_reason),
              obs.omega_eff_sq, obs.valid ? "" : " (observables invalid)");
  return 0;
}

int cmd_oracle(const RunConfig& cfg) {
  Emitter out{cfg, "oracle"};
  const DimensionlessParams dp = reduce(cfg.model);
  const SpectralResult res = oracle_summary(dp.lam, cfg.spectral);
  json j = spectral_to_json(res);
  j["lambda_bar"] = dp.lam;
  out.result(j);
  std::printf("oracle: gap=%.10g chi_exact=%.10g\n", res.gap, res.chi);
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  Emitter out{cfg, "compare"};
  const DimensionlessParams dp0 = reduce(cfg.model);
  const DimensionlessParams dp{.lam = dp0.lam, .etabar = 0.0, .cutbar = dp0.cutbar};

  const FlowOutcome outcome = run_flow(dp, cfg.flow, bare_potential(dp.lam, cfg.qmax, cfg.grid_n));
  const Observables obs = effective_couplings(outcome, cfg.fit_window);
  const SpectralResult oracle = oracle_summary(dp.lam, cfg.spectral);

  const double nprg_omega = obs.valid ? std::sqrt(obs.omega_eff_sq) : 0.0;
  const double dev = std::abs(nprg_omega - oracle.gap) / oracle.gap;
  json res{{"lambda_bar", dp.lam},
           {"nprg_omega_eff", nprg_omega},
           {"oracle_gap", oracle.gap},
           {"relative_deviation", dev},
           {"nprg_chi", obs.valid ? json(obs.chi) : json(nullptr)},
           {"oracle_chi", oracle.chi},
           {"chi_relative_deviation",
            obs.valid ? json(std::abs(obs.chi - oracle.chi) / oracle.chi) : json(nullptr)},
           {"flow", flow_outcome_to_json(outcome)}};
  out.result(res);
  std::printf("compare: lam=%g nprg=%.6g oracle=%.6g deviation=%.3f%%\n", dp.lam, nprg_omega,
              oracle.gap, 100.0 * dev);
  return 0;
}

ScanTable run_scan(const RunConfig& cfg, double lam) {
  const DimensionlessParams dp = reduce(cfg.model);
  if (!cfg.scan.eta_grid.empty())
    return eta_sweep(lam, cfg.scan.eta_grid, cfg.flow, cfg.qmax, cfg.grid_n, cfg.jobs, dp.cutbar);
  return refined_scan(lam, cfg.scan.recipe, cfg.flow, cfg.qmax, cfg.grid_n, cfg.jobs, dp.cutbar);
}

int cmd_scan(const RunConfig& cfg) {
  Emitter out{cfg, "scan"};
  const DimensionlessParams dp = reduce(cfg.model);
  const ScanTable table = run_scan(cfg, dp.lam);
  json res = scan_table_to_json(table);
  res["grid"] = {{"qmax", table.qmax}, {"n", table.n}, {"cutoff_bar", table.cutbar}};
  out.result(res);
  out.csv("scan.csv", csv_scan(table));
  long converged = 0;
  for (const auto& r : table.records) converged += r.converged();
  std::printf("scan: lam=%g %zu records (%ld converged)\n", dp.lam, table.records.size(),
              converged);
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  Emitter out{cfg, "fit"};
  if (cfg.fit_input.empty())
    throw std::invalid_argument("fit requires --input pointing to a scan CSV");
  const DimensionlessParams dp = reduce(cfg.model);
  const ScanTable table = read_scan_csv(cfg.fit_input, dp.lam);
  const WindowPolicy policy{.chi_ratio = cfg.scan.window_chi_ratio,
                            .chi_ratio_hi = cfg.scan.window_chi_ratio_hi};
  const FitResult fit = power_law_fit(table, policy);
  json res = fit_result_to_json(fit);
  res["lambda_bar"] = dp.lam;
  res["baseline"] = instanton_baseline(dp.lam);
  out.result(res);
  std::printf("fit: eta_c=%.8g gamma=%.6g C=%.6g rms=%.4g\n", fit.eta_c, fit.gamma,
              fit.amplitude, fit.residual);
  return 0;
}

int cmd_surface(const RunConfig& cfg) {
  Emitter out{cfg, "surface"};
  const WindowPolicy policy{.chi_ratio = cfg.scan.window_chi_ratio,
                            .chi_ratio_hi = cfg.scan.window_chi_ratio_hi};
  const DimensionlessParams dp = reduce(cfg.model);
  const std::vector<SurfaceRow> rows =
      critical_surface(cfg.scan.lambdas, cfg.scan.recipe, cfg.flow, policy, cfg.qmax, cfg.grid_n,
                       cfg.jobs, dp.cutbar);
  out.result(surface_to_json(rows));
  out.csv("surface.csv", csv_surface(rows));
  for (const SurfaceRow& r : rows)
    std::printf("surface: lam=%g eta_c=%.6g gamma=%.5g baseline=%.5g%s%s\n", r.lam, r.eta_c,
                r.gamma, r.baseline, r.low_confidence ? " [low-confidence]" : "",
                r.fit_ok ? "" : " [fit failed]");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wegner-Houghton flow solver for a dissipative double well"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI config file; flags override file values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string backend = "openmp";
  std::vector<double> eta_grid;
  std::vector<double> lambdas = cfg.scan.lambdas;

  auto* mass = app.add_option("--mass", cfg.model.mass, "particle mass M");
  auto* hbar = app.add_option("--hbar", cfg.model.hbar, "action scale");
  auto* omega0 = app.add_option("--omega0", cfg.model.omega0, "bare well frequency");
  app.add_option("--lambda0", cfg.model.lambda0, "quartic coupling [M^2 w0^3 / hbar]");
  app.add_option("--eta", cfg.model.eta, "Ohmic friction [M w0]")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--cutoff", cfg.model.cutoff, "initial cutoff [w0]");
  app.add_option("--qmax", cfg.qmax, "half-grid extent");
  app.add_option("--grid-n", cfg.grid_n, "half-grid points");
  app.add_option("--dt", cfg.flow.dt, "flow-time step");
  app.add_option("--tmax", cfg.flow.t_max, "flow horizon ln(L0/L)");
  app.add_option("--spinodal-eps", cfg.flow.spinodal_eps, "log-argument stop threshold");
  app.add_option("--convergence-tol", cfg.flow.convergence_tol, "curvature rate threshold");
  app.add_option("--cfl-safety", cfg.flow.cfl_safety, "explicit stability safety factor");
  app.add_option("--trace-stride", cfg.flow.trace_stride, "trace sampling stride");
  app.add_option("--max-steps", cfg.flow.max_steps, "RK4 stage budget per flow");
  app.add_option("--backend", backend, "kernel backend")
      ->check(CLI::IsMember({"serial", "openmp"}));
  app.add_option("--box", cfg.spectral.box_halfwidth, "oracle hard-wall half width");
  app.add_option("--basis", cfg.spectral.basis_size, "oracle grid points");
  app.add_option("--tilt", cfg.spectral.tilt, "oracle source step dJ");
  app.add_option("--eigencount", cfg.spectral.eigencount, "oracle eigenvalue count");
  app.add_option("--eta-grid", eta_grid, "explicit dimensionless eta grid for scan")
      ->delimiter(',');
  app.add_option("--lambdas", lambdas, "dimensionless couplings for surface")->delimiter(',');
  app.add_option("--window-ratio", cfg.scan.window_chi_ratio,
                 "fit window: chi >= ratio * chi(eta_min)");
  app.add_option("--window-ratio-hi", cfg.scan.window_chi_ratio_hi,
                 "fit window: chi <= ratio * chi(eta_min)");
  app.add_option("--coarse-step", cfg.scan.recipe.coarse_step_factor, "coarse ladder step factor");
  app.add_option("--bisections", cfg.scan.recipe.bisections, "boundary bisection count");
  app.add_option("--ladder-points", cfg.scan.recipe.ladder_points, "approach ladder size");
  app.add_option("--fit-window", cfg.fit_window, "origin fit window (points)");
  app.add_option("--jobs", cfg.jobs, "concurrent flow solves (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", cfg.out_dir, "output directory")->envname("NPRG_FLOW_OUT");
  app.add_option("--format", cfg.format, "json, or csv to add plot tables")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--input", cfg.fit_input, "scan CSV for the fit command");

  auto* sub_flow = app.add_subcommand("flow", "integrate the flow and extract observables");
  auto* sub_oracle = app.add_subcommand("oracle", "exact diagonalization at eta = 0");
  auto* sub_compare = app.add_subcommand("compare", "flow vs oracle at eta = 0");
  auto* sub_scan = app.add_subcommand("scan", "susceptibility vs eta at fixed coupling");
  auto* sub_fit = app.add_subcommand("fit", "critical power-law fit of a scan table");
  auto* sub_surface = app.add_subcommand("surface", "eta_c and gamma across couplings");

  CLI11_PARSE(app, argc, argv);

  cfg.flow.backend = backend == "serial" ? kernels::Backend::serial : kernels::Backend::openmp;
  cfg.scan.eta_grid = eta_grid;
  cfg.scan.lambdas = lambdas;
  cfg.units_explicit = mass->count() > 0 || hbar->count() > 0 || omega0->count() > 0;

  try {
    cfg.validate();
    if (sub_flow->parsed()) return cmd_flow(cfg);
    if (sub_oracle->parsed()) return cmd_oracle(cfg);
    if (sub_compare->parsed()) return cmd_compare(cfg);
    if (sub_scan->parsed()) return cmd_scan(cfg);
    if (sub_fit->parsed()) return cmd_fit(cfg);
    if (sub_surface->parsed()) return cmd_surface(cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
