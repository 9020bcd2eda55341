// Command-line front end: loads a run configuration, computes honest
// expectations, acceptance windows, attack feasibility, intercept-distance
// sweeps and Monte Carlo cross-checks, and emits text / CSV / JSON reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qkdfs/config.hpp"
#include "qkdfs/report.hpp"
#include "qkdfs/reproduce.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRegression = 2;
constexpr int kExitRealizability = 3;

struct CliOptions {
  std::string config_path;
  std::string strategy;
  std::optional<double> intercept_km;
  std::string grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> pulses;
  std::optional<int> workers;
  std::string format;
  std::string out_path;
};

void add_common_options(CLI::App* cmd, CliOptions& opt, bool needs_config) {
  auto* config =
      cmd->add_option("--config", opt.config_path, "run configuration file");
  if (needs_config) config->required();
  cmd->add_option("--strategy", opt.strategy,
                  "honest, naive_global, pnr, vacuum_split or intercept");
  cmd->add_option("--l", opt.intercept_km, "intercept distance in km");
  cmd->add_option("--grid", opt.grid, "sweep grid start:stop:step (km)");
  cmd->add_option("--seed", opt.seed, "Monte Carlo seed");
  cmd->add_option("--pulses", opt.pulses, "Monte Carlo pulse count");
  cmd->add_option("--workers", opt.workers, "worker thread count");
  cmd->add_option("--format", opt.format, "text, csv or json");
  cmd->add_option("--out", opt.out_path, "output path ('-' for stdout)");
}

qkdfs::RunConfig assemble(const CliOptions& opt) {
  using namespace qkdfs;
  RunConfig cfg = opt.config_path.empty()
                      ? RunConfig{}
                      : load_config(opt.config_path);

  if (!opt.strategy.empty()) {
    if (opt.strategy == "honest") {
      cfg.mc_honest = true;
      cfg.strategy_set = false;
    } else {
      cfg.strategy_set = true;
      cfg.mc_honest = false;
      if (opt.strategy == "naive_global" || opt.strategy == "naive") {
        cfg.strategy.variant = AttackVariant::NaiveGlobal;
      } else if (opt.strategy == "pnr") {
        cfg.strategy.variant = AttackVariant::PhotonNumberResolving;
      } else if (opt.strategy == "vacuum_split") {
        cfg.strategy.variant = AttackVariant::VacuumSplit;
      } else if (opt.strategy == "intercept") {
        cfg.strategy.variant = AttackVariant::InterceptAtDistance;
      } else {
        throw std::invalid_argument("unknown strategy '" + opt.strategy + "'");
      }
    }
  }
  if (opt.intercept_km) cfg.strategy.intercept_km = *opt.intercept_km;
  if (!opt.grid.empty()) {
    cfg.sweep = parse_grid_spec(opt.grid);
    cfg.sweep_set = true;
  }
  if (opt.seed) cfg.trial.seed = *opt.seed;
  if (opt.pulses) cfg.trial.pulses = *opt.pulses;
  if (opt.workers) cfg.trial.workers = *opt.workers;
  if (!opt.format.empty()) {
    if (opt.format == "text") {
      cfg.format = OutputFormat::Text;
    } else if (opt.format == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (opt.format == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      throw std::invalid_argument("unknown format '" + opt.format + "'");
    }
  }
  if (!opt.out_path.empty()) cfg.out_path = opt.out_path == "-" ? "" : opt.out_path;
  return cfg;
}

void emit(const qkdfs::RunConfig& cfg, const std::string& body) {
  if (cfg.out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output path '" + cfg.out_path + "'");
  }
  out << body;
}

int run_expect(const qkdfs::RunConfig& cfg, bool windows_view) {
  using namespace qkdfs;
  ExpectReport report = make_expect_report(cfg.system, cfg.session);
  std::string body;
  switch (cfg.format) {
    case OutputFormat::Text:
      body = windows_view ? render_windows_text(report)
                          : render_expect_text(report);
      break;
    case OutputFormat::Csv:
      body = windows_view ? render_windows_csv(report)
                          : render_expect_csv(report);
      break;
    case OutputFormat::Json:
      body = windows_view ? render_windows_json(report)
                          : render_expect_json(report);
      break;
  }
  emit(cfg, body);
  return kExitOk;
}

int run_feasibility(const qkdfs::RunConfig& cfg) {
  using namespace qkdfs;
  if (!cfg.strategy_set) {
    throw std::invalid_argument(
        "feasibility needs an attack strategy (attack.strategy or --strategy)");
  }
  FeasibilityReport report = analyze(cfg.strategy, cfg.system, cfg.session);
  std::string body;
  switch (cfg.format) {
    case OutputFormat::Text: body = render_feasibility_text(report); break;
    case OutputFormat::Csv: body = render_feasibility_csv(report); break;
    case OutputFormat::Json: body = render_feasibility_json(report); break;
  }
  emit(cfg, body);
  return kExitOk;  // the verdict is data, not an exit status
}

int run_sweep(const qkdfs::RunConfig& cfg) {
  using namespace qkdfs;
  SweepGrid grid = cfg.sweep;
  if (!cfg.sweep_set) {
    grid = SweepGrid{0.0, cfg.system.channel.length_km, 1.0};
  }
  std::vector<double> points = grid.points();
  std::vector<SweepRow> rows = sweep_intercept(cfg.system, cfg.session, points,
                                               cfg.trial.workers);
  std::string body;
  switch (cfg.format) {
    case OutputFormat::Text: body = render_sweep_text(rows); break;
    case OutputFormat::Csv: body = render_sweep_csv(rows); break;
    case OutputFormat::Json: body = render_sweep_json(rows); break;
  }
  emit(cfg, body);
  return kExitOk;
}

int run_mc(const qkdfs::RunConfig& cfg) {
  using namespace qkdfs;
  McReport report =
      make_mc_report(cfg.mc_honest, cfg.strategy, cfg.system, cfg.trial);
  std::string body;
  switch (cfg.format) {
    case OutputFormat::Text: body = render_mc_text(report); break;
    case OutputFormat::Csv: body = render_mc_csv(report); break;
    case OutputFormat::Json: body = render_mc_json(report); break;
  }
  if (cfg.fluct_trials > 0 && cfg.format != OutputFormat::Csv) {
    FluctuationReport fluct =
        fluctuation_check(cfg.system, cfg.session, cfg.fluct_trials,
                          cfg.fluct_pulses, cfg.trial.seed);
    body += cfg.format == OutputFormat::Json ? render_fluctuation_json(fluct)
                                             : render_fluctuation_text(fluct);
  }
  emit(cfg, body);
  return kExitOk;
}

int run_reproduce(const qkdfs::RunConfig& cfg) {
  using namespace qkdfs;
  ReproduceReport report = run_reference_checks();
  emit(cfg, render_reproduce_text(report));
  return report.all_pass ? kExitOk : kExitRegression;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decoy-state QKD fake-state attack feasibility workbench"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* expect = app.add_subcommand(
      "expect", "honest per-source detection and error expectations");
  CLI::App* windows = app.add_subcommand(
      "windows", "finite-session acceptance windows per source");
  CLI::App* feasibility = app.add_subcommand(
      "feasibility", "attack-parameter windows and the cross-source verdict");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "feasibility windows across intercept distances");
  CLI::App* mc = app.add_subcommand(
      "mc", "Monte Carlo cross-check of the analytic rates");
  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "re-derive the built-in reference results");
  for (CLI::App* cmd : {expect, windows, feasibility, sweep, mc}) {
    add_common_options(cmd, opt, true);
  }
  add_common_options(reproduce, opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    qkdfs::RunConfig cfg = assemble(opt);
    if (expect->parsed()) return run_expect(cfg, false);
    if (windows->parsed()) return run_expect(cfg, true);
    if (feasibility->parsed()) return run_feasibility(cfg);
    if (sweep->parsed()) return run_sweep(cfg);
    if (mc->parsed()) return run_mc(cfg);
    if (reproduce->parsed()) return run_reproduce(cfg);
  } catch (const qkdfs::RealizabilityError& err) {
    std::cerr << "realizability violation: " << err.what() << "\n";
    return kExitRealizability;
  } catch (const qkdfs::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
