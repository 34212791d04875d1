#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "espf/config.hpp"
#include "espf/errors.hpp"
#include "espf/output.hpp"
#include "espf/scenario.hpp"
#include "espf/validation.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, filter_failure = 2, acceptance_violation = 3 };

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  bool debug_asserts = false;
};

espf::ScenarioConfig resolve(const Common& c, espf::ScenarioConfig fallback) {
  espf::ScenarioConfig cfg = c.config.empty() ? std::move(fallback) : espf::load_config(c.config);
  if (c.seed_given) cfg.seeds.override_all(c.seed);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.debug_asserts) cfg.filter.debug_asserts = true;
  espf::validate_config(cfg);
  return cfg;
}

int report_checks(const std::vector<espf::CheckResult>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? ok : acceptance_violation;
}

int run_scenario_verb(const Common& common, espf::RunMode mode) {
  const espf::ScenarioConfig cfg = resolve(common, espf::nominal_config());
  const espf::RunOutput run = espf::run_scenario(cfg, mode);
  espf::write_run(run, cfg.output_dir, cfg.plots);
  std::cout << run.name << ": " << run.records.size() << " steps, M = " << run.m << ", output in "
            << cfg.output_dir.string() << '\n';
  if (run.failure) {
    std::cerr << "filter failure: " << *run.failure << '\n';
    return filter_failure;
  }
  return ok;
}

// Rebuilds plots from an existing ewm.csv without re-running the filter.
int plot_verb(const Common& common) {
  namespace fs = std::filesystem;
  const fs::path dir = common.out.empty() ? fs::path("out") : fs::path(common.out);
  std::ifstream in(dir / "ewm.csv");
  if (!in) {
    std::cerr << "cannot read " << (dir / "ewm.csv").string() << '\n';
    return config_error;
  }
  std::string line;
  std::getline(in, line);
  std::vector<espf::EwmRecord> records;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() < 23) continue;
    espf::EwmRecord r;
    r.step = std::stoul(f[0]);
    r.log_det_mvee = std::stod(f[4]);
    r.h_pre = std::stod(f[6]);
    r.h_pi = std::stod(f[7]);
    r.w_ep = std::stod(f[10]);
    r.prune_count = std::stoul(f[13]);
    r.sigma = std::stod(f[14]);
    r.necessity = std::stod(f[15]);
    r.surprisal = std::stod(f[16]);
    r.anchor_error = std::stod(f[22]);
    records.push_back(r);
  }
  fs::create_directories(dir / "plots");
  for (const char* c : {"log_det_mvee", "h_pi", "sigma", "necessity", "surprisal", "prune_count"}) {
    std::ofstream f(dir / "plots" / (std::string(c) + ".svg"));
    f << espf::svg_series(records, c);
  }
  std::cout << "wrote plots for " << records.size() << " steps to " << (dir / "plots").string() << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epistemic support-point filter"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Key-value scenario file");
    sub->add_option("--seed", common.seed, "Override every seed with N, N+1, ...")
        ->each([&](const std::string&) { common.seed_given = true; });
    sub->add_option("--out", common.out, "Output directory");
    sub->add_flag("--debug-asserts", common.debug_asserts, "Audit admissibility on every step");
  };
  auto* run = app.add_subcommand("run", "Run a scenario and write its outputs");
  auto* claims = app.add_subcommand("claims", "Comparator diagnostic on every measured step");
  auto* validate = app.add_subcommand("validate", "Property and oracle suites on synthetic instances");
  auto* glimit = app.add_subcommand("gaussian-limit", "Gaussian-limit checks");
  auto* plot = app.add_subcommand("plot", "SVG plots from an existing ewm.csv");
  for (auto* s : {run, claims, validate, glimit, plot}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (run->parsed()) return run_scenario_verb(common, espf::RunMode::run);
    if (claims->parsed()) return run_scenario_verb(common, espf::RunMode::claims);
    if (validate->parsed()) return report_checks(espf::run_validation_suite(common.seed_given ? common.seed : 2024));
    if (glimit->parsed()) return report_checks(espf::run_gaussian_limit_suite(common.seed_given ? common.seed : 2024));
    if (plot->parsed()) return plot_verb(common);
  } catch (const espf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const espf::FilterFailure& e) {
    std::cerr << "filter failure: " << e.what() << '\n';
    return filter_failure;
  } catch (const espf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return filter_failure;
  }
  return ok;
}
