#pragma once

#include <optional>
#include <string>
#include <vector>

#include "espf/config.hpp"
#include "espf/filter.hpp"

namespace espf {

struct ClaimRow {
  std::size_t step = 0;
  double t_days = 0.0;
  double sigma = 0.0;
  double log_det = 0.0;
  std::size_t n_target = 0;
  Regime regime = Regime::diffusion;
  ComparatorReport report;
};

/// Per-step comparison of the 1D scenario against the Kalman oracle.
struct LinearTrackRow {
  std::size_t step = 0;
  double truth = 0.0;
  double y = 0.0;
  double anchor = 0.0;
  double kf_mean = 0.0;
  double kf_sd = 0.0;
};

enum class RunMode { run, claims };

struct RunOutput {
  std::string name;
  std::size_t m = 0;  // support size
  int n = 0;
  double reference_h = 0.0;
  std::vector<EwmRecord> records;
  std::vector<ClaimRow> claims;
  std::vector<LinearTrackRow> linear;
  std::optional<std::string> failure;  // runtime filter failure, if any
};

/// Runs the configured scenario. A FilterFailure stops the run and is
/// reported in `failure`; the records up to that point are kept.
RunOutput run_scenario(const ScenarioConfig& config, RunMode mode = RunMode::run);

}  // namespace espf
