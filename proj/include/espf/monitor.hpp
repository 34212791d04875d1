#pragma once

#include <cstddef>
#include <string_view>

#include "espf/entropy.hpp"
#include "espf/possibility.hpp"

namespace espf {

enum class Regime { contraction, diffusion };

std::string_view regime_name(Regime r) noexcept;

/// contraction iff log_det < 0; zero counts as diffusion.
Regime regime_flag(double log_det);

/// 1 - (second-largest possibility): necessity of the anchor singleton.
double necessity(const SupportCloud& c);

/// exp((h_pi - reference) / n); 0 when the profile is fully degenerate.
double epistemic_width(const CutVolumeProfile& profile, double reference);

/// Least-squares slope of log V_alpha against log(1/alpha) over the
/// non-degenerate levels. Throws InsufficientLevels with fewer than two.
double holder_exponent(const CutVolumeProfile& profile);

struct EwmRecord {
  std::size_t step = 0;
  double t_days = 0.0;
  bool measured = false;
  std::size_t station = 0;
  double log_det_mvee = 0.0;  // predicted support, solver units
  Regime regime = Regime::diffusion;
  double h_pre = 0.0;
  double h_pi = 0.0;  // posterior
  double holder_min = 0.0;
  double holder_max = 0.0;
  double w_ep = 0.0;
  std::size_t m = 0;
  std::size_t n_target = 0;
  std::size_t prune_count = 0;
  double sigma = 0.0;
  double necessity = 0.0;
  double surprisal = 0.0;
  double info = 0.0;
  double alpha_c = 0.0;
  double pcrb_floor = 0.0;
  bool pcrb_satisfied = true;
  bool recovered = false;
  double anchor_error = 0.0;  // scenario-defined distance of the anchor to truth
};

struct RecordInputs {
  std::size_t step = 0;
  double t_days = 0.0;
  bool measured = false;
  std::size_t station = 0;
  double log_det_mvee = 0.0;
  double h_pre = 0.0;
  const CutVolumeProfile* posterior = nullptr;
  const SupportCloud* posterior_cloud = nullptr;
  double reference_h = 0.0;
  std::size_t m = 0;
  std::size_t n_target = 0;
  std::size_t prune_count = 0;
  double sigma = 0.0;
  double surprisal = 0.0;
  double info = 0.0;
  double pcrb_slack = 0.05;
  bool recovered = false;
};

EwmRecord assemble_record(const RecordInputs& in);

}  // namespace espf
