#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "espf/entropy.hpp"
#include "espf/evidence.hpp"
#include "espf/monitor.hpp"
#include "espf/possibility.hpp"
#include "espf/selection.hpp"
#include "espf/sparsegrid.hpp"

namespace espf {

/// sigma_{k+1} = clamp(sigma_k (rho_c + rho_d min(S, s_cap)), sigma_min, sigma_max)
struct SigmaLaw {
  double rho_c = 0.9703;
  double rho_d = 0.05;
  double s_cap = 10.0;
  double sigma_min = 0.05;
  double sigma_max = 1.3;  // sigma > 1 inflates the unobserved directions at every update

  double next(double sigma, double surprisal) const;
};

struct FilterOptions {
  GridSpec grid;
  SigmaLaw sigma_law;
  double sigma0 = 1.0;
  VfiBounds vfi;
  double kernel_scale = 1.0;
  bool rotate_grid = true;
  std::uint64_t rotation_seed = 5;  // scenarios copy Seeds::rotation here
  ProfileOptions profile;
  double pcrb_slack = 0.05;
  int comparator_draws = kDefaultComparatorDraws;
  bool debug_asserts = false;
  // Largest whitened innovation left after the conflict-recovery inflation.
  double recovery_q = 2.0;
};

struct FilterState {
  SupportCloud cloud;
  double sigma = 1.0;
  double t = 0.0;
  std::size_t step = 0;
};

/// Maps every row (a state in filter coordinates) from time t0 to t1.
using Propagator = std::function<Points(const Points&, double t0, double t1)>;
/// Maps every row to its predicted measurement.
using BatchMeasurement = std::function<Points(const Points&)>;

struct Observation {
  Vector y;
  Matrix sensor_shape;  // Pi_y
  BatchMeasurement predict;
  std::size_t station = 0;
};

struct StepOutput {
  FilterState state;
  EwmRecord record;
  std::optional<ComparatorReport> claims;
  SupportCloud prior;
  SupportCloud posterior;
  std::vector<std::size_t> survivors;  // indices into prior
};

class Filter {
public:
  explicit Filter(FilterOptions options);

  const FilterOptions& options() const noexcept { return options_; }
  const Points& nodes() const noexcept { return nodes_; }

  /// Cloud center + sigma0 * lower * u over the grid nodes, uniform possibility.
  FilterState initial_state(const Vector& center, const Matrix& lower, double t0 = 0.0) const;

  /// One predict / evidence / select / assign / regenerate / monitor cycle.
  /// Without an observation the cloud is only propagated. `reference_h` is the
  /// entropy the width monitor is measured against.
  StepOutput step(const FilterState& state, double t_next, const Propagator& propagate, const Observation* obs,
                  double reference_h, bool with_claims, std::uint64_t claims_seed) const;

private:
  void audit(const SupportCloud& prior, const Vector& q, const SelectionResult& sel, const SupportCloud& posterior,
             const Regeneration& regen) const;

  FilterOptions options_;
  Points nodes_;
};

}  // namespace espf
