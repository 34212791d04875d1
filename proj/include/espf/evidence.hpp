#pragma once

#include <cstdint>
#include <functional>

#include "espf/geometry.hpp"
#include "espf/possibility.hpp"

namespace espf {

/// Whitening geometry of the innovation y - h(chi).
struct InnovationContext {
  Points predicted;  // M x m, row i = h(chi_i)
  Matrix shape;      // Pi_e
  Matrix lower;      // L_e, Pi_e = L_e L_e^T
  bool fallback = false;  // predicted measurements were degenerate; Pi_e = Pi_y
};

/// Pi_e = Pi_h + Pi_y, Pi_h the MVEE shape of the predicted measurements.
/// Falls back to Pi_e = Pi_y when the predicted cloud is degenerate.
InnovationContext innovation_shape(const Points& predicted, const Matrix& sensor_imprecision,
                                   double mvee_tolerance = kDefaultMveeTolerance);

/// Same, with a precomputed Pi_e (used when the shape has been inflated).
InnovationContext innovation_context(const Points& predicted, const Matrix& shape);

struct WhitenedInnovations {
  Vector q;     // ||L_e^{-1}(y - h_i)||^2
  Vector comp;  // exp(-q/2)
};

WhitenedInnovations whitened_q(const InnovationContext& ctx, const Vector& y);

/// sup_i min(q_i / 2, prior_i)
double choquet_surprisal(const Vector& q, const Vector& prior);

/// 1 - exp(-surprisal)
double info_content(double surprisal);

/// h_pre + (n/2) log(1 - info); -infinity when info >= 1.
double pcrb_floor(double h_pre, double info, int n);

struct EvidenceScores {
  Vector q;
  Vector comp;
  double surprisal = 0.0;
  double info = 0.0;
};

EvidenceScores score_evidence(const InnovationContext& ctx, const Vector& y, const Vector& prior);

using MeasurementFn = std::function<Vector(const Vector&)>;

struct IsotropyResult {
  double ratio = 0.0;  // Var of innovation norm / Var of state norm
  bool holds = false;  // ratio <= 1
};

/// Monte Carlo comparison of Var ||L_e^{-1}(y - h(x))||^2 against
/// Var ||L_core^{-1}(x - center)||^2 for x uniform in the cloud's MVEE, with
/// y = h(core center). Sampling is by rejection from the bounding cube.
IsotropyResult isotropy_check(const SupportCloud& cloud, const InnovationContext& ctx, const MeasurementFn& h,
                              const Ellipsoid& core, int samples, std::uint64_t seed);

}  // namespace espf
