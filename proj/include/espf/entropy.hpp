#pragma once

#include <numbers>
#include <vector>

#include "espf/geometry.hpp"
#include "espf/possibility.hpp"

namespace espf {

/// Log-volume assigned to a degenerate alpha-cut (fewer than 2n+1 members or
/// affinely flat) in place of log 0.
inline constexpr double kDegenerateLogVolume = -30.0;

/// How the alpha axis is discretized.
///
/// `breakpoints` places one level at every distinct possibility value. The
/// cut-volume integrand is piecewise constant between those values, so the
/// step rule over breakpoints is exact. `uniform` uses n_levels equally spaced
/// levels on (0, 1] with the trapezoidal rule; it is kept for coarse profiles
/// such as the Holder-exponent fit.
enum class ProfileRule { breakpoints, uniform };

struct ProfileOptions {
  ProfileRule rule = ProfileRule::breakpoints;
  int n_levels = 64;
  double mvee_tolerance = kDefaultMveeTolerance;
  double degenerate_floor = kDegenerateLogVolume;
  // Added to every measured log volume: log |det S| when the cloud lives in
  // coordinates x / S but volumes should be read in the units of x. The floor
  // is not shifted, so it keeps its meaning in those units.
  double log_volume_offset = 0.0;
};

struct CutVolumeProfile {
  ProfileRule rule = ProfileRule::breakpoints;
  int dim = 0;
  double degenerate_floor = kDegenerateLogVolume;
  std::vector<double> levels;       // ascending, in (0, 1]
  std::vector<double> log_volumes;  // log V_alpha in nats; degenerate_floor where degenerate
  std::vector<bool> degenerate;
  std::vector<double> weights;      // quadrature weights over (0, 1]; they sum to one

  bool all_degenerate() const;
  bool is_constant(double tol = 0.0) const;
};

CutVolumeProfile cut_volume_profile(const SupportCloud& c, const ProfileOptions& options = {});

/// Uniform grid of n_levels (>= 8) levels with the trapezoidal rule.
CutVolumeProfile cut_volume_profile(const SupportCloud& c, int n_levels);

/// Integral of log V_alpha over (0, 1]. Throws AllDegenerate.
double h_pi(const CutVolumeProfile& profile);
double h_pi(const SupportCloud& c, const ProfileOptions& options = {});

/// log M_p of the cut-volume family. p may be +/-infinity; p = 0 is h_pi.
/// Degenerate levels take part with their floor value so that the family is a
/// single power mean and the ordering M_{-inf} <= M_0 <= M_{+inf} is exact.
double holder_mean(const CutVolumeProfile& profile, double p);

struct EntropyDecomposition {
  double support_entropy = 0.0;   // log V of the outermost cut
  double gradient_entropy = 0.0;  // integral of log(V_alpha / V), <= 0
  double total = 0.0;
};

/// Throws AllDegenerate when the outermost cut is degenerate.
EntropyDecomposition decompose(const CutVolumeProfile& profile);

/// Integral over (0, 1] of log(-2 log alpha): log 2 - gamma.
inline constexpr double kGaussianLevelConstant = std::numbers::ln2 - std::numbers::egamma;

/// Closed-form H_pi of Gaussian-geometry cuts:
/// 0.5 log det cov + (n/2)(log 2 - gamma) + log c_n.
double gaussian_h_pi(const Matrix& cov);

}  // namespace espf
