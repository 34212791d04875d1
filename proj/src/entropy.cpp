#include "espf/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "espf/errors.hpp"

namespace espf {
namespace {

std::vector<std::size_t> order_by_possibility(const SupportCloud& c) {
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Vector& p = c.poss();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p[static_cast<Eigen::Index>(a)] > p[static_cast<Eigen::Index>(b)];
  });
  return order;
}

// Fills log volumes for `levels` (ascending) by sweeping them in descending
// order and growing one warm-started MVEE.
void fill_volumes(const SupportCloud& c, const ProfileOptions& options, CutVolumeProfile& profile) {
  const int n = c.dim();
  const std::size_t min_members = static_cast<std::size_t>(2 * n + 1);
  const auto order = order_by_possibility(c);
  const Vector& poss = c.poss();
  const std::size_t count = profile.levels.size();
  profile.log_volumes.assign(count, options.degenerate_floor);
  profile.degenerate.assign(count, true);

  if (!spans_affinely(c.points())) return;
  MveeAccumulator acc(n, c.size(), options.mvee_tolerance);
  const auto [frame_center, frame_lower] = scatter_frame(c.points());
  acc.set_frame(frame_center, frame_lower);
  const double log_ball = log_unit_ball_volume(n);
  std::size_t next = 0;
  bool have_value = false;
  double last_value = options.degenerate_floor;
  bool last_degenerate = true;

  for (std::size_t k = count; k-- > 0;) {
    const double level = profile.levels[k];
    bool grew = false;
    while (next < order.size() && poss[static_cast<Eigen::Index>(order[next])] >= level) {
      acc.add(c.points().row(static_cast<Eigen::Index>(order[next])).transpose());
      ++next;
      grew = true;
    }
    if (!grew && have_value) {
      profile.log_volumes[k] = last_value;
      profile.degenerate[k] = last_degenerate;
      continue;
    }
    have_value = true;
    last_value = options.degenerate_floor;
    last_degenerate = true;
    if (acc.size() >= min_members) {
      try {
        last_value = log_ball + 0.5 * acc.solve().log_det + options.log_volume_offset;
        last_degenerate = false;
      } catch (const DegenerateCloud&) {
      }
    }
    profile.log_volumes[k] = last_value;
    profile.degenerate[k] = last_degenerate;
  }
}

}  // namespace

bool CutVolumeProfile::all_degenerate() const {
  return std::all_of(degenerate.begin(), degenerate.end(), [](bool d) { return d; });
}

bool CutVolumeProfile::is_constant(double tol) const {
  if (log_volumes.empty()) return true;
  const auto [lo, hi] = std::minmax_element(log_volumes.begin(), log_volumes.end());
  return *hi - *lo <= tol;
}

CutVolumeProfile cut_volume_profile(const SupportCloud& c, const ProfileOptions& options) {
  if (c.size() == 0) throw Error("cut_volume_profile: empty cloud");
  CutVolumeProfile profile;
  profile.rule = options.rule;
  profile.dim = c.dim();
  profile.degenerate_floor = options.degenerate_floor;

  if (options.rule == ProfileRule::breakpoints) {
    std::vector<double> values(c.poss().data(), c.poss().data() + c.poss().size());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    profile.levels = values;
    profile.weights.resize(values.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      profile.weights[k] = values[k] - prev;
      prev = values[k];
    }
  } else {
    if (options.n_levels < 8) throw Error("cut_volume_profile: n_levels must be at least 8");
    const int count = options.n_levels;
    const double step = 1.0 / static_cast<double>(count);
    profile.levels.resize(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) profile.levels[static_cast<std::size_t>(k)] = static_cast<double>(k + 1) * step;
    profile.levels.back() = 1.0;
    // Trapezoid on [alpha_1, 1]; the outermost level stands for alpha -> 0+.
    profile.weights.assign(profile.levels.size(), 0.0);
    profile.weights.front() = profile.levels.front();
    for (std::size_t k = 0; k + 1 < profile.levels.size(); ++k) {
      const double half = 0.5 * (profile.levels[k + 1] - profile.levels[k]);
      profile.weights[k] += half;
      profile.weights[k + 1] += half;
    }
  }

  fill_volumes(c, options, profile);
  return profile;
}

CutVolumeProfile cut_volume_profile(const SupportCloud& c, int n_levels) {
  ProfileOptions options;
  options.rule = ProfileRule::uniform;
  options.n_levels = n_levels;
  return cut_volume_profile(c, options);
}

double h_pi(const CutVolumeProfile& profile) {
  if (profile.all_degenerate()) throw AllDegenerate("h_pi: every alpha-cut is degenerate");
  double total = 0.0;
  for (std::size_t k = 0; k < profile.levels.size(); ++k) total += profile.weights[k] * profile.log_volumes[k];
  return total;
}

double h_pi(const SupportCloud& c, const ProfileOptions& options) { return h_pi(cut_volume_profile(c, options)); }

double holder_mean(const CutVolumeProfile& profile, double p) {
  if (profile.all_degenerate()) throw AllDegenerate("holder_mean: every alpha-cut is degenerate");
  if (p == 0.0) return h_pi(profile);
  const auto& lv = profile.log_volumes;
  if (std::isinf(p)) {
    double best = p > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lv.size(); ++k) {
      if (profile.weights[k] <= 0.0) continue;
      best = p > 0 ? std::max(best, lv[k]) : std::min(best, lv[k]);
    }
    return best;
  }
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lv.size(); ++k)
    if (profile.weights[k] > 0.0) shift = std::max(shift, p * lv[k]);
  double sum = 0.0;
  for (std::size_t k = 0; k < lv.size(); ++k)
    if (profile.weights[k] > 0.0) sum += profile.weights[k] * std::exp(p * lv[k] - shift);
  return (shift + std::log(sum)) / p;
}

EntropyDecomposition decompose(const CutVolumeProfile& profile) {
  if (profile.levels.empty() || profile.degenerate.front())
    throw AllDegenerate("decompose: outermost alpha-cut is degenerate");
  EntropyDecomposition out;
  out.total = h_pi(profile);
  out.support_entropy = profile.log_volumes.front();
  out.gradient_entropy = out.total - out.support_entropy;
  return out;
}

double gaussian_h_pi(const Matrix& cov) {
  const Matrix lower = whitening_factor(cov);
  const int n = static_cast<int>(cov.rows());
  const double half_log_det = lower.diagonal().array().log().sum();
  return half_log_det + 0.5 * static_cast<double>(n) * kGaussianLevelConstant + log_unit_ball_volume(n);
}

}  // namespace espf
