#include "espf/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "espf/errors.hpp"
#include "espf/geometry.hpp"

namespace espf {

std::size_t coverage_controller(double info, std::size_t m, int n) {
  if (!(info >= 0.0 && info < 1.0)) throw Error("coverage_controller: information content must lie in [0, 1)");
  const auto floor_count = static_cast<std::size_t>(2 * n + 1);
  const auto raw = static_cast<std::size_t>(std::floor((1.0 - info) * static_cast<double>(m)));
  return std::min(m, std::max(raw, floor_count));
}

std::vector<std::size_t> select_min_q(const Vector& q, std::size_t n_target) {
  const auto m = static_cast<std::size_t>(q.size());
  if (n_target > m) throw Error("select_min_q: target exceeds cloud size");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return q[static_cast<Eigen::Index>(a)] < q[static_cast<Eigen::Index>(b)];
  });
  order.resize(n_target);
  std::sort(order.begin(), order.end());
  return order;
}

SelectionResult assign_possibility(const std::vector<std::size_t>& survivors, const Vector& comp,
                                   const Vector& prior) {
  if (comp.size() != prior.size()) throw Error("assign_possibility: length mismatch");
  SelectionResult out;
  out.survivors = survivors;
  out.prune_count = static_cast<std::size_t>(comp.size()) - survivors.size();
  out.unnormalized.resize(static_cast<Eigen::Index>(survivors.size()));
  for (std::size_t k = 0; k < survivors.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(survivors[k]);
    out.unnormalized[static_cast<Eigen::Index>(k)] = std::min(prior[i], comp[i]);
  }
  out.assigned = max_normalize(out.unnormalized).cwiseMax(kPossibilityFloor);
  return out;
}

SupportCloud survivor_cloud(const SupportCloud& prior, const SelectionResult& selection) {
  Points pts(static_cast<Eigen::Index>(selection.survivors.size()), prior.dim());
  for (std::size_t k = 0; k < selection.survivors.size(); ++k)
    pts.row(static_cast<Eigen::Index>(k)) = prior.points().row(static_cast<Eigen::Index>(selection.survivors[k]));
  return SupportCloud(std::move(pts), selection.assigned, prior.epoch());
}

std::vector<std::size_t> weighted_draw(const Vector& comp, std::size_t n_target, std::uint64_t seed,
                                       std::uint64_t index) {
  const auto m = static_cast<std::size_t>(comp.size());
  if (n_target > m) throw Error("weighted_draw: target exceeds cloud size");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Efraimidis-Spirakis: keep the n_target largest log(u)/w.
  std::vector<std::pair<double, std::size_t>> keys(m);
  for (std::size_t i = 0; i < m; ++i) {
    double u = unit(rng);
    if (u <= 0.0) u = std::numeric_limits<double>::min();
    const double w = comp[static_cast<Eigen::Index>(i)];
    keys[i] = {w > 0.0 ? std::log(u) / w : -std::numeric_limits<double>::infinity(), i};
  }
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out(n_target);
  for (std::size_t k = 0; k < n_target; ++k) out[k] = keys[k].second;
  std::sort(out.begin(), out.end());
  return out;
}

SubsetScore score_subset(const SupportCloud& prior, const Vector& comp, const std::vector<std::size_t>& subset,
                         const ProfileOptions& profile) {
  const SelectionResult sel = assign_possibility(subset, comp, prior.poss());
  const SupportCloud cloud = survivor_cloud(prior, sel);
  SubsetScore s;
  try {
    s.log_det = log_det_mvee(cloud.points(), profile.mvee_tolerance);
  } catch (const DegenerateCloud&) {
    s.log_det = -std::numeric_limits<double>::infinity();
  }
  const CutVolumeProfile prof = cut_volume_profile(cloud, profile);
  s.h_pi = prof.all_degenerate() ? profile.degenerate_floor : h_pi(prof);
  return s;
}

RandomComparison comparator_random(const SupportCloud& prior, const Vector& comp, std::size_t n_target, int draws,
                                   std::uint64_t seed, const ProfileOptions& profile) {
  if (draws < 1) throw Error("comparator_random: need at least one draw");
  RandomComparison out;
  out.best_h_pi = std::numeric_limits<double>::infinity();
  out.best_log_det = std::numeric_limits<double>::infinity();
  out.draws = draws;
  for (int d = 0; d < draws; ++d) {
    const auto subset = weighted_draw(comp, n_target, seed, static_cast<std::uint64_t>(d));
    const SubsetScore s = score_subset(prior, comp, subset, profile);
    out.best_h_pi = std::min(out.best_h_pi, s.h_pi);
    out.best_log_det = std::min(out.best_log_det, s.log_det);
  }
  return out;
}

std::vector<std::size_t> comparator_swap(const Vector& q, const std::vector<std::size_t>& survivors) {
  const auto m = static_cast<std::size_t>(q.size());
  if (survivors.size() >= m) throw NoNonSurvivor("comparator_swap: every hypothesis survives");
  std::vector<bool> in(m, false);
  for (std::size_t i : survivors) in[i] = true;
  std::size_t worst = survivors.front();
  for (std::size_t i : survivors)
    if (q[static_cast<Eigen::Index>(i)] > q[static_cast<Eigen::Index>(worst)]) worst = i;
  std::size_t best = m;
  for (std::size_t i = 0; i < m; ++i)
    if (!in[i] && (best == m || q[static_cast<Eigen::Index>(i)] < q[static_cast<Eigen::Index>(best)])) best = i;
  std::vector<std::size_t> out = survivors;
  std::replace(out.begin(), out.end(), worst, best);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

ClaimOutcome outcome(double alternative, double espf) {
  ClaimOutcome c;
  if (alternative == espf) {
    c.gap = 0.0;  // also covers matching infinities
  } else {
    c.gap = alternative - espf;
  }
  c.pass = c.gap >= -kClaimTolerance;
  return c;
}

}  // namespace

ComparatorReport evaluate_claims(const SupportCloud& prior, const Vector& q, const Vector& comp, std::size_t n_target,
                                 std::uint64_t seed, int draws, const ProfileOptions& profile) {
  ComparatorReport r;
  const auto chosen = select_min_q(q, n_target);
  const SubsetScore espf = score_subset(prior, comp, chosen, profile);
  r.espf_log_det = espf.log_det;
  r.espf_h_pi = espf.h_pi;

  const RandomComparison rnd = comparator_random(prior, comp, n_target, draws, seed, profile);
  r.random_log_det = rnd.best_log_det;
  r.random_h_pi = rnd.best_h_pi;
  r.claim_a_random = outcome(r.random_log_det, r.espf_log_det);
  r.claim_b_random = outcome(r.random_h_pi, r.espf_h_pi);

  if (n_target < static_cast<std::size_t>(q.size())) {
    const SubsetScore sw = score_subset(prior, comp, comparator_swap(q, chosen), profile);
    r.swap_available = true;
    r.swap_log_det = sw.log_det;
    r.swap_h_pi = sw.h_pi;
    r.claim_a_swap = outcome(r.swap_log_det, r.espf_log_det);
    r.claim_b_swap = outcome(r.swap_h_pi, r.espf_h_pi);
  }
  return r;
}

}  // namespace espf
