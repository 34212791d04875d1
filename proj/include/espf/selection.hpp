#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "espf/entropy.hpp"
#include "espf/possibility.hpp"

namespace espf {

/// clamp(floor((1 - info) M), 2n + 1, M)
std::size_t coverage_controller(double info, std::size_t m, int n);

/// The n_target smallest q, ties to the smaller index; returned in ascending
/// index order.
std::vector<std::size_t> select_min_q(const Vector& q, std::size_t n_target);

struct SelectionResult {
  std::vector<std::size_t> survivors;  // ascending indices
  Vector unnormalized;                 // min(prior, comp) on survivors
  Vector assigned;                     // max-normalized, floored at kPossibilityFloor
  std::size_t prune_count = 0;
};

/// Throws AllZero when every survivor's min(prior, comp) underflows.
SelectionResult assign_possibility(const std::vector<std::size_t>& survivors, const Vector& comp,
                                   const Vector& prior);

/// Survivor cloud carrying the assigned possibilities.
SupportCloud survivor_cloud(const SupportCloud& prior, const SelectionResult& selection);

/// One evidence-weighted draw of n_target indices without replacement, weights
/// proportional to comp. Draw `index` uses its own substream of `seed`.
std::vector<std::size_t> weighted_draw(const Vector& comp, std::size_t n_target, std::uint64_t seed,
                                       std::uint64_t index);

struct SubsetScore {
  double log_det = 0.0;  // log det MVEE of the subset; -inf when degenerate
  double h_pi = 0.0;     // H_pi of the subset under its assigned possibilities
};

SubsetScore score_subset(const SupportCloud& prior, const Vector& comp, const std::vector<std::size_t>& subset,
                         const ProfileOptions& profile = {});

struct RandomComparison {
  double best_h_pi = 0.0;
  double best_log_det = 0.0;
  int draws = 0;
};

RandomComparison comparator_random(const SupportCloud& prior, const Vector& comp, std::size_t n_target, int draws,
                                   std::uint64_t seed, const ProfileOptions& profile = {});

/// Replaces the survivor with the largest q by the non-survivor with the
/// smallest q. Throws NoNonSurvivor when every index survives.
std::vector<std::size_t> comparator_swap(const Vector& q, const std::vector<std::size_t>& survivors);

struct ClaimOutcome {
  bool pass = true;
  double gap = 0.0;  // alternative - espf, nats
};

struct ComparatorReport {
  double espf_log_det = 0.0;
  double espf_h_pi = 0.0;
  double random_log_det = 0.0;
  double random_h_pi = 0.0;
  double swap_log_det = 0.0;
  double swap_h_pi = 0.0;
  bool swap_available = false;
  ClaimOutcome claim_a_random;
  ClaimOutcome claim_a_swap;
  ClaimOutcome claim_b_random;
  ClaimOutcome claim_b_swap;
};

inline constexpr double kClaimTolerance = 1e-9;
inline constexpr int kDefaultComparatorDraws = 50;

ComparatorReport evaluate_claims(const SupportCloud& prior, const Vector& q, const Vector& comp, std::size_t n_target,
                                 std::uint64_t seed, int draws = kDefaultComparatorDraws,
                                 const ProfileOptions& profile = {});

}  // namespace espf
