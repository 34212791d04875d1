#pragma once

#include <cstdint>
#include "espf/geometry.hpp"
#include "espf/possibility.hpp"

namespace espf {

/// Smolyak node template built from the nested Clenshaw-Curtis abscissae
/// {0}, {0, +-1}, {0, +-1, +-cos(pi/4)}, ... (sizes 1, 3, 5, 9, 17, 33).
struct GridSpec {
  int dim = 7;
  int level = 3;
};

inline constexpr int kMaxGridLevel = 6;

/// Node list, origin first, scaled so the MVEE of the nodes is the unit ball.
/// Throws UnsupportedLevel outside 1..kMaxGridLevel.
Points generate_nodes(const GridSpec& spec);

struct RegenerationOptions {
  VfiBounds vfi;
  double kernel_scale = 1.0;  // kernel factor = kernel_scale * L
  double mvee_tolerance = kDefaultMveeTolerance;
  // Orthogonal n x n matrix applied to the nodes before scaling; empty keeps
  // the grid axes. Rotating breaks the alignment between the grid's
  // coordinate families and the measurement, which otherwise lets min-q
  // selection keep a flat subset (every survivor with the same zero
  // coordinates).
  Matrix rotation;
};

/// Haar-distributed orthogonal matrix from a seeded stream.
Matrix random_rotation(int n, std::uint64_t seed, std::uint64_t stream);

struct Regeneration {
  SupportCloud cloud;
  Ellipsoid survivor_mvee;
  Matrix shape;  // shape of the regenerated template, sigma^2 Pi after VFI
  bool survivor_degenerate = false;
  bool vfi_adjusted = false;
};

/// New points center + L u for unit nodes u, L L^T = VFI(sigma^2 Pi_surv), with
/// possibilities from max-min kernel extension of the survivors, max-normalized.
/// A degenerate survivor set is replaced by its scatter ellipsoid inflated to
/// the VFI floor.
Regeneration regenerate(const SupportCloud& survivors, const Points& nodes, double sigma,
                        const RegenerationOptions& options = {});

}  // namespace espf
