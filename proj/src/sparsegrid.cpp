#include "espf/sparsegrid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "espf/errors.hpp"

namespace espf {
namespace {

struct Abscissa {
  double value;
  int level;  // first 1D level containing the abscissa
};

// Nested abscissae in introduction order: 0, -1, +1, then each level's new
// Clenshaw-Curtis points from left to right.
std::vector<Abscissa> abscissae(int max_level) {
  std::vector<Abscissa> out{{0.0, 1}};
  if (max_level >= 2) {
    out.push_back({-1.0, 2});
    out.push_back({1.0, 2});
  }
  for (int level = 3; level <= max_level; ++level) {
    const int intervals = 1 << (level - 1);
    for (int k = intervals - 1; k > 0; k -= 2) {
      double x = std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(intervals));
      if (std::abs(x) < 1e-15) x = 0.0;
      out.push_back({x, level});
    }
  }
  return out;
}

void enumerate(const std::vector<Abscissa>& ax, int dim, int budget, int cost_exact, std::vector<int>& idx, int depth,
               int spent, std::vector<std::vector<int>>& out) {
  if (depth == dim) {
    if (spent == cost_exact) out.push_back(idx);
    return;
  }
  for (std::size_t a = 0; a < ax.size(); ++a) {
    const int c = ax[a].level - 1;
    if (spent + c > cost_exact || spent + c > budget) continue;
    idx[static_cast<std::size_t>(depth)] = static_cast<int>(a);
    enumerate(ax, dim, budget, cost_exact, idx, depth + 1, spent + c, out);
  }
}

}  // namespace

Points generate_nodes(const GridSpec& spec) {
  if (spec.dim < 1) throw Error("generate_nodes: dimension must be positive");
  if (spec.level < 1 || spec.level > kMaxGridLevel)
    throw UnsupportedLevel("generate_nodes: level " + std::to_string(spec.level) + " is not supported");
  const auto ax = abscissae(spec.level);
  const int budget = spec.level - 1;
  std::vector<std::vector<int>> combos;
  std::vector<int> idx(static_cast<std::size_t>(spec.dim), 0);
  for (int cost = 0; cost <= budget; ++cost) enumerate(ax, spec.dim, budget, cost, idx, 0, 0, combos);

  Points nodes(static_cast<Eigen::Index>(combos.size()), spec.dim);
  double radius = 0.0;
  for (std::size_t r = 0; r < combos.size(); ++r) {
    for (int d = 0; d < spec.dim; ++d)
      nodes(static_cast<Eigen::Index>(r), d) = ax[static_cast<std::size_t>(combos[r][static_cast<std::size_t>(d)])].value;
    radius = std::max(radius, nodes.row(static_cast<Eigen::Index>(r)).norm());
  }
  // The node set is invariant under signed coordinate permutations, so its
  // MVEE is the centered ball through the farthest nodes.
  if (radius > 0.0) nodes /= radius;
  return nodes;
}

Matrix random_rotation(int n, std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = g(rng);
  const Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Regeneration regenerate(const SupportCloud& survivors, const Points& nodes, double sigma,
                        const RegenerationOptions& options) {
  const int n = survivors.dim();
  if (nodes.cols() != n) throw Error("regenerate: node dimension mismatch");
  if (!(sigma > 0.0)) throw Error("regenerate: bandwidth must be positive");
  if (survivors.size() == 0) throw DegenerateCloud("regenerate: no survivors");

  Regeneration out;
  try {
    out.survivor_mvee = mvee(survivors.points(), options.mvee_tolerance);
  } catch (const DegenerateCloud&) {
    out.survivor_degenerate = true;
    const Vector mean = survivors.points().colwise().mean();
    const Matrix centered = survivors.points().rowwise() - mean.transpose();
    Matrix scatter = centered.transpose() * centered / static_cast<double>(survivors.size());
    out.survivor_mvee = Ellipsoid{mean, enforce_vfi(static_cast<double>(n) * scatter, options.vfi)};
  }

  const Matrix scaled = sigma * sigma * out.survivor_mvee.shape;
  out.shape = enforce_vfi(scaled, options.vfi);
  out.vfi_adjusted = !(out.shape - 0.5 * (scaled + scaled.transpose())).isZero(0.0);
  const Matrix lower = whitening_factor(out.shape);

  const Matrix map = options.rotation.size() == 0 ? lower : Matrix(lower * options.rotation);
  Points pts = (nodes * map.transpose()).rowwise() + out.survivor_mvee.center.transpose();
  const GaussianKernel kernel{options.kernel_scale * lower};
  const Vector raw = kernel_extend(survivors, pts, kernel);
  Vector poss = max_normalize(raw).cwiseMax(kPossibilityFloor);
  out.cloud = SupportCloud(std::move(pts), std::move(poss), survivors.epoch());
  return out;
}

}  // namespace espf
