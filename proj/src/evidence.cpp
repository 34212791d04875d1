#include "espf/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "espf/errors.hpp"
#include "espf/simd.hpp"

namespace espf {

InnovationContext innovation_shape(const Points& predicted, const Matrix& sensor_imprecision, double mvee_tolerance) {
  const auto m = sensor_imprecision.rows();
  if (predicted.cols() != m) throw Error("innovation_shape: measurement dimension mismatch");
  Matrix shape = sensor_imprecision;
  bool fallback = true;
  if (predicted.rows() >= m + 1) {
    try {
      shape = mvee(predicted, mvee_tolerance).shape + sensor_imprecision;
      fallback = false;
    } catch (const DegenerateCloud&) {
    }
  }
  InnovationContext ctx = innovation_context(predicted, 0.5 * (shape + shape.transpose()));
  ctx.fallback = fallback;
  return ctx;
}

InnovationContext innovation_context(const Points& predicted, const Matrix& shape) {
  InnovationContext ctx;
  ctx.predicted = predicted;
  ctx.shape = shape;
  ctx.lower = whitening_factor(shape);
  return ctx;
}

WhitenedInnovations whitened_q(const InnovationContext& ctx, const Vector& y) {
  const auto m = static_cast<int>(ctx.shape.rows());
  if (y.size() != m) throw Error("whitened_q: measurement dimension mismatch");
  const auto count = static_cast<std::size_t>(ctx.predicted.rows());
  WhitenedInnovations out{Vector(ctx.predicted.rows()), Vector(ctx.predicted.rows())};
  simd::whitened_sq_norms(ctx.lower.data(), m, ctx.predicted.data(), count, count, y.data(), out.q.data());
  out.comp = (-0.5 * out.q.array()).exp();
  return out;
}

double choquet_surprisal(const Vector& q, const Vector& prior) {
  if (q.size() != prior.size()) throw Error("choquet_surprisal: length mismatch");
  double best = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) best = std::max(best, std::min(0.5 * q[i], prior[i]));
  return best;
}

double info_content(double surprisal) {
  if (!(surprisal >= 0.0)) throw Error("info_content: surprisal must be non-negative");
  return -std::expm1(-surprisal);
}

double pcrb_floor(double h_pre, double info, int n) {
  if (info >= 1.0) return -std::numeric_limits<double>::infinity();
  return h_pre + 0.5 * static_cast<double>(n) * std::log1p(-info);
}

EvidenceScores score_evidence(const InnovationContext& ctx, const Vector& y, const Vector& prior) {
  auto w = whitened_q(ctx, y);
  EvidenceScores s;
  s.surprisal = choquet_surprisal(w.q, prior);
  s.info = info_content(s.surprisal);
  s.q = std::move(w.q);
  s.comp = std::move(w.comp);
  return s;
}

namespace {

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

IsotropyResult isotropy_check(const SupportCloud& cloud, const InnovationContext& ctx, const MeasurementFn& h,
                              const Ellipsoid& core, int samples, std::uint64_t seed) {
  if (samples < 100) throw Error("isotropy_check: need at least 100 samples");
  const int n = cloud.dim();
  const Ellipsoid support = mvee(cloud.points());
  const Matrix support_lower = whitening_factor(support.shape);
  const Matrix core_lower = whitening_factor(core.shape);
  const Vector y = h(core.center);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cube(-1.0, 1.0);
  std::vector<double> innov;
  std::vector<double> state;
  innov.reserve(static_cast<std::size_t>(samples));
  state.reserve(static_cast<std::size_t>(samples));
  Vector u(n);
  while (static_cast<int>(innov.size()) < samples) {
    for (int k = 0; k < n; ++k) u[k] = cube(rng);
    if (u.squaredNorm() > 1.0) continue;
    const Vector x = support.center + support_lower * u;
    const Vector r = y - h(x);
    innov.push_back(ctx.lower.triangularView<Eigen::Lower>().solve(r).squaredNorm());
    state.push_back(core_lower.triangularView<Eigen::Lower>().solve(x - core.center).squaredNorm());
  }
  IsotropyResult out;
  const double vs = variance(state);
  out.ratio = vs > 0.0 ? variance(innov) / vs : std::numeric_limits<double>::infinity();
  out.holds = out.ratio <= 1.0;
  return out;
}

}  // namespace espf
