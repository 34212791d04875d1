#include "espf/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "espf/config.hpp"
#include "espf/entropy.hpp"
#include "espf/errors.hpp"
#include "espf/evidence.hpp"
#include "espf/geometry.hpp"
#include "espf/scenario.hpp"
#include "espf/selection.hpp"

namespace espf {
namespace {

Points gaussian_points(std::mt19937_64& rng, Eigen::Index m, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Points p(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = g(rng);
  return p;
}

Matrix random_transform(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  do {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  } while (std::abs(a.determinant()) < 0.1);
  return a;
}

Vector random_possibilities(std::mt19937_64& rng, Eigen::Index m) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector p(m);
  for (Eigen::Index i = 0; i < m; ++i) p[i] = u(rng);
  return max_normalize(p);
}

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os.precision(6);
  os << label << '=' << v;
  return os.str();
}

}  // namespace

double gaussian_level_integral() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([](double a) { return std::log(-2.0 * std::log(a)); }, 0.0, 1.0);
}

DenseGaussianCloud dense_gaussian_cloud(const Matrix& cov, int rings, int per_ring) {
  if (cov.rows() != 2 || rings < 1 || per_ring < 5) throw Error("dense_gaussian_cloud: planar covariance and >= 5 points per ring");
  const Matrix l = whitening_factor(cov);
  DenseGaussianCloud out;
  out.points.resize(static_cast<Eigen::Index>(rings) * per_ring, 2);
  out.poss.resize(out.points.rows());
  Eigen::Index row = 0;
  for (int k = 1; k <= rings; ++k) {
    const double level = (k - 0.5) / rings;
    const double radius = std::sqrt(-2.0 * std::log(level));
    for (int j = 0; j < per_ring; ++j) {
      const double th = 2.0 * std::numbers::pi * j / per_ring;
      Vector u(2);
      u << radius * std::cos(th), radius * std::sin(th);
      out.points.row(row) = (l * u).transpose();
      out.poss[row] = level;
      ++row;
    }
  }
  out.poss = max_normalize(out.poss);
  return out;
}

CheckResult check_mvee_certification(int clouds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int dims[] = {2, 3, 7};
  double worst_outside = 0.0, worst_equiv = 0.0;
  int fewest_active = 1 << 20, failures = 0;
  for (int c = 0; c < clouds; ++c) {
    const int n = dims[c % 3];
    std::uniform_int_distribution<int> msize(n + 2, 30);
    const Points base = gaussian_points(rng, msize(rng), n) * random_transform(rng, n).transpose();
    const MveeSolution s = mvee_solve(base);
    const double outside = s.ellipsoid.containments(base).maxCoeff() - 1.0;
    const int active = static_cast<int>((s.weights.array() > 0.0).count());
    const Matrix a = random_transform(rng, n);
    const Vector b = 10.0 * gaussian_points(rng, 1, n).row(0).transpose();
    const Points moved = (base * a.transpose()).rowwise() + b.transpose();
    const Ellipsoid e = mvee(moved);
    const Matrix expect = a * s.ellipsoid.shape * a.transpose();
    const double equiv = (e.shape - expect).norm() / expect.norm();
    worst_outside = std::max(worst_outside, outside);
    worst_equiv = std::max(worst_equiv, equiv);
    fewest_active = std::min(fewest_active, active - n);
    if (outside > 1e-7 || active < n + 1 || equiv > 1e-5) ++failures;
  }
  return {"mvee_certification", failures == 0,
          fmt("max_excess", worst_outside) + " " + fmt("max_equivariance_err", worst_equiv) + " " +
              fmt("min_active_minus_n", fewest_active) + " " + fmt("failures", failures)};
}

CheckResult check_selection_optimality(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> msize(10, 12);
  std::uniform_int_distribution<int> nsize(5, 9);
  int optimal = 0, beyond = 0;
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const int m = msize(rng);
    const auto n_target = static_cast<std::size_t>(nsize(rng));
    const Points x = gaussian_points(rng, m, 2);
    const Matrix h = random_transform(rng, 2);
    const Vector truth = gaussian_points(rng, 1, 2).row(0).transpose();
    const Vector y = h * truth;
    const InnovationContext ctx = innovation_shape(x * h.transpose(), 0.01 * Matrix::Identity(2, 2));
    const Vector q = whitened_q(ctx, y).q;
    const auto chosen = select_min_q(q, n_target);
    auto subset_points = [&](const std::vector<std::size_t>& idx) {
      Points p(static_cast<Eigen::Index>(idx.size()), 2);
      for (std::size_t k = 0; k < idx.size(); ++k) p.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(idx[k]));
      return p;
    };
    const double espf = log_det_mvee(subset_points(chosen));
    double best = espf;
    std::vector<bool> mask(static_cast<std::size_t>(m), false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n_target), true);
    do {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) idx.push_back(i);
      try {
        best = std::min(best, log_det_mvee(subset_points(idx)));
      } catch (const DegenerateCloud&) {
      }
    } while (std::prev_permutation(mask.begin(), mask.end()));
    const double gap = espf - best;
    worst = std::max(worst, gap);
    if (gap <= 2.0 * kDefaultMveeTolerance) ++optimal;
    else ++beyond;
  }
  const double rate = static_cast<double>(optimal) / instances;
  return {"selection_optimality", rate >= 0.95,
          fmt("optimal_rate", rate) + " " + fmt("max_gap", worst) + " " + fmt("suboptimal", beyond)};
}

CheckResult check_pcrb_synthetic(int steps, std::uint64_t seed, double slack) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  const int n = 2;
  const Eigen::Index m = 25;
  for (int t = 0; t < steps; ++t) {
    const Points x = gaussian_points(rng, m, n) * random_transform(rng, n).transpose();
    const SupportCloud prior(x, random_possibilities(rng, m));
    const double h_pre = h_pi(prior);
    const Matrix h = random_transform(rng, n);
    const Vector truth = x.row(static_cast<Eigen::Index>(t % m)).transpose() + 0.3 * gaussian_points(rng, 1, n).row(0).transpose();
    const Vector y = h * truth;
    const InnovationContext ctx = innovation_shape(x * h.transpose(), 0.05 * Matrix::Identity(n, n));
    const EvidenceScores ev = score_evidence(ctx, y, prior.poss());
    const std::size_t n_target = coverage_controller(ev.info, static_cast<std::size_t>(m), n);
    const auto survivors = select_min_q(ev.q, n_target);
    SelectionResult sel;
    try {
      sel = assign_possibility(survivors, ev.comp, prior.poss());
    } catch (const AllZero&) {
      continue;
    }
    const double post = h_pi(survivor_cloud(prior, sel));
    const double margin = post - pcrb_floor(h_pre, ev.info, n);
    worst = std::min(worst, margin);
    if (margin < -slack) ++violations;
  }
  return {"pcrb_synthetic", violations == 0, fmt("violations", violations) + " " + fmt("min_margin", worst)};
}

CheckResult check_holder_ordering(int clouds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double inf = std::numeric_limits<double>::infinity();
  const double ps[] = {-inf, -2.0, -1.0, 0.0, 1.0, 2.0, inf};
  int failures = 0;
  for (int c = 0; c < clouds; ++c) {
    const int n = 2 + c % 2;
    const Eigen::Index m = 20 + c % 15;
    const SupportCloud cloud(gaussian_points(rng, m, n), random_possibilities(rng, m));
    const CutVolumeProfile prof = cut_volume_profile(cloud);
    double prev = -inf;
    for (double p : ps) {
      const double v = holder_mean(prof, p);
      if (v < prev - 1e-9) ++failures;
      prev = v;
    }
    if (!prof.is_constant(1e-9)) {
      const double lo = holder_mean(prof, -inf), mid = h_pi(prof), hi = holder_mean(prof, inf);
      if (!(lo < mid && mid < hi)) ++failures;
    }
  }
  return {"holder_ordering", failures == 0, fmt("failures", failures)};
}

CheckResult check_entropy_properties(int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shrink(0.3, 1.0);
  std::bernoulli_distribution coin(0.3);
  int uniform_fail = 0, monotone_fail = 0, gradient_fail = 0;
  for (int t = 0; t < pairs; ++t) {
    const int n = 2 + t % 2;
    const Eigen::Index m = 20 + t % 10;
    const Points x = gaussian_points(rng, m, n) * random_transform(rng, n).transpose();

    const SupportCloud flat = SupportCloud::uniform(x);
    if (std::abs(h_pi(flat) - log_volume(mvee(x))) > 1e-9) ++uniform_fail;

    const SupportCloud cloud(x, random_possibilities(rng, m));
    const double h0 = h_pi(cloud);
    if (decompose(cut_volume_profile(cloud)).gradient_entropy > 1e-12) ++gradient_fail;

    // Lower a random subset, then push one active point of the outer cut
    // below every other level so that the outer cut loses it.
    const std::size_t top = anchor(cloud);
    Vector lowered = cloud.poss();
    for (Eigen::Index i = 0; i < m; ++i)
      if (static_cast<std::size_t>(i) != top && coin(rng)) lowered[i] *= shrink(rng);
    const Vector w = mvee_solve(x).weights;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < m; ++i)
      if (w[i] > 0.0 && static_cast<std::size_t>(i) != top) pick = i;
    if (pick >= 0) lowered[pick] = 0.5 * lowered.minCoeff();
    const double h1 = h_pi(SupportCloud(x, lowered));
    if (!(h1 < h0)) ++monotone_fail;
  }
  const bool ok = uniform_fail == 0 && monotone_fail == 0 && gradient_fail == 0;
  return {"entropy_properties", ok,
          fmt("uniform_fail", uniform_fail) + " " + fmt("monotone_fail", monotone_fail) + " " +
              fmt("gradient_fail", gradient_fail)};
}

CheckResult check_gaussian_quadrature() {
  const double err = std::abs(gaussian_level_integral() - kGaussianLevelConstant);
  return {"gaussian_quadrature", err < 1e-4, fmt("abs_err", err)};
}

CheckResult check_dense_gaussian() {
  Matrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  const DenseGaussianCloud d = dense_gaussian_cloud(cov, 500);
  const double err = std::abs(h_pi(SupportCloud(d.points, d.poss)) - gaussian_h_pi(cov));
  return {"dense_gaussian", err < 0.05, fmt("abs_err", err)};
}

CheckResult check_linear_tracking(std::uint64_t seed) {
  ScenarioConfig c = linear_config();
  c.seeds.override_all(seed);
  const RunOutput run = run_scenario(c);
  double worst = 0.0;
  for (const auto& r : run.linear) worst = std::max(worst, std::abs(r.anchor - r.kf_mean) / r.kf_sd);
  const bool ok = !run.failure && run.linear.size() == static_cast<std::size_t>(c.epochs) && worst <= 3.0;
  return {"linear_tracking", ok, fmt("max_kf_sigmas", worst) + " " + fmt("steps", static_cast<double>(run.linear.size()))};
}

std::vector<CheckResult> run_validation_suite(std::uint64_t seed) {
  return {check_mvee_certification(1000, seed),     check_selection_optimality(500, seed + 1),
          check_pcrb_synthetic(200, seed + 2),       check_holder_ordering(200, seed + 3),
          check_entropy_properties(200, seed + 4),   check_gaussian_quadrature()};
}

std::vector<CheckResult> run_gaussian_limit_suite(std::uint64_t seed) {
  return {check_gaussian_quadrature(), check_dense_gaussian(), check_linear_tracking(seed)};
}

}  // namespace espf
