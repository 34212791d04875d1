#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

Ellipse khachiyan(const Mat& points, double tol, int max_iter) {
  const int m = static_cast<int>(points.rows());
  const int n = static_cast<int>(points.cols());
  Mat q(n + 1, m);
  q.topRows(n) = points.transpose();
  q.row(n).setOnes();
  Vec u = Vec::Constant(m, 1.0 / m);
  Mat xinv = (q * u.asDiagonal() * q.transpose()).inverse();
  const double d = n + 1.0;
  for (int it = 0; it < max_iter; ++it) {
    if (it % 1000 == 999) xinv = (q * u.asDiagonal() * q.transpose()).inverse();
    const Vec g = (q.array() * (xinv * q).array()).colwise().sum().transpose();
    Eigen::Index up = 0;
    const double gmax = g.maxCoeff(&up);
    Eigen::Index down = -1;
    for (Eigen::Index i = 0; i < m; ++i)
      if (u[i] > 0.0 && (down < 0 || g[i] < g[down])) down = i;
    const double over = gmax / d - 1.0;
    const double under = 1.0 - g[down] / d;
    if (std::max(over, under) < tol) break;
    // Khachiyan step toward the farthest point, or the Todd-Yildirim away
    // step from the innermost weighted point, whichever gap is larger.
    Eigen::Index j = up;
    double step = (gmax - d) / (d * (gmax - 1.0));
    if (under > over) {
      j = down;
      step = std::max((g[down] - d) / (d * (g[down] - 1.0)), -u[down] / (1.0 - u[down]));
      if (g[down] <= 1.0) step = -u[down] / (1.0 - u[down]);
    }
    u *= 1.0 - step;
    u[j] += step;
    if (u[j] < 0.0) u[j] = 0.0;
    // X' = (1 - step) X + step q_j q_j^T, inverted by Sherman-Morrison.
    const Vec xq = xinv * q.col(j) / (1.0 - step);
    xinv = xinv / (1.0 - step) - (step / (1.0 + step * q.col(j).dot(xq))) * xq * xq.transpose();
  }
  Ellipse e;
  e.center = points.transpose() * u;
  const Mat scatter = points.transpose() * u.asDiagonal() * points - e.center * e.center.transpose();
  e.shape = n * scatter;
  e.log_det = std::log(e.shape.determinant());
  return e;
}

double log_ball(int n) { return 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0); }

double level_integral_trapezoid(double step) {
  double sum = 0.0;
  for (double s = -40.0; s <= 5.0; s += step) {
    const double t = std::exp(s);
    const double w = (s == -40.0) ? 0.5 : 1.0;
    sum += w * std::log(2.0 * t) * std::exp(-t) * t;
  }
  return sum * step;
}

double log_det(const Mat& points) { return khachiyan(points).log_det; }

double best_subset_log_det(const Mat& points, std::size_t n_target) {
  const int m = static_cast<int>(points.rows());
  const int n = static_cast<int>(points.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> mask(static_cast<std::size_t>(m), false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(n_target), true);
  do {
    Mat sub(static_cast<Eigen::Index>(n_target), n);
    Eigen::Index r = 0;
    for (int i = 0; i < m; ++i)
      if (mask[static_cast<std::size_t>(i)]) sub.row(r++) = points.row(i);
    const Vec mean = sub.colwise().mean();
    const Mat centered = sub.rowwise() - mean.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(centered.transpose() * centered);
    if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff()) continue;
    best = std::min(best, log_det(sub));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

Scalar kalman_scalar(Scalar prior, double q, double r, double y) {
  const double p = prior.var + q;
  const double k = p / (p + r);
  return {prior.mean + k * (y - prior.mean), (1.0 - k) * p};
}

double cold_start_h(const Mat& points) {
  return log_ball(static_cast<int>(points.cols())) + 0.5 * log_det(points);
}

Mat gaussian_cloud(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat p(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = g(rng);
  return p;
}

}  // namespace oracle
