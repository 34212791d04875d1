#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "espf/errors.hpp"
#include "espf/geometry.hpp"
#include "oracles.hpp"

using namespace espf;

namespace {

Points square() {
  Points p(4, 2);
  p << 1, 1, 1, -1, -1, 1, -1, -1;
  return p;
}

}  // namespace

TEST_CASE("mvee of the square is the circumscribed circle") {
  const Ellipsoid e = mvee(square());
  CHECK(e.center.norm() < 1e-7);
  CHECK((e.shape - 2.0 * Matrix::Identity(2, 2)).norm() < 1e-6);
  CHECK(log_volume(e) == doctest::Approx(std::log(2.0 * std::numbers::pi)).epsilon(1e-6));
  CHECK(mvee_solve(square()).log_det == doctest::Approx(std::log(4.0)).epsilon(1e-6));
}

TEST_CASE("dual certificate on random clouds in R^3") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Points p = oracle::gaussian_cloud(rng, 10, 3);
    const MveeSolution s = mvee_solve(p, 1e-7);
    const Vector c = s.ellipsoid.containments(p);
    CHECK(c.maxCoeff() <= 1.0 + 1e-7);
    int active = 0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (c[i] >= 1.0 - 1e-7) ++active;
    CHECK(active >= 4);
  }
}

TEST_CASE("mvee log det agrees with a plain Khachiyan oracle") {
  std::mt19937_64 rng(12);
  for (int n : {2, 3, 5}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Points p = oracle::gaussian_cloud(rng, 3 * n + 4, n);
      CHECK(std::abs(log_det_mvee(p, 1e-9) - oracle::log_det(p)) < 1e-6);
    }
  }
}

TEST_CASE("mvee is affine equivariant") {
  std::mt19937_64 rng(13);
  const Points p = oracle::gaussian_cloud(rng, 20, 3);
  Matrix a(3, 3);
  a << 2, 0.3, 0, -1, 1, 0.5, 0.1, 0, 3;
  Vector b(3);
  b << 10, -5, 2;
  const Points q = (p * a.transpose()).rowwise() + b.transpose();
  const Ellipsoid e = mvee(p, 1e-9);
  const Ellipsoid f = mvee(q, 1e-9);
  const Matrix mapped = a * e.shape * a.transpose();
  CHECK((f.shape - mapped).norm() / mapped.norm() < 1e-5);
  CHECK((f.center - (a * e.center + b)).norm() < 1e-5 * mapped.norm());
}

TEST_CASE("degenerate clouds are rejected") {
  Points line(3, 2);
  line << 0, 0, 1, 1, 2, 2;
  CHECK_THROWS_AS(mvee_solve(line), DegenerateCloud);
  CHECK_THROWS_AS(log_det_mvee(square()), DegenerateCloud);  // 4 < 2n + 1
  CHECK_FALSE(spans_affinely(line));
}

TEST_CASE("unit ball volumes") {
  CHECK(log_unit_ball_volume(2) == doctest::Approx(std::log(std::numbers::pi)));
  CHECK(log_volume(Ellipsoid{Vector::Zero(2), 2.0 * Matrix::Identity(2, 2)}) ==
        doctest::Approx(std::log(2.0 * std::numbers::pi)));
  CHECK(std::exp(log_unit_ball_volume(7)) == doctest::Approx(4.7247659).epsilon(1e-6));
  CHECK(log_unit_ball_volume(7) == doctest::Approx(oracle::log_ball(7)));
}

TEST_CASE("whitening factor") {
  CHECK((whitening_factor(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() == 0.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  const Matrix l = whitening_factor(d);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 1) == doctest::Approx(3.0));
  CHECK(l(0, 1) == 0.0);

  std::mt19937_64 rng(14);
  const Matrix g = oracle::gaussian_cloud(rng, 7, 7);
  const Matrix spd = g * g.transpose() + Matrix::Identity(7, 7);
  const Matrix f = whitening_factor(spd);
  CHECK((f * f.transpose() - spd).norm() / spd.norm() < 1e-10);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1;
  CHECK_THROWS_AS(whitening_factor(bad), NotPositiveDefinite);
}

TEST_CASE("vfi classification and enforcement") {
  CHECK(check_vfi({Vector::Zero(2), Matrix::Identity(2, 2)}, {0.1, 10}).status == VfiStatus::ok);
  Matrix low = Matrix::Identity(2, 2);
  low(0, 0) = 1e-9;
  CHECK(check_vfi({Vector::Zero(2), low}, {1e-6, 1e6}).status == VfiStatus::below_floor);
  Matrix high = Matrix::Identity(2, 2);
  high(1, 1) = 1e12;
  CHECK(check_vfi({Vector::Zero(2), high}, {1e-6, 1e6}).status == VfiStatus::above_ceiling);

  const Matrix fixed = enforce_vfi(low, {1e-6, 1e6});
  const VfiCheck after = check_vfi({Vector::Zero(2), fixed}, {1e-6, 1e6});
  CHECK(after.lambda_min >= 1e-6 * (1 - 1e-12));
  CHECK(check_vfi({Vector::Zero(2), enforce_vfi(high, {1e-6, 1e6})}, {1e-6, 1e6}).lambda_max <= 1e6 * (1 + 1e-12));
  CHECK_THROWS_AS((VfiBounds{1.0, 0.5}.validate()), Error);
}

TEST_CASE("accumulator over nested sets matches fresh solves") {
  std::mt19937_64 rng(15);
  const Points p = oracle::gaussian_cloud(rng, 30, 3);
  const auto frame = scatter_frame(p);
  MveeAccumulator acc(3, 30, 1e-9);
  acc.set_frame(frame.first, frame.second);
  for (Eigen::Index i = 0; i < 30; ++i) {
    acc.add(p.row(i).transpose());
    if (i + 1 < 7) continue;
    const MveeSolution s = acc.solve();
    const Points head = p.topRows(i + 1);
    const double expected = log_det_mvee(head, 1e-9);
    CHECK(std::log(s.ellipsoid.shape.determinant()) == doctest::Approx(expected).epsilon(1e-6));
  }
}
