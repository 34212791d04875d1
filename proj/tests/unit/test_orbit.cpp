#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "espf/errors.hpp"
#include "espf/kalman.hpp"
#include "espf/orbit.hpp"
#include "oracles.hpp"

using namespace espf;
using namespace espf::orbit;

TEST_CASE("circular two-body orbit closes after one period") {
  const OrbitState x0 = from_elements({7000.0, 0.0, 30.0, 0.0, 0.0, 0.0}, 2.2);
  const double period = 2.0 * std::numbers::pi * std::sqrt(std::pow(7000.0, 3) / kMu);
  const OrbitState x1 = propagate(x0, period, ForceModel{false, 1.0});
  CHECK((x1.r - x0.r).norm() < 1e-6);
}

TEST_CASE("two-body energy is conserved over two days") {
  const OrbitState x0 = from_elements({7078.137, 0.001, 25.0, 0.0, 0.0, 0.0}, 2.2);
  const OrbitState x1 = propagate(x0, 2.0 * kSecondsPerDay, ForceModel{false, 10.0});
  const double e0 = specific_energy(x0);
  CHECK(std::abs((specific_energy(x1) - e0) / e0) < 1e-9);
}

TEST_CASE("J2 regresses the node of a prograde orbit") {
  const double a = 7078.137;
  const double inc = 25.0 * std::numbers::pi / 180.0;
  const OrbitState x0 = from_elements({a, 0.0, 25.0, 0.0, 0.0, 0.0}, 2.2);
  const double dt = 0.5 * kSecondsPerDay;
  const OrbitState x1 = propagate(x0, dt, ForceModel{true, 10.0});
  auto raan = [](const OrbitState& x) {
    const Eigen::Vector3d h = x.r.cross(x.v);
    return std::atan2(h.x(), -h.y());
  };
  const double n = std::sqrt(kMu / std::pow(a, 3));
  const double rate = -1.5 * n * kJ2 * std::pow(kEarthRadius / a, 2) * std::cos(inc);
  const double drift = raan(x1) - raan(x0);
  CHECK(drift < 0.0);
  CHECK(drift == doctest::Approx(rate * dt).epsilon(0.05));
}

TEST_CASE("subsurface trajectories are rejected") {
  OrbitState x;
  x.r = Eigen::Vector3d(6000.0, 0.0, 0.0);
  x.v = Eigen::Vector3d(0.0, 1.0, 0.0);
  CHECK_THROWS_AS(propagate(x, 60.0, ForceModel{}), SubsurfaceTrajectory);
}

TEST_CASE("range and range rate in orthogonal geometry") {
  const Eigen::Vector2d m = range_and_rate({7000.0, 0.0, 0.0}, {0.0, 7.5, 0.0}, Eigen::Vector3d::Zero(),
                                           Eigen::Vector3d::Zero());
  CHECK(m[0] == doctest::Approx(7000.0));
  CHECK(m[1] == doctest::Approx(0.0));
}

TEST_CASE("station bias and noise") {
  Station s{"site", 0.0, 0.0, 0.0, 0.0, 0.0};
  const StationKinematics k = station_eci(s, 0.0);
  OrbitState x;
  x.r = k.r + 1000.0 * k.up;
  x.v = Eigen::Vector3d(0.0, 7.5, 0.0);
  const Eigen::Vector2d geometric = predict_measurement(x, s, 0.0);
  const Measurement clean = measure(x, s, 0, 0.0, 0.0, MeasurementNoise{}, nullptr);
  CHECK(clean.value == geometric);
  s.range_bias_km = 0.020;
  const Measurement biased = measure(x, s, 0, 0.0, 0.0, MeasurementNoise{}, nullptr);
  CHECK(biased.value[0] - geometric[0] == doctest::Approx(0.020));
  x.r = k.r - 1000.0 * k.up;
  CHECK_THROWS_AS(measure(x, s, 0, 0.0, 0.0, MeasurementNoise{}, nullptr), NotVisible);
}

TEST_CASE("maneuver is applied along the orbit normal at its epoch") {
  const OrbitState x = from_elements({7078.137, 0.001, 25.0, 0.0, 0.0, 0.0}, 2.2);
  const std::vector<StressEvent> ev{{StressKind::maneuver, 1.0, 0.010, ""}};
  const OrbitState before = apply_stress(x, ev, 0.0, 0.5 * kSecondsPerDay);
  CHECK(before.v == x.v);
  const OrbitState after = apply_stress(x, ev, 0.9 * kSecondsPerDay, 1.0 * kSecondsPerDay);
  const Eigen::Vector3d dv = after.v - x.v;
  CHECK(dv.norm() == doctest::Approx(0.010));
  CHECK(std::abs(dv.normalized().dot(rtn_frame(x.r, x.v).col(2))) == doctest::Approx(1.0));
  const ForceModel f;
  CHECK((propagate(after, 600.0, f).r - propagate(x, 600.0, f).r).norm() > 1.0);
}

TEST_CASE("kalman oracle agrees with the scalar recursion") {
  const Matrix one = Matrix::Identity(1, 1);
  Vector y(1);
  y << 0.7;
  const KalmanEstimate k =
      kalman_oracle_step(Vector::Zero(1), one, one, one, Matrix::Zero(1, 1), one, y);
  CHECK(k.cov(0, 0) == doctest::Approx(0.5));
  const oracle::Scalar s = oracle::kalman_scalar({0.0, 1.0}, 0.3, 2.0, 0.7);
  const KalmanEstimate k2 = kalman_oracle_step(Vector::Zero(1), one, one, one, 0.3 * one, 2.0 * one, y);
  CHECK(k2.mean[0] == doctest::Approx(s.mean));
  CHECK(k2.cov(0, 0) == doctest::Approx(s.var));

  const KalmanEstimate exact = kalman_oracle_step(Vector::Zero(1), one, one, one, Matrix::Zero(1, 1), 1e-12 * one, y);
  CHECK(exact.mean[0] == doctest::Approx(0.7));
}

TEST_CASE("kalman innovations are white on constant-velocity tracking") {
  Matrix f(2, 2), h(1, 2);
  f << 1, 1, 0, 1;
  h << 1, 0;
  const Matrix q = 0.01 * Matrix::Identity(2, 2);
  const Matrix r = Matrix::Identity(1, 1);
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector truth(2);
  truth << 0, 1;
  Vector mean = Vector::Zero(2);
  Matrix cov = 10.0 * Matrix::Identity(2, 2);
  std::vector<double> nu;
  for (int k = 0; k < 100; ++k) {
    truth = f * truth;
    truth[0] += 0.1 * g(rng);
    truth[1] += 0.1 * g(rng);
    Vector y(1);
    y << truth[0] + g(rng);
    const KalmanEstimate e = kalman_oracle_step(mean, cov, f, h, q, r, y);
    nu.push_back(e.innovation[0] / std::sqrt(e.innovation_cov(0, 0)));
    mean = e.mean;
    cov = e.cov;
  }
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    c0 += nu[i] * nu[i];
    if (i > 0) c1 += nu[i] * nu[i - 1];
  }
  CHECK(std::abs(c1 / c0) < 0.2);
}
