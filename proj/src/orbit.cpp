#include "espf/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "espf/errors.hpp"

namespace espf::orbit {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double solve_kepler(double mean, double ecc) {
  double e = ecc < 0.8 ? mean : std::numbers::pi;
  for (int it = 0; it < 50; ++it) {
    const double f = e - ecc * std::sin(e) - mean;
    const double step = f / (1.0 - ecc * std::cos(e));
    e -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return e;
}

struct Deriv {
  Eigen::Vector3d dr;
  Eigen::Vector3d dv;
};

Deriv rhs(const Eigen::Vector3d& r, const Eigen::Vector3d& v, bool j2, const Eigen::Vector3d& extra) {
  return {v, acceleration(r, j2) + extra};
}

}  // namespace

Vector OrbitState::to_vector() const {
  Vector x(7);
  x << r, v, cd;
  return x;
}

OrbitState OrbitState::from_vector(const Eigen::Ref<const Vector>& x) {
  if (x.size() != 7) throw Error("OrbitState: expected a 7-vector");
  OrbitState s;
  s.r = x.segment<3>(0);
  s.v = x.segment<3>(3);
  s.cd = x[6];
  return s;
}

OrbitState from_elements(const Elements& el, double cd) {
  const double ecc = el.ecc;
  const double big_e = solve_kepler(el.mean_anomaly_deg * kDeg, ecc);
  const double nu = 2.0 * std::atan2(std::sqrt(1.0 + ecc) * std::sin(0.5 * big_e),
                                     std::sqrt(1.0 - ecc) * std::cos(0.5 * big_e));
  const double p = el.a_km * (1.0 - ecc * ecc);
  const double rad = p / (1.0 + ecc * std::cos(nu));
  const Eigen::Vector3d r_pf(rad * std::cos(nu), rad * std::sin(nu), 0.0);
  const Eigen::Vector3d v_pf(-std::sqrt(kMu / p) * std::sin(nu), std::sqrt(kMu / p) * (ecc + std::cos(nu)), 0.0);
  const Eigen::Matrix3d rot = (Eigen::AngleAxisd(el.raan_deg * kDeg, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(el.inc_deg * kDeg, Eigen::Vector3d::UnitX()) *
                               Eigen::AngleAxisd(el.argp_deg * kDeg, Eigen::Vector3d::UnitZ()))
                                  .toRotationMatrix();
  OrbitState s;
  s.r = rot * r_pf;
  s.v = rot * v_pf;
  s.cd = cd;
  return s;
}

Eigen::Vector3d acceleration(const Eigen::Vector3d& r, bool j2) {
  const double r2 = r.squaredNorm();
  const double rn = std::sqrt(r2);
  Eigen::Vector3d a = -kMu / (r2 * rn) * r;
  if (j2) {
    const double z2 = r.z() * r.z() / r2;
    const double k = 1.5 * kJ2 * kMu * kEarthRadius * kEarthRadius / (r2 * r2 * rn);
    a.x() += k * r.x() * (5.0 * z2 - 1.0);
    a.y() += k * r.y() * (5.0 * z2 - 1.0);
    a.z() += k * r.z() * (5.0 * z2 - 3.0);
  }
  return a;
}

Eigen::Matrix3d rtn_frame(const Eigen::Vector3d& r, const Eigen::Vector3d& v) {
  const Eigen::Vector3d rhat = r.normalized();
  const Eigen::Vector3d nhat = r.cross(v).normalized();
  Eigen::Matrix3d m;
  m.col(0) = rhat;
  m.col(1) = nhat.cross(rhat);
  m.col(2) = nhat;
  return m;
}

OrbitState propagate(const OrbitState& x, double dt, const ForceModel& model, double process_accel,
                     std::mt19937_64* rng) {
  if (!(dt > 0.0)) throw Error("propagate: dt must be positive");
  if (!(model.step_s > 0.0)) throw Error("propagate: integrator step must be positive");
  const int steps = static_cast<int>(std::ceil(dt / model.step_s - 1e-12));
  const double h = dt / static_cast<double>(steps);
  Eigen::Vector3d r = x.r;
  Eigen::Vector3d v = x.v;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < steps; ++s) {
    Eigen::Vector3d extra = Eigen::Vector3d::Zero();
    if (rng != nullptr && process_accel > 0.0) {
      const Eigen::Vector3d w(gauss(*rng), gauss(*rng), gauss(*rng));
      extra = process_accel * (rtn_frame(r, v) * w);
    }
    const Deriv k1 = rhs(r, v, model.j2, extra);
    const Deriv k2 = rhs(r + 0.5 * h * k1.dr, v + 0.5 * h * k1.dv, model.j2, extra);
    const Deriv k3 = rhs(r + 0.5 * h * k2.dr, v + 0.5 * h * k2.dv, model.j2, extra);
    const Deriv k4 = rhs(r + h * k3.dr, v + h * k3.dv, model.j2, extra);
    r += (h / 6.0) * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);
    v += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    if (r.norm() < kEarthRadius) throw SubsurfaceTrajectory("propagate: trajectory passed below the Earth's surface");
  }
  OrbitState out = x;
  out.r = r;
  out.v = v;
  return out;
}

double specific_energy(const OrbitState& x) { return 0.5 * x.v.squaredNorm() - kMu / x.r.norm(); }

Eigen::Vector3d station_ecef(const Station& s) {
  if (s.lat_deg < -90.0 || s.lat_deg > 90.0) throw Error("station latitude out of range: " + s.name);
  const double lat = s.lat_deg * kDeg;
  const double lon = s.lon_deg * kDeg;
  const double e2 = kFlattening * (2.0 - kFlattening);
  const double sl = std::sin(lat);
  const double nrad = kEarthRadius / std::sqrt(1.0 - e2 * sl * sl);
  return {(nrad + s.alt_km) * std::cos(lat) * std::cos(lon), (nrad + s.alt_km) * std::cos(lat) * std::sin(lon),
          (nrad * (1.0 - e2) + s.alt_km) * sl};
}

StationKinematics station_eci(const Station& s, double t) {
  const double theta = kEarthRate * t;
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const Eigen::Vector3d ecef = station_ecef(s);
  const double lat = s.lat_deg * kDeg;
  const double lon = s.lon_deg * kDeg;
  const Eigen::Vector3d up_ecef(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat));
  StationKinematics k;
  k.r = rot * ecef;
  k.v = Eigen::Vector3d(0.0, 0.0, kEarthRate).cross(k.r);
  k.up = rot * up_ecef;
  return k;
}

double elevation(const OrbitState& x, const Station& s, double t) {
  const StationKinematics k = station_eci(s, t);
  const Eigen::Vector3d los = x.r - k.r;
  return std::asin(std::clamp(los.dot(k.up) / los.norm(), -1.0, 1.0));
}

Eigen::Vector2d range_and_rate(const Eigen::Vector3d& r, const Eigen::Vector3d& v, const Eigen::Vector3d& rs,
                               const Eigen::Vector3d& vs) {
  const Eigen::Vector3d d = r - rs;
  const double rho = d.norm();
  return {rho, d.dot(v - vs) / rho};
}

Eigen::Vector2d predict_measurement(const OrbitState& x, const Station& s, double t) {
  const StationKinematics k = station_eci(s, t);
  return range_and_rate(x.r, x.v, k.r, k.v);
}

Measurement measure(const OrbitState& x, const Station& s, std::size_t station_index, double t, double mask_rad,
                    const MeasurementNoise& noise, std::mt19937_64* rng) {
  if (elevation(x, s, t) < mask_rad) throw NotVisible("measure: " + s.name + " below elevation mask");
  Measurement m;
  m.t = t;
  m.station = station_index;
  m.value = predict_measurement(x, s, t);
  if (t >= s.bias_epoch_s) m.value[0] += s.range_bias_km;
  if (rng != nullptr) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    m.value[0] += noise.sigma_range_km * gauss(*rng);
    m.value[1] += noise.sigma_rate_kms * gauss(*rng);
  }
  return m;
}

OrbitState apply_stress(const OrbitState& truth, const std::vector<StressEvent>& events, double t_from, double t_to) {
  OrbitState out = truth;
  for (const auto& e : events) {
    if (e.kind != StressKind::maneuver) continue;
    if (e.magnitude < 0.0) throw Error("apply_stress: maneuver magnitude must be non-negative");
    const double te = e.epoch_days * kSecondsPerDay;
    if (te > t_from && te <= t_to) out.v += e.magnitude * rtn_frame(out.r, out.v).col(2);
  }
  return out;
}

}  // namespace espf::orbit
