#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "espf/types.hpp"

namespace espf::orbit {

inline constexpr double kMu = 398600.4418;          // km^3/s^2
inline constexpr double kJ2 = 1.08263e-3;
inline constexpr double kEarthRadius = 6378.137;    // km
inline constexpr double kEarthRate = 7.2921159e-5;  // rad/s
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kSecondsPerDay = 86400.0;

/// Position (km, ECI), velocity (km/s, ECI) and drag coefficient. The force
/// model carries Cd but applies no atmospheric drag.
struct OrbitState {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  double cd = 2.2;

  Vector to_vector() const;
  static OrbitState from_vector(const Eigen::Ref<const Vector>& x);
};

struct Elements {
  double a_km = 7000.0;
  double ecc = 0.0;
  double inc_deg = 0.0;
  double raan_deg = 0.0;
  double argp_deg = 0.0;
  double mean_anomaly_deg = 0.0;
};

OrbitState from_elements(const Elements& el, double cd);

struct ForceModel {
  bool j2 = true;
  double step_s = 10.0;  // RK4 step ceiling
};

Eigen::Vector3d acceleration(const Eigen::Vector3d& r, bool j2);

/// Columns R, T, N of the radial/transverse/normal frame.
Eigen::Matrix3d rtn_frame(const Eigen::Vector3d& r, const Eigen::Vector3d& v);

/// RK4 over dt seconds in equal substeps no longer than model.step_s. With a
/// generator and a positive process_accel (km/s^2), each substep adds an
/// independent Gaussian acceleration of that standard deviation per RTN axis.
/// Throws SubsurfaceTrajectory if the orbit dips below the Earth's surface.
OrbitState propagate(const OrbitState& x, double dt, const ForceModel& model, double process_accel = 0.0,
                     std::mt19937_64* rng = nullptr);

/// Specific orbital energy v^2/2 - mu/r.
double specific_energy(const OrbitState& x);

struct Station {
  std::string name;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_km = 0.0;
  double range_bias_km = 0.0;
  double bias_epoch_s = 0.0;  // bias applies to measurements at or after this time
};

/// Station position in the Earth-fixed frame (WGS-84 ellipsoid).
Eigen::Vector3d station_ecef(const Station& s);

struct StationKinematics {
  Eigen::Vector3d r;
  Eigen::Vector3d v;
  Eigen::Vector3d up;  // geodetic zenith in ECI
};

/// Station state in the inertial frame at t seconds (Earth angle = rate * t).
StationKinematics station_eci(const Station& s, double t);

/// Elevation of the satellite above the station's local horizon, radians.
double elevation(const OrbitState& x, const Station& s, double t);

/// Geometric range and range rate from an inertial station state.
Eigen::Vector2d range_and_rate(const Eigen::Vector3d& r, const Eigen::Vector3d& v, const Eigen::Vector3d& rs,
                               const Eigen::Vector3d& vs);

struct MeasurementNoise {
  double sigma_range_km = 1e-3;
  double sigma_rate_kms = 1e-5;
};

struct Measurement {
  double t = 0.0;
  std::size_t station = 0;
  Eigen::Vector2d value = Eigen::Vector2d::Zero();  // range km, range rate km/s
};

/// Noise-free range/range-rate, no bias; the filter's measurement model.
Eigen::Vector2d predict_measurement(const OrbitState& x, const Station& s, double t);

/// Range/range-rate with the station bias (when active) and Gaussian noise
/// drawn from rng (skipped when rng is null). Throws NotVisible below the mask.
Measurement measure(const OrbitState& x, const Station& s, std::size_t station_index, double t, double mask_rad,
                    const MeasurementNoise& noise, std::mt19937_64* rng);

enum class StressKind { maneuver, range_bias };

struct StressEvent {
  StressKind kind = StressKind::maneuver;
  double epoch_days = 0.0;
  double magnitude = 0.0;  // km/s along N for maneuvers, km for range bias
  std::string station;     // range bias target
};

/// Adds every maneuver whose epoch lies in (t_from, t_to] (seconds) to the
/// velocity along the orbit normal. Range biases act through Station.
OrbitState apply_stress(const OrbitState& truth, const std::vector<StressEvent>& events, double t_from, double t_to);

}  // namespace espf::orbit
