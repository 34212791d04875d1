#include "espf/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "espf/errors.hpp"
#include "espf/kalman.hpp"
#include "espf/orbit.hpp"

namespace espf {
namespace {

// Filter coordinates are the state divided by the prior standard deviations,
// so the initial support is a ball of radius init_grid_radius.
struct OrbitFrame {
  Vector scale;

  Vector to_state(const Eigen::Ref<const Vector>& z) const { return z.cwiseProduct(scale); }
  Vector to_filter(const Eigen::Ref<const Vector>& x) const { return x.cwiseQuotient(scale); }
};

std::uint64_t claims_seed(std::uint64_t base, std::size_t step) {
  return base * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(step);
}

bool wants_claims(const ScenarioConfig& c, RunMode mode, std::size_t measured_index) {
  if (mode == RunMode::claims) return true;
  return c.claims_every > 0 && measured_index % static_cast<std::size_t>(c.claims_every) == 0;
}

void push_claim(RunOutput& out, const StepOutput& s) {
  if (!s.claims) return;
  out.claims.push_back(ClaimRow{s.record.step, s.record.t_days, s.record.sigma, s.record.log_det_mvee,
                                s.record.n_target, s.record.regime, *s.claims});
}

// `scale` maps filter coordinates back to the state; entropies are reported
// in state units.
FilterOptions filter_options(const ScenarioConfig& c, const Vector& scale) {
  FilterOptions f = c.filter;
  f.rotation_seed = c.seeds.rotation;
  f.profile.log_volume_offset = scale.array().abs().log().sum();
  return f;
}

double initial_reference(const FilterState& st, const ProfileOptions& profile) {
  return h_pi(cut_volume_profile(st.cloud, profile));
}

RunOutput run_orbit(const ScenarioConfig& c, RunMode mode) {
  const OrbitScenario& o = c.orbit;
  OrbitFrame frame;
  frame.scale.resize(7);
  frame.scale << o.init_sigma_pos_km, o.init_sigma_pos_km, o.init_sigma_pos_km, o.init_sigma_vel_kms,
      o.init_sigma_vel_kms, o.init_sigma_vel_kms, o.init_sigma_cd;
  const FilterOptions options = filter_options(c, frame.scale);
  Filter filter(options);

  orbit::OrbitState truth = orbit::from_elements(o.elements, o.cd);
  std::mt19937_64 truth_rng(c.seeds.truth);
  std::mt19937_64 meas_rng(c.seeds.measurement);
  std::mt19937_64 init_rng(c.seeds.init);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<orbit::Station> truth_stations = o.stations;
  for (const auto& e : o.stress) {
    if (e.kind != orbit::StressKind::range_bias) continue;
    for (auto& s : truth_stations) {
      if (s.name != e.station) continue;
      s.range_bias_km = e.magnitude;
      s.bias_epoch_s = e.epoch_days * orbit::kSecondsPerDay;
    }
  }

  Vector center = frame.to_filter(truth.to_vector());
  for (Eigen::Index k = 0; k < center.size(); ++k) center[k] += gauss(init_rng);
  const Matrix lower = c.init_grid_radius * Matrix::Identity(7, 7);
  FilterState state = filter.initial_state(center, lower, 0.0);

  RunOutput out;
  out.name = c.name;
  out.m = state.cloud.size();
  out.n = 7;
  out.reference_h = initial_reference(state, options.profile);

  const orbit::ForceModel force = o.force;
  const Propagator propagate = [&](const Points& z, double t0, double t1) {
    Points next(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const auto x = orbit::OrbitState::from_vector(frame.to_state(z.row(i).transpose()));
      next.row(i) = frame.to_filter(orbit::propagate(x, t1 - t0, force).to_vector()).transpose();
    }
    return next;
  };

  Matrix sensor = Matrix::Zero(2, 2);
  sensor(0, 0) = std::pow(o.sensor_scale * o.noise.sigma_range_km, 2);
  sensor(1, 1) = std::pow(o.sensor_scale * o.noise.sigma_rate_kms, 2);
  const double mask = o.elevation_mask_deg * std::numbers::pi / 180.0;
  const double dt = c.cadence_s();
  std::size_t rotor = 0;
  std::size_t measured = 0;

  try {
    for (int k = 1; k <= c.epochs; ++k) {
      const double t0 = static_cast<double>(k - 1) * dt;
      const double t1 = static_cast<double>(k) * dt;
      double t = t0;
      for (const auto& e : o.stress) {
        if (e.kind != orbit::StressKind::maneuver) continue;
        const double te = e.epoch_days * orbit::kSecondsPerDay;
        if (te > t0 && te <= t1) {
          if (te > t) truth = orbit::propagate(truth, te - t, force, o.process_accel, &truth_rng);
          truth = orbit::apply_stress(truth, o.stress, t0, t1);
          t = te;
        }
      }
      if (t1 > t) truth = orbit::propagate(truth, t1 - t, force, o.process_accel, &truth_rng);

      std::optional<orbit::Measurement> meas;
      for (std::size_t probe = 0; probe < truth_stations.size() && !meas; ++probe) {
        const std::size_t idx = (rotor + probe) % truth_stations.size();
        if (orbit::elevation(truth, truth_stations[idx], t1) < mask) continue;
        meas = orbit::measure(truth, truth_stations[idx], idx, t1, mask, o.noise, &meas_rng);
        rotor = idx + 1;
      }

      Observation obs;
      if (meas) {
        const orbit::Station station = o.stations[meas->station];
        obs.y = meas->value;
        obs.sensor_shape = sensor;
        obs.station = meas->station;
        obs.predict = [&, station, t1](const Points& z) {
          Points h(z.rows(), 2);
          for (Eigen::Index i = 0; i < z.rows(); ++i) {
            const auto x = orbit::OrbitState::from_vector(frame.to_state(z.row(i).transpose()));
            h.row(i) = orbit::predict_measurement(x, station, t1).transpose();
          }
          return h;
        };
      }
      const bool claims = meas && wants_claims(c, mode, measured);
      StepOutput s = filter.step(state, t1, propagate, meas ? &obs : nullptr, out.reference_h, claims,
                                 claims_seed(c.seeds.comparator, static_cast<std::size_t>(k)));
      const std::size_t a = anchor(s.posterior);
      const Vector ax = frame.to_state(s.posterior.points().row(static_cast<Eigen::Index>(a)).transpose());
      s.record.anchor_error = (ax.head<3>() - truth.r).norm();
      out.records.push_back(s.record);
      push_claim(out, s);
      state = std::move(s.state);
      if (meas) ++measured;
      if (mode == RunMode::claims && measured >= static_cast<std::size_t>(c.claims_steps)) break;
    }
  } catch (const FilterFailure& e) {
    out.failure = e.what();
  } catch (const SubsurfaceTrajectory& e) {
    out.failure = e.what();
  }
  return out;
}

RunOutput run_linear(const ScenarioConfig& c, RunMode mode) {
  const LinearScenario& l = c.linear;
  const double scale = std::sqrt(l.p0);
  const FilterOptions options = filter_options(c, Vector::Constant(1, scale));
  Filter filter(options);
  std::mt19937_64 truth_rng(c.seeds.truth);
  std::mt19937_64 meas_rng(c.seeds.measurement);
  std::mt19937_64 init_rng(c.seeds.init);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double truth = l.x0 + scale * gauss(truth_rng);
  Vector center(1);
  center[0] = l.x0 / scale;
  FilterState state = filter.initial_state(center, c.init_grid_radius * Matrix::Identity(1, 1), 0.0);
  (void)init_rng;

  RunOutput out;
  out.name = c.name;
  out.m = state.cloud.size();
  out.n = 1;
  out.reference_h = initial_reference(state, options.profile);

  Vector kf_mean = Vector::Constant(1, l.x0);
  Matrix kf_cov = Matrix::Constant(1, 1, l.p0);
  const Matrix one = Matrix::Identity(1, 1);
  const Matrix q = Matrix::Constant(1, 1, l.q);
  const Matrix r = Matrix::Constant(1, 1, l.r);
  const Propagator identity = [](const Points& z, double, double) { return z; };
  const double dt = c.cadence_s();

  try {
    for (int k = 1; k <= c.epochs; ++k) {
      truth += std::sqrt(l.q) * gauss(truth_rng);
      const double y = truth + std::sqrt(l.r) * gauss(meas_rng);
      Observation obs;
      obs.y = Vector::Constant(1, y);
      obs.sensor_shape = r;
      obs.predict = [scale](const Points& z) { return Points(scale * z); };
      const double t1 = static_cast<double>(k) * dt;
      const bool claims = wants_claims(c, mode, static_cast<std::size_t>(k - 1));
      StepOutput s = filter.step(state, t1, identity, &obs, out.reference_h, claims,
                                 claims_seed(c.seeds.comparator, static_cast<std::size_t>(k)));
      const KalmanEstimate kf = kalman_oracle_step(kf_mean, kf_cov, one, one, q, r, obs.y);
      kf_mean = kf.mean;
      kf_cov = kf.cov;
      const double anchor_x = scale * s.posterior.points()(static_cast<Eigen::Index>(anchor(s.posterior)), 0);
      s.record.anchor_error = std::abs(anchor_x - truth);
      out.linear.push_back(LinearTrackRow{s.record.step, truth, y, anchor_x, kf_mean[0], std::sqrt(kf_cov(0, 0))});
      out.records.push_back(s.record);
      push_claim(out, s);
      state = std::move(s.state);
      if (mode == RunMode::claims && k >= c.claims_steps) break;
    }
  } catch (const FilterFailure& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace

RunOutput run_scenario(const ScenarioConfig& config, RunMode mode) {
  validate_config(config);
  return config.model == ScenarioModel::orbit ? run_orbit(config, mode) : run_linear(config, mode);
}

}  // namespace espf
