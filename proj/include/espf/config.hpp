#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "espf/filter.hpp"
#include "espf/orbit.hpp"

namespace espf {

/// Flat key = value document. Keys are dotted lower-case identifiers, '#'
/// starts a comment, blank lines are ignored, and a key may appear once.
class KeyValueDocument {
public:
  static KeyValueDocument parse(const std::string& text, const std::string& origin = "<config>");
  static KeyValueDocument load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  long long get_int(const std::string& key, long long fallback);
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback);

  /// Throws ConfigError naming the first key no getter asked for.
  void reject_unused() const;

  void set(const std::string& key, const std::string& value);

private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  const Entry* find(const std::string& key) const;

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

enum class ScenarioModel { orbit, linear1d };

struct OrbitScenario {
  orbit::Elements elements{6378.137 + 700.0, 0.001, 25.0, 0.0, 0.0, 0.0};
  double cd = 2.2;
  orbit::ForceModel force;
  double process_accel = 5e-12;  // km/s^2 per RTN axis, truth only
  double elevation_mask_deg = 10.0;
  orbit::MeasurementNoise noise;
  double sensor_scale = 1.0;  // Pi_y = sensor_scale^2 diag(sigma_range^2, sigma_rate^2)
  double init_sigma_pos_km = 1.0;
  double init_sigma_vel_kms = 1e-3;
  double init_sigma_cd = 0.2;
  std::vector<orbit::Station> stations;
  std::vector<orbit::StressEvent> stress;
};

struct LinearScenario {
  double q = 0.5;   // process variance per step
  double r = 1.0;   // measurement variance
  double x0 = 0.0;
  double p0 = 1.0;  // initial variance
};

struct Seeds {
  std::uint64_t truth = 1;
  std::uint64_t measurement = 2;
  std::uint64_t comparator = 3;
  std::uint64_t init = 4;
  std::uint64_t rotation = 5;  // grid rotation at regeneration

  void override_all(std::uint64_t base);
};

struct ScenarioConfig {
  std::string name = "nominal";
  ScenarioModel model = ScenarioModel::orbit;
  double duration_days = 2.0;
  int epochs = 877;
  int claims_every = 10;  // 0 disables claims in run mode
  int claims_steps = 52;  // measured steps in claims mode
  double init_grid_radius = 3.0;  // initial cloud spans this many prior sigmas
  FilterOptions filter;
  OrbitScenario orbit;
  LinearScenario linear;
  Seeds seeds;
  std::filesystem::path output_dir = "out";
  bool plots = false;

  double cadence_s() const { return duration_days * orbit::kSecondsPerDay / static_cast<double>(epochs); }
};

/// Throws ConfigError with the offending key.
ScenarioConfig parse_config(KeyValueDocument doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Built-in scenario presets, identical to configs/nominal.cfg and
/// configs/stress.cfg.
ScenarioConfig nominal_config();
ScenarioConfig stress_config();
ScenarioConfig linear_config();

void validate_config(const ScenarioConfig& c);

std::vector<orbit::Station> default_stations();

}  // namespace espf
