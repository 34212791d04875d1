#include "espf/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "espf/errors.hpp"

namespace espf {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  char prev = 0;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
    if (!ok || (c == '.' && prev == '.')) return false;
    prev = c;
  }
  return true;
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(const std::string& text, const std::string& origin) {
  KeyValueDocument doc;
  doc.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where, "malformed key '" + key + "'");
    if (value.empty()) throw ConfigError(key, "empty value at " + where);
    if (doc.entries_.count(key) != 0) throw ConfigError(key, "duplicate key at " + where);
    doc.entries_[key] = Entry{value, lineno, false};
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

const KeyValueDocument::Entry* KeyValueDocument::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

bool KeyValueDocument::has(const std::string& key) const { return entries_.count(key) != 0; }

void KeyValueDocument::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError(key, "malformed key");
  entries_[key] = Entry{value, 0, false};
}

std::string KeyValueDocument::get_string(const std::string& key, const std::string& fallback) {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double KeyValueDocument::get_double(const std::string& key, double fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  double v = 0.0;
  const char* first = e->value.data();
  const char* last = first + e->value.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key, "expected a number, got '" + e->value + "'");
  return v;
}

long long KeyValueDocument::get_int(const std::string& key, long long fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size())
    throw ConfigError(key, "expected an integer, got '" + e->value + "'");
  return v;
}

std::uint64_t KeyValueDocument::get_seed(const std::string& key, std::uint64_t fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size())
    throw ConfigError(key, "expected a non-negative integer seed, got '" + e->value + "'");
  return v;
}

bool KeyValueDocument::get_bool(const std::string& key, bool fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true") return true;
  if (e->value == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + e->value + "'");
}

std::vector<std::string> KeyValueDocument::get_list(const std::string& key, const std::vector<std::string>& fallback) {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::vector<std::string> out;
  std::istringstream in(e->value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key, "empty list item");
    out.push_back(item);
  }
  return out;
}

void KeyValueDocument::reject_unused() const {
  for (const auto& [key, e] : entries_)
    if (!e.used) throw ConfigError(key, "unknown key at " + origin_ + ":" + std::to_string(e.line));
}

void Seeds::override_all(std::uint64_t base) {
  truth = base;
  measurement = base + 1;
  comparator = base + 2;
  init = base + 3;
  rotation = base + 4;
}

std::vector<orbit::Station> default_stations() {
  return {
      {"arecibo", 18.3464, -66.7528, 0.497, 0.0, 0.0},
      {"kwajalein", 9.3953, 167.4745, 0.0, 0.0, 0.0},
      {"diego_garcia", -7.2667, 72.3667, 0.0, 0.0, 0.0},
  };
}

ScenarioConfig nominal_config() {
  ScenarioConfig c;
  c.name = "nominal";
  c.filter.grid = GridSpec{7, 3};
  c.orbit.stations = default_stations();
  return c;
}

ScenarioConfig stress_config() {
  ScenarioConfig c = nominal_config();
  c.name = "stress";
  c.orbit.stress = {
      {orbit::StressKind::range_bias, 0.0, 0.020, "arecibo"},
      {orbit::StressKind::maneuver, 1.0, 0.010, ""},
  };
  return c;
}

ScenarioConfig linear_config() {
  ScenarioConfig c;
  c.name = "linear1d";
  c.model = ScenarioModel::linear1d;
  c.epochs = 200;
  c.duration_days = 200.0 / orbit::kSecondsPerDay;
  c.claims_every = 0;
  c.filter.grid = GridSpec{1, 6};
  return c;
}

ScenarioConfig parse_config(KeyValueDocument doc) {
  const std::string model = doc.get_string("scenario.model", "orbit");
  ScenarioConfig c;
  if (model == "orbit") {
    c = nominal_config();
  } else if (model == "linear1d") {
    c = linear_config();
  } else {
    throw ConfigError("scenario.model", "expected orbit or linear1d, got '" + model + "'");
  }

  c.name = doc.get_string("scenario.name", c.name);
  c.duration_days = doc.get_double("scenario.duration_days", c.duration_days);
  c.epochs = static_cast<int>(doc.get_int("scenario.epochs", c.epochs));
  c.claims_every = static_cast<int>(doc.get_int("scenario.claims_every", c.claims_every));
  c.claims_steps = static_cast<int>(doc.get_int("scenario.claims_steps", c.claims_steps));
  c.init_grid_radius = doc.get_double("scenario.init_grid_radius", c.init_grid_radius);

  FilterOptions& f = c.filter;
  f.grid.level = static_cast<int>(doc.get_int("filter.grid_level", f.grid.level));
  f.sigma0 = doc.get_double("filter.sigma0", f.sigma0);
  f.sigma_law.rho_c = doc.get_double("filter.sigma_rho_c", f.sigma_law.rho_c);
  f.sigma_law.rho_d = doc.get_double("filter.sigma_rho_d", f.sigma_law.rho_d);
  f.sigma_law.s_cap = doc.get_double("filter.sigma_cap", f.sigma_law.s_cap);
  f.sigma_law.sigma_min = doc.get_double("filter.sigma_min", f.sigma_law.sigma_min);
  f.sigma_law.sigma_max = doc.get_double("filter.sigma_max", f.sigma_law.sigma_max);
  f.kernel_scale = doc.get_double("filter.kernel_scale", f.kernel_scale);
  f.rotate_grid = doc.get_bool("filter.rotate_grid", f.rotate_grid);
  f.vfi.eps_min = doc.get_double("filter.vfi_eps_min", f.vfi.eps_min);
  f.vfi.lambda_max = doc.get_double("filter.vfi_lambda_max", f.vfi.lambda_max);
  f.pcrb_slack = doc.get_double("filter.pcrb_slack", f.pcrb_slack);
  f.comparator_draws = static_cast<int>(doc.get_int("filter.comparator_draws", f.comparator_draws));
  f.recovery_q = doc.get_double("filter.recovery_q", f.recovery_q);
  f.debug_asserts = doc.get_bool("filter.debug_asserts", f.debug_asserts);

  const std::string rule = doc.get_string("entropy.rule", "breakpoints");
  if (rule == "breakpoints") {
    f.profile.rule = ProfileRule::breakpoints;
  } else if (rule == "uniform") {
    f.profile.rule = ProfileRule::uniform;
  } else {
    throw ConfigError("entropy.rule", "expected breakpoints or uniform, got '" + rule + "'");
  }
  f.profile.n_levels = static_cast<int>(doc.get_int("entropy.levels", f.profile.n_levels));
  f.profile.degenerate_floor = doc.get_double("entropy.degenerate_floor", f.profile.degenerate_floor);
  f.profile.mvee_tolerance = doc.get_double("entropy.mvee_tolerance", f.profile.mvee_tolerance);

  if (c.model == ScenarioModel::orbit) {
    OrbitScenario& o = c.orbit;
    o.elements.a_km = doc.get_double("orbit.a_km", o.elements.a_km);
    o.elements.ecc = doc.get_double("orbit.ecc", o.elements.ecc);
    o.elements.inc_deg = doc.get_double("orbit.inc_deg", o.elements.inc_deg);
    o.elements.raan_deg = doc.get_double("orbit.raan_deg", o.elements.raan_deg);
    o.elements.argp_deg = doc.get_double("orbit.argp_deg", o.elements.argp_deg);
    o.elements.mean_anomaly_deg = doc.get_double("orbit.mean_anomaly_deg", o.elements.mean_anomaly_deg);
    o.cd = doc.get_double("orbit.cd", o.cd);
    o.force.j2 = doc.get_bool("orbit.j2", o.force.j2);
    o.force.step_s = doc.get_double("orbit.step_s", o.force.step_s);
    o.process_accel = doc.get_double("orbit.process_accel", o.process_accel);
    o.elevation_mask_deg = doc.get_double("orbit.elevation_mask_deg", o.elevation_mask_deg);
    o.noise.sigma_range_km = doc.get_double("orbit.sigma_range_km", o.noise.sigma_range_km);
    o.noise.sigma_rate_kms = doc.get_double("orbit.sigma_rate_kms", o.noise.sigma_rate_kms);
    o.sensor_scale = doc.get_double("orbit.sensor_scale", o.sensor_scale);
    o.init_sigma_pos_km = doc.get_double("orbit.init_sigma_pos_km", o.init_sigma_pos_km);
    o.init_sigma_vel_kms = doc.get_double("orbit.init_sigma_vel_kms", o.init_sigma_vel_kms);
    o.init_sigma_cd = doc.get_double("orbit.init_sigma_cd", o.init_sigma_cd);

    std::vector<std::string> names;
    for (const auto& s : o.stations) names.push_back(s.name);
    names = doc.get_list("orbit.stations", names);
    const auto defaults = default_stations();
    std::vector<orbit::Station> stations;
    for (const auto& name : names) {
      orbit::Station s{name, 0.0, 0.0, 0.0, 0.0, 0.0};
      for (const auto& d : defaults)
        if (d.name == name) s = d;
      const std::string prefix = "station." + name + ".";
      s.lat_deg = doc.get_double(prefix + "lat_deg", s.lat_deg);
      s.lon_deg = doc.get_double(prefix + "lon_deg", s.lon_deg);
      s.alt_km = doc.get_double(prefix + "alt_km", s.alt_km);
      if (s.lat_deg < -90.0 || s.lat_deg > 90.0) throw ConfigError(prefix + "lat_deg", "latitude outside [-90, 90]");
      stations.push_back(s);
    }
    o.stations = stations;

    const bool stressed = doc.get_bool("stress.enabled", false);
    orbit::StressEvent maneuver{orbit::StressKind::maneuver, doc.get_double("stress.maneuver.epoch_days", 1.0),
                                doc.get_double("stress.maneuver.delta_v_kms", 0.010), ""};
    orbit::StressEvent bias{orbit::StressKind::range_bias, doc.get_double("stress.range_bias.epoch_days", 0.0),
                            doc.get_double("stress.range_bias.km", 0.020),
                            doc.get_string("stress.range_bias.station", "arecibo")};
    if (maneuver.magnitude < 0.0) throw ConfigError("stress.maneuver.delta_v_kms", "must be non-negative");
    o.stress.clear();
    if (stressed) {
      if (bias.magnitude != 0.0) o.stress.push_back(bias);
      if (maneuver.magnitude > 0.0) o.stress.push_back(maneuver);
    }
  } else {
    LinearScenario& l = c.linear;
    l.q = doc.get_double("linear.q", l.q);
    l.r = doc.get_double("linear.r", l.r);
    l.x0 = doc.get_double("linear.x0", l.x0);
    l.p0 = doc.get_double("linear.p0", l.p0);
  }

  c.seeds.truth = doc.get_seed("seed.truth", c.seeds.truth);
  c.seeds.measurement = doc.get_seed("seed.measurement", c.seeds.measurement);
  c.seeds.comparator = doc.get_seed("seed.comparator", c.seeds.comparator);
  c.seeds.init = doc.get_seed("seed.init", c.seeds.init);
  c.seeds.rotation = doc.get_seed("seed.rotation", c.seeds.rotation);
  c.output_dir = doc.get_string("output.dir", c.output_dir.string());
  c.plots = doc.get_bool("output.plots", c.plots);

  doc.reject_unused();
  validate_config(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(KeyValueDocument::load(path)); }

void validate_config(const ScenarioConfig& c) {
  if (!(c.duration_days > 0.0)) throw ConfigError("scenario.duration_days", "must be positive");
  if (c.epochs < 1) throw ConfigError("scenario.epochs", "must be at least 1");
  if (c.claims_every < 0) throw ConfigError("scenario.claims_every", "must be non-negative");
  if (c.claims_steps < 1) throw ConfigError("scenario.claims_steps", "must be at least 1");
  if (!(c.init_grid_radius > 0.0)) throw ConfigError("scenario.init_grid_radius", "must be positive");
  const FilterOptions& f = c.filter;
  if (f.grid.level < 1 || f.grid.level > kMaxGridLevel)
    throw ConfigError("filter.grid_level", "must lie in 1.." + std::to_string(kMaxGridLevel));
  if (!(f.sigma0 > 0.0)) throw ConfigError("filter.sigma0", "must be positive");
  if (!(f.sigma_law.sigma_min > 0.0)) throw ConfigError("filter.sigma_min", "must be positive");
  if (f.sigma_law.sigma_max < f.sigma_law.sigma_min) throw ConfigError("filter.sigma_max", "must be >= sigma_min");
  if (!(f.sigma_law.rho_c > 0.0)) throw ConfigError("filter.sigma_rho_c", "must be positive");
  if (f.sigma_law.rho_d < 0.0) throw ConfigError("filter.sigma_rho_d", "must be non-negative");
  if (!(f.kernel_scale > 0.0)) throw ConfigError("filter.kernel_scale", "must be positive");
  if (!(f.vfi.eps_min > 0.0)) throw ConfigError("filter.vfi_eps_min", "must be positive");
  if (!(f.vfi.lambda_max > f.vfi.eps_min)) throw ConfigError("filter.vfi_lambda_max", "must exceed vfi_eps_min");
  if (f.pcrb_slack < 0.0) throw ConfigError("filter.pcrb_slack", "must be non-negative");
  if (f.comparator_draws < 1) throw ConfigError("filter.comparator_draws", "must be at least 1");
  if (!(f.recovery_q > 0.0)) throw ConfigError("filter.recovery_q", "must be positive");
  if (f.profile.rule == ProfileRule::uniform && f.profile.n_levels < 8)
    throw ConfigError("entropy.levels", "must be at least 8");
  if (!(f.profile.mvee_tolerance > 0.0)) throw ConfigError("entropy.mvee_tolerance", "must be positive");

  if (c.model == ScenarioModel::orbit) {
    const OrbitScenario& o = c.orbit;
    if (f.grid.dim != 7) throw ConfigError("filter.grid_level", "orbit model requires a 7-dimensional grid");
    if (!(o.elements.a_km * (1.0 - o.elements.ecc) > orbit::kEarthRadius))
      throw ConfigError("orbit.a_km", "perigee lies below the Earth's surface");
    if (o.elements.ecc < 0.0 || o.elements.ecc >= 1.0) throw ConfigError("orbit.ecc", "must lie in [0, 1)");
    if (!(o.force.step_s > 0.0)) throw ConfigError("orbit.step_s", "must be positive");
    if (o.process_accel < 0.0) throw ConfigError("orbit.process_accel", "must be non-negative");
    if (!(o.noise.sigma_range_km > 0.0)) throw ConfigError("orbit.sigma_range_km", "must be positive");
    if (!(o.noise.sigma_rate_kms > 0.0)) throw ConfigError("orbit.sigma_rate_kms", "must be positive");
    if (!(o.sensor_scale > 0.0)) throw ConfigError("orbit.sensor_scale", "must be positive");
    if (!(o.init_sigma_pos_km > 0.0)) throw ConfigError("orbit.init_sigma_pos_km", "must be positive");
    if (!(o.init_sigma_vel_kms > 0.0)) throw ConfigError("orbit.init_sigma_vel_kms", "must be positive");
    if (!(o.init_sigma_cd > 0.0)) throw ConfigError("orbit.init_sigma_cd", "must be positive");
    if (o.stations.empty()) throw ConfigError("orbit.stations", "at least one station is required");
    for (const auto& e : o.stress) {
      if (e.kind != orbit::StressKind::range_bias) continue;
      bool found = false;
      for (const auto& s : o.stations) found = found || s.name == e.station;
      if (!found) throw ConfigError("stress.range_bias.station", "unknown station '" + e.station + "'");
    }
  } else {
    if (f.grid.dim != 1) throw ConfigError("scenario.model", "linear1d requires a 1-dimensional grid");
    if (!(c.linear.q > 0.0)) throw ConfigError("linear.q", "must be positive");
    if (!(c.linear.r > 0.0)) throw ConfigError("linear.r", "must be positive");
    if (!(c.linear.p0 > 0.0)) throw ConfigError("linear.p0", "must be positive");
  }
}

}  // namespace espf
