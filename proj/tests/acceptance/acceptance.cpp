// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is zero only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "espf/config.hpp"
#include "espf/output.hpp"
#include "espf/scenario.hpp"
#include "espf/validation.hpp"

namespace fs = std::filesystem;
using namespace espf;

namespace {

// Tolerances and budgets.
constexpr int kMveeClouds = 1000;
constexpr double kMveeBudgetS = 60.0;
constexpr int kSelectionInstances = 500;
constexpr double kSelectionBudgetS = 300.0;
constexpr int kPcrbSteps = 200;
constexpr double kPcrbSlack = 0.05;
constexpr int kHolderClouds = 200;
constexpr double kHolderTol = 1e-9;
constexpr int kEntropyPairs = 200;
constexpr double kTrackingSigmas = 3.0;
constexpr double kPruneRatio = 2.0;
constexpr double kEarlyWarningFactor = 5.0;
constexpr std::uint64_t kSuiteSeed = 2024;

struct Line {
  int criterion;
  bool pass;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Scenario {
  std::string label;
  ScenarioConfig config;
  RunMode mode;
  RunOutput output;
  bool deterministic = true;
  std::string determinism_detail;
};

// Runs the scenario twice into separate directories and compares every CSV.
void run_twice(Scenario& s, const fs::path& work) {
  std::vector<fs::path> dirs{work / (s.label + "_a"), work / (s.label + "_b")};
  for (std::size_t k = 0; k < 2; ++k) {
    fs::remove_all(dirs[k]);
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out = run_scenario(s.config, s.mode);
    write_run(out, dirs[k], false);
    std::cerr << s.label << " run " << k + 1 << ": " << out.records.size() << " steps in " << num(seconds_since(t0))
              << " s" << (out.failure ? " (failure: " + *out.failure + ")" : "") << '\n';
    if (k == 0) s.output = std::move(out);
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const fs::path other = dirs[1] / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      s.deterministic = false;
      s.determinism_detail += " " + entry.path().filename().string() + " differs";
    }
  }
  s.determinism_detail = s.label + ": " + std::to_string(files) + " csv" + s.determinism_detail;
}

std::vector<const EwmRecord*> measured(const RunOutput& run) {
  std::vector<const EwmRecord*> out;
  for (const auto& r : run.records)
    if (r.measured) out.push_back(&r);
  return out;
}

double maneuver_day(const ScenarioConfig& c) {
  for (const auto& e : c.orbit.stress)
    if (e.kind == orbit::StressKind::maneuver) return e.epoch_days;
  return std::numeric_limits<double>::infinity();
}

Line criterion_holder(const std::vector<const Scenario*>& runs) {
  const CheckResult synthetic = check_holder_ordering(kHolderClouds, kSuiteSeed + 3);
  std::size_t steps = 0, order_fail = 0, strict_fail = 0;
  for (const Scenario* s : runs) {
    for (const auto& r : s->output.records) {
      ++steps;
      if (r.holder_min > r.h_pi + kHolderTol || r.h_pi > r.holder_max + kHolderTol) ++order_fail;
      // A non-constant profile has holder_max > holder_min; both inequalities
      // must then be strict.
      if (r.holder_max - r.holder_min > kHolderTol && !(r.holder_min < r.h_pi && r.h_pi < r.holder_max))
        ++strict_fail;
    }
  }
  const bool pass = synthetic.passed && order_fail == 0 && strict_fail == 0;
  return {4, pass,
          "holder_ordering: run steps " + std::to_string(steps) + ", order_fail " + std::to_string(order_fail) +
              ", strict_fail " + std::to_string(strict_fail) + "; synthetic " + synthetic.detail};
}

Line criterion_behavior(const RunOutput& nominal, const RunOutput& stress, const ScenarioConfig& stress_cfg,
                        const RunOutput& claims) {
  const double onset = maneuver_day(stress_cfg);
  std::vector<double> nominal_prune, nominal_nec, nominal_sur, stress_prune;
  for (const EwmRecord* r : measured(nominal)) {
    nominal_prune.push_back(static_cast<double>(r->prune_count));
    nominal_nec.push_back(r->necessity);
    nominal_sur.push_back(r->surprisal);
  }
  for (const EwmRecord* r : measured(stress))
    if (r->t_days >= onset) stress_prune.push_back(static_cast<double>(r->prune_count));

  // (a) prune escalation after the maneuver.
  const double nom_med = median(nominal_prune);
  const double str_med = median(stress_prune);
  const bool a = !stress_prune.empty() && str_med >= kPruneRatio * nom_med;

  // (b) early warning: first post-onset step where necessity and surprisal
  // exceed 5x their nominal 95th percentile, against the first post-onset
  // contraction -> diffusion flip.
  const double nec_thr = kEarlyWarningFactor * percentile(nominal_nec, 0.95);
  const double sur_thr = kEarlyWarningFactor * percentile(nominal_sur, 0.95);
  std::optional<std::size_t> nec_step, sur_step, flip_step;
  std::optional<Regime> prev;
  for (const auto& r : stress.records) {
    if (r.t_days >= onset) {
      if (r.measured && !nec_step && r.necessity > nec_thr) nec_step = r.step;
      if (r.measured && !sur_step && r.surprisal > sur_thr) sur_step = r.step;
      if (!flip_step && prev == Regime::contraction && r.regime == Regime::diffusion) flip_step = r.step;
    }
    prev = r.regime;
  }
  auto before_flip = [&](const std::optional<std::size_t>& s) { return s && (!flip_step || *s < *flip_step); };
  const bool b = before_flip(nec_step) && before_flip(sur_step);
  auto show = [](const std::optional<std::size_t>& s) { return s ? std::to_string(*s) : std::string("none"); };

  // (c), (d) Claim B against random comparators, split by regime.
  std::size_t con = 0, con_pass = 0, fail_con = 0, fail_dif = 0;
  for (const auto& row : claims.claims) {
    const bool ok = row.report.claim_b_random.pass;
    if (row.regime == Regime::contraction) {
      ++con;
      if (ok) ++con_pass;
      else ++fail_con;
    } else if (!ok) {
      ++fail_dif;
    }
  }
  const bool c = con > 0 && con_pass == con;
  const bool d = fail_con == 0;

  std::ostringstream os;
  os << "behavior: (a) " << (a ? "pass" : "fail") << " stress post-onset prune median " << num(str_med)
     << " vs nominal " << num(nom_med) << " x" << kPruneRatio << "; (b) " << (b ? "pass" : "fail")
     << " thresholds necessity " << num(nec_thr) << " surprisal " << num(sur_thr) << ", first crossings "
     << show(nec_step) << "/" << show(sur_step) << ", flip " << show(flip_step) << "; (c) " << (c ? "pass" : "fail")
     << " claim B vs random in contraction " << con_pass << "/" << con << "; (d) " << (d ? "pass" : "fail")
     << " claim B random failures contraction " << fail_con << " diffusion " << fail_dif;
  return {7, a && b && c && d, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string work = "acceptance_runs";
  app.add_option("--work", work, "Scratch directory for scenario outputs");
  CLI11_PARSE(app, argc, argv);
  const fs::path work_dir(work);
  fs::create_directories(work_dir);
  const fs::path configs = ESPF_CONFIG_DIR;

  std::vector<Line> lines;
  auto t0 = std::chrono::steady_clock::now();
  const CheckResult mvee = check_mvee_certification(kMveeClouds, kSuiteSeed);
  const double mvee_s = seconds_since(t0);
  lines.push_back({1, mvee.passed && mvee_s < kMveeBudgetS, mvee.name + ": " + mvee.detail + " time_s=" + num(mvee_s)});

  t0 = std::chrono::steady_clock::now();
  const CheckResult sel = check_selection_optimality(kSelectionInstances, kSuiteSeed + 1);
  const double sel_s = seconds_since(t0);
  lines.push_back({2, sel.passed && sel_s < kSelectionBudgetS, sel.name + ": " + sel.detail + " time_s=" + num(sel_s)});

  Scenario nominal{"nominal", load_config(configs / "nominal.cfg"), RunMode::run, {}, true, {}};
  Scenario stress{"stress", load_config(configs / "stress.cfg"), RunMode::run, {}, true, {}};
  Scenario linear{"linear1d", load_config(configs / "linear1d.cfg"), RunMode::run, {}, true, {}};
  Scenario claims{"stress_claims", load_config(configs / "stress.cfg"), RunMode::claims, {}, true, {}};
  for (Scenario* s : {&nominal, &stress, &linear, &claims}) run_twice(*s, work_dir);

  const CheckResult pcrb = check_pcrb_synthetic(kPcrbSteps, kSuiteSeed + 2, kPcrbSlack);
  std::size_t nominal_violations = 0;
  for (const auto& r : nominal.output.records)
    if (!r.pcrb_satisfied) ++nominal_violations;
  const bool nominal_ok = !nominal.output.failure && nominal_violations == 0;
  lines.push_back({3, pcrb.passed && nominal_ok,
                   "pcrb: nominal violations " + std::to_string(nominal_violations) + " over " +
                       std::to_string(nominal.output.records.size()) + " steps" +
                       (nominal.output.failure ? " (run failed)" : "") + "; synthetic " + pcrb.detail});

  lines.push_back(criterion_holder({&nominal, &stress, &linear, &claims}));

  const CheckResult quad = check_gaussian_quadrature();
  const CheckResult dense = check_dense_gaussian();
  double worst = 0.0;
  for (const auto& r : linear.output.linear) worst = std::max(worst, std::abs(r.anchor - r.kf_mean) / r.kf_sd);
  const bool tracking = !linear.output.failure &&
                        linear.output.linear.size() == static_cast<std::size_t>(linear.config.epochs) &&
                        worst <= kTrackingSigmas;
  lines.push_back({5, quad.passed && dense.passed && tracking,
                   "gaussian_limit: (a) " + quad.detail + "; (b) " + dense.detail + "; (c) max " + num(worst) +
                       " kalman sigmas over " + std::to_string(linear.output.linear.size()) + " steps"});

  const CheckResult ent = check_entropy_properties(kEntropyPairs, kSuiteSeed + 4);
  lines.push_back({6, ent.passed, ent.name + ": " + ent.detail});

  lines.push_back(criterion_behavior(nominal.output, stress.output, stress.config, claims.output));

  bool det = true;
  std::string det_detail;
  for (const Scenario* s : {&nominal, &stress, &linear, &claims}) {
    det = det && s->deterministic;
    det_detail += (det_detail.empty() ? "" : "; ") + s->determinism_detail;
  }
  lines.push_back({8, det, "determinism: " + det_detail});

  bool all = true;
  for (const auto& l : lines) {
    std::cout << "criterion " << l.criterion << ' ' << (l.pass ? "PASS" : "FAIL") << "  " << l.detail << '\n';
    all = all && l.pass;
  }
  return all ? 0 : 1;
}
