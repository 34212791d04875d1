#include "espf/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "espf/errors.hpp"

namespace espf {
namespace {

const char* kEwmHeader =
    "step,t_days,measured,station,log_det_mvee,regime,h_pre,h_pi,holder_min,holder_max,w_ep,m,n_target,"
    "prune_count,sigma,necessity,surprisal,info,alpha_c,pcrb_floor,pcrb_satisfied,recovered,anchor_error";

void write_record(std::ostream& os, const EwmRecord& r) {
  os << r.step << ',' << format_number(r.t_days) << ',' << (r.measured ? 1 : 0) << ',' << r.station << ','
     << format_number(r.log_det_mvee) << ',' << regime_name(r.regime) << ',' << format_number(r.h_pre) << ','
     << format_number(r.h_pi) << ',' << format_number(r.holder_min) << ',' << format_number(r.holder_max) << ','
     << format_number(r.w_ep) << ',' << r.m << ',' << r.n_target << ',' << r.prune_count << ','
     << format_number(r.sigma) << ',' << format_number(r.necessity) << ',' << format_number(r.surprisal) << ','
     << format_number(r.info) << ',' << format_number(r.alpha_c) << ',' << format_number(r.pcrb_floor) << ','
     << (r.pcrb_satisfied ? 1 : 0) << ',' << (r.recovered ? 1 : 0) << ',' << format_number(r.anchor_error) << '\n';
}

const char* pass_fail(const ClaimOutcome& c) { return c.pass ? "pass" : "fail"; }

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double column(const EwmRecord& r, const std::string& name) {
  static const std::map<std::string, std::function<double(const EwmRecord&)>> getters = {
      {"log_det_mvee", [](const EwmRecord& r) { return r.log_det_mvee; }},
      {"h_pi", [](const EwmRecord& r) { return r.h_pi; }},
      {"h_pre", [](const EwmRecord& r) { return r.h_pre; }},
      {"sigma", [](const EwmRecord& r) { return r.sigma; }},
      {"necessity", [](const EwmRecord& r) { return r.necessity; }},
      {"surprisal", [](const EwmRecord& r) { return r.surprisal; }},
      {"w_ep", [](const EwmRecord& r) { return r.w_ep; }},
      {"prune_count", [](const EwmRecord& r) { return static_cast<double>(r.prune_count); }},
      {"anchor_error", [](const EwmRecord& r) { return r.anchor_error; }},
  };
  const auto it = getters.find(name);
  if (it == getters.end()) throw Error("no plottable column named " + name);
  return it->second(r);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_ewm_csv(std::ostream& os, const std::vector<EwmRecord>& records) {
  os << kEwmHeader << '\n';
  for (const auto& r : records) write_record(os, r);
}

void write_pcrb_violations_csv(std::ostream& os, const std::vector<EwmRecord>& records) {
  os << kEwmHeader << '\n';
  for (const auto& r : records)
    if (!r.pcrb_satisfied) write_record(os, r);
}

void write_claims_csv(std::ostream& os, const std::vector<ClaimRow>& rows) {
  os << "step,t_days,sigma,log_det,n_target,regime,espf_log_det,random_log_det,swap_log_det,espf_h_pi,random_h_pi,"
        "swap_h_pi,claim_a_random,claim_a_random_gap,claim_a_swap,claim_a_swap_gap,claim_b_random,"
        "claim_b_random_gap,claim_b_swap,claim_b_swap_gap\n";
  for (const auto& c : rows) {
    const auto& r = c.report;
    const std::string swap_a = r.swap_available ? pass_fail(r.claim_a_swap) : "n/a";
    const std::string swap_b = r.swap_available ? pass_fail(r.claim_b_swap) : "n/a";
    os << c.step << ',' << format_number(c.t_days) << ',' << format_number(c.sigma) << ','
       << format_number(c.log_det) << ',' << c.n_target << ',' << regime_name(c.regime) << ','
       << format_number(r.espf_log_det) << ',' << format_number(r.random_log_det) << ','
       << format_number(r.swap_log_det) << ',' << format_number(r.espf_h_pi) << ',' << format_number(r.random_h_pi)
       << ',' << format_number(r.swap_h_pi) << ',' << pass_fail(r.claim_a_random) << ','
       << format_number(r.claim_a_random.gap) << ',' << swap_a << ',' << format_number(r.claim_a_swap.gap) << ','
       << pass_fail(r.claim_b_random) << ',' << format_number(r.claim_b_random.gap) << ',' << swap_b << ','
       << format_number(r.claim_b_swap.gap) << '\n';
  }
}

void write_linear_csv(std::ostream& os, const std::vector<LinearTrackRow>& rows) {
  os << "step,truth,y,anchor,kf_mean,kf_sd\n";
  for (const auto& r : rows)
    os << r.step << ',' << format_number(r.truth) << ',' << format_number(r.y) << ',' << format_number(r.anchor)
       << ',' << format_number(r.kf_mean) << ',' << format_number(r.kf_sd) << '\n';
}

nlohmann::ordered_json summarize(const RunOutput& run) {
  nlohmann::ordered_json j;
  j["scenario"] = run.name;
  j["support_size"] = run.m;
  j["dimension"] = run.n;
  j["reference_h_pi"] = run.reference_h;
  j["steps"] = run.records.size();
  j["status"] = run.failure ? "filter_failure" : "ok";
  if (run.failure) j["failure"] = *run.failure;

  std::size_t measured = 0, contraction = 0, violations = 0, recovered = 0;
  std::vector<double> prune, necessity, surprisal, err;
  for (const auto& r : run.records) {
    if (r.regime == Regime::contraction) ++contraction;
    if (!r.pcrb_satisfied) ++violations;
    if (r.recovered) ++recovered;
    if (!r.measured) continue;
    ++measured;
    prune.push_back(static_cast<double>(r.prune_count));
    necessity.push_back(r.necessity);
    surprisal.push_back(r.surprisal);
    err.push_back(r.anchor_error);
  }
  j["measured_steps"] = measured;
  j["regime_occupancy"] = {{"contraction", contraction}, {"diffusion", run.records.size() - contraction}};
  j["pcrb_violations"] = violations;
  j["conflict_recoveries"] = recovered;
  j["prune_count"] = {{"median", number_or_null(percentile(prune, 0.5))},
                      {"p95", number_or_null(percentile(prune, 0.95))}};
  j["necessity_p95"] = number_or_null(percentile(necessity, 0.95));
  j["surprisal_p95"] = number_or_null(percentile(surprisal, 0.95));
  j["anchor_error_median"] = number_or_null(percentile(err, 0.5));

  if (!run.claims.empty()) {
    struct Tally {
      std::size_t pass = 0, total = 0;
      double worst_gap = std::numeric_limits<double>::infinity();
      void add(const ClaimOutcome& c) {
        ++total;
        if (c.pass) ++pass;
        worst_gap = std::min(worst_gap, c.gap);
      }
      nlohmann::ordered_json json() const {
        return {{"pass", pass}, {"total", total},
                {"rate", total ? static_cast<double>(pass) / static_cast<double>(total) : 0.0},
                {"min_gap", number_or_null(worst_gap)}};
      }
    };
    Tally ar, as, br, bs, br_contraction, bs_contraction;
    for (const auto& c : run.claims) {
      ar.add(c.report.claim_a_random);
      br.add(c.report.claim_b_random);
      if (c.regime == Regime::contraction) br_contraction.add(c.report.claim_b_random);
      if (c.report.swap_available) {
        as.add(c.report.claim_a_swap);
        bs.add(c.report.claim_b_swap);
        if (c.regime == Regime::contraction) bs_contraction.add(c.report.claim_b_swap);
      }
    }
    j["claims"] = {{"evaluated_steps", run.claims.size()},
                   {"claim_a_random", ar.json()},
                   {"claim_a_swap", as.json()},
                   {"claim_b_random", br.json()},
                   {"claim_b_swap", bs.json()},
                   {"claim_b_random_contraction", br_contraction.json()},
                   {"claim_b_swap_contraction", bs_contraction.json()}};
  }

  if (!run.linear.empty()) {
    double worst = 0.0;
    for (const auto& r : run.linear) worst = std::max(worst, std::abs(r.anchor - r.kf_mean) / r.kf_sd);
    j["linear_anchor_max_kf_sigmas"] = worst;
  }

  j["metadata"] = {
      {"necessity", {{"surrogate", true}, {"definition", "1 - second largest possibility"}}},
      {"w_ep", {{"surrogate", true}, {"definition", "exp((h_pi - h_ref) / n)"}}},
      {"alpha_c", {{"surrogate", true}, {"definition", "least-squares slope of log V_alpha vs log(1/alpha)"}}},
      {"log_det_units", "normalized filter coordinates (state / initial prior sigma)"},
      {"entropy_units", "state units (km, km/s, Cd for the orbit scenario); degenerate cuts contribute the configured floor"},
  };
  return j;
}

std::string svg_series(const std::vector<EwmRecord>& records, const std::string& name) {
  constexpr double w = 640.0, h = 240.0, pad = 30.0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    const double v = column(r, name);
    if (std::isfinite(v)) pts.emplace_back(static_cast<double>(r.step), v);
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << pad << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">" << name << "</text>\n";
  if (!pts.empty()) {
    double x0 = pts.front().first, x1 = pts.back().first;
    double y0 = pts.front().second, y1 = y0;
    for (const auto& p : pts) {
      y0 = std::min(y0, p.second);
      y1 = std::max(y1, p.second);
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) y1 = y0 + 1.0;
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"";
    for (const auto& p : pts) {
      const double px = pad + (p.first - x0) / (x1 - x0) * (w - 2 * pad);
      const double py = h - pad - (p.second - y0) / (y1 - y0) * (h - 2 * pad);
      os << format_number(px) << ',' << format_number(py) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"2\" y=\"" << pad << "\" font-family=\"sans-serif\" font-size=\"9\">" << format_number(y1)
       << "</text>\n<text x=\"2\" y=\"" << h - pad << "\" font-family=\"sans-serif\" font-size=\"9\">"
       << format_number(y0) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

WrittenFiles write_run(const RunOutput& run, const std::filesystem::path& dir, bool plots) {
  namespace fs = std::filesystem;
  WrittenFiles out;
  fs::create_directories(dir);
  auto open = [&](const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    out.paths.push_back(p);
    return f;
  };
  {
    auto f = open(dir / "ewm.csv");
    write_ewm_csv(f, run.records);
  }
  {
    auto f = open(dir / "pcrb_violations.csv");
    write_pcrb_violations_csv(f, run.records);
  }
  if (!run.claims.empty()) {
    auto f = open(dir / "claims.csv");
    write_claims_csv(f, run.claims);
  }
  if (!run.linear.empty()) {
    auto f = open(dir / "linear_track.csv");
    write_linear_csv(f, run.linear);
  }
  {
    auto f = open(dir / "summary.json");
    f << summarize(run).dump(2) << '\n';
  }
  if (plots) {
    fs::create_directories(dir / "plots");
    for (const char* c : {"log_det_mvee", "h_pi", "sigma", "necessity", "surprisal", "prune_count"}) {
      auto f = open(dir / "plots" / (std::string(c) + ".svg"));
      f << svg_series(run.records, c);
    }
  }
  return out;
}

}  // namespace espf
