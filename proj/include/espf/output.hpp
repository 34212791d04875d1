#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "espf/scenario.hpp"

namespace espf {

/// Shortest round-trip is not stable across libraries, so every number is
/// written with 17 significant digits.
std::string format_number(double v);

void write_ewm_csv(std::ostream& os, const std::vector<EwmRecord>& records);
void write_claims_csv(std::ostream& os, const std::vector<ClaimRow>& rows);
void write_pcrb_violations_csv(std::ostream& os, const std::vector<EwmRecord>& records);
void write_linear_csv(std::ostream& os, const std::vector<LinearTrackRow>& rows);

nlohmann::ordered_json summarize(const RunOutput& run);

/// Minimal SVG line chart of one EWM column against step.
std::string svg_series(const std::vector<EwmRecord>& records, const std::string& column);

struct WrittenFiles {
  std::vector<std::filesystem::path> paths;
};

/// Writes ewm.csv, pcrb_violations.csv, summary.json and, when present,
/// claims.csv and linear_track.csv. Plots go under plots/ when requested.
WrittenFiles write_run(const RunOutput& run, const std::filesystem::path& dir, bool plots);

}  // namespace espf
