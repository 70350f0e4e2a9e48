#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bacepipe/scenario.hpp"
#include "bacepipe/simulator.hpp"

namespace bacepipe {

// Fixed 9-significant-digit formatting used for every emitted float.
std::string format_g9(double v);
// Round-trips a value through the 9-digit representation.
double round_g9(double v);

std::uint64_t fnv1a64(std::string_view bytes);
std::string scenario_hash(const Scenario& resolved);

// Per-job records, header
// job_id,policy,submit,start,wait,exec,jct,cost,path,alloc
void write_records_csv(std::ostream& out, const std::vector<SimReport>& runs,
                       const std::vector<Scenario>& run_scenarios);

nlohmann::json run_to_json(const SimReport& run, const Scenario& resolved);

// Self-contained summary: resolved scenario, every run (records + timeline),
// objectives, peak link utilization, and ratios normalized to the BACE run
// when one is present.
nlohmann::json summary_to_json(const Scenario& base,
                               const std::vector<SimReport>& runs,
                               const std::vector<Scenario>& run_scenarios,
                               std::uint64_t seed);

// Writes records.csv and/or summary.json under out_dir.
// format: "csv", "summary", or "both".
void emit_report(const std::filesystem::path& out_dir, const Scenario& base,
                 const std::vector<SimReport>& runs,
                 const std::vector<Scenario>& run_scenarios, std::uint64_t seed,
                 const std::string& format);

}  // namespace bacepipe
