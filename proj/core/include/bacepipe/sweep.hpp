#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bacepipe/scenario.hpp"
#include "bacepipe/simulator.hpp"

namespace bacepipe {

enum class SweepAxis { Bandwidth, Gpu, Jobs };

std::optional<SweepAxis> sweep_axis_from_name(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);
const std::vector<double>& default_sweep_values(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Bandwidth;
  std::vector<double> values;
  std::vector<std::string> policies;  // defaults to the five main policies
};

struct SweepCell {
  double value = 0.0;
  Scenario scenario;  // resolved cell scenario
  std::vector<SimReport> runs;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;  // ordered by (value, policy order as given)
};

SweepResult run_sweep(const Scenario& base, const SweepSpec& spec,
                      std::uint64_t seed);

// Summary with one normalized table per axis value (ratios to the BACE cell).
nlohmann::json sweep_summary_json(const Scenario& base, const SweepResult& r,
                                  std::uint64_t seed);

// Writes <axis>=<value>/records.csv per cell plus a top-level summary.json.
void emit_sweep(const std::filesystem::path& out_dir, const Scenario& base,
                const SweepResult& r, std::uint64_t seed,
                const std::string& format);

}  // namespace bacepipe
