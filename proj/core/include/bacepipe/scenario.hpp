#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bacepipe/topology.hpp"
#include "bacepipe/types.hpp"

namespace bacepipe {

struct ScenarioRegion {
  std::string id;
  std::string name;
  int gpu_capacity = 0;
  double elec_price = 0.0;        // $/kWh
  double node_bandwidth = 0.0;    // bits/s
  double intra_bandwidth = 100e9; // bits/s
};

// Directed link capacity override; the loader emits one per direction when
// a scenario file uses the bidirectional shorthand.
struct LinkOverride {
  std::string src;
  std::string dst;
  double capacity = 0.0;  // bits/s
};

struct Scenario {
  std::string name = "custom";
  std::vector<ScenarioRegion> regions;
  bool full_mesh = true;  // derive all directed links from node bandwidths
  std::vector<LinkOverride> link_overrides;
  std::vector<JobSpec> jobs;
  ComputeProfile profile;
  double bw_scale = 1.0;
  double gpu_scale = 1.0;
  int job_count = 0;  // 0 = run jobs as listed, else expand/cycle to this count
  bool strict_blocking = false;
};

const std::map<std::string, std::int64_t>& dataset_samples_table();

// Built-in scenarios.
Scenario default_scenario();
Scenario motivation_scenario();

// Accepts a built-in name ("default", "motivation") or a JSON file path.
Scenario load_scenario(const std::string& name_or_path);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

// Cycle the base job templates up to target_count. The first base jobs pass
// through unchanged; extra jobs get fresh ids and a seed-deterministic
// dataset draw.
std::vector<JobSpec> expand_jobs(const std::vector<JobSpec>& base,
                                 int target_count, std::uint64_t seed);

// Applies job_count expansion; the result always has job_count == 0.
Scenario resolve(const Scenario& s, std::uint64_t seed);

// Builds the runtime cluster: gpu_scale on capacities (floor, min 1),
// links derived from node bandwidths unless overridden, bw_scale on every
// inter-region link capacity.
ClusterState build_cluster(const Scenario& s);

void validate(const Scenario& s);

}  // namespace bacepipe
