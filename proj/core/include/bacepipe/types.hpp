#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bacepipe {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleScenario : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One cloud region. gpu_free tracks the un-reserved remainder of gpu_capacity.
struct RegionState {
  std::string id;
  std::string name;
  int gpu_capacity = 0;
  int gpu_free = 0;
  double elec_price = 0.0;       // $ per kWh
  double node_bandwidth = 0.0;   // bits/s, feeds derived inter-region links
  double intra_bandwidth = 0.0;  // bits/s, stage-to-stage inside the region
};

// Directed inter-region link. (u,v) and (v,u) are distinct entries.
struct LinkState {
  std::size_t src = 0;
  std::size_t dst = 0;
  double capacity = 0.0;  // bits/s
  double reserved = 0.0;  // bits/s, sum of active reservations
};

struct ModelConfig {
  std::string name;
  double params = 0.0;  // parameter count, informational
  int layers = 0;
  int hidden = 0;
  int batch_size = 0;
  int seq_len = 2048;
  int bytes_per_elem = 2;
};

struct JobSpec {
  std::string id;
  ModelConfig model;
  int micro_batches = 0;        // micro-batches per iteration; 0 = derive at load
  std::int64_t iterations = 0;  // training iterations; 0 = derive at load
  double submit_time = 0.0;     // seconds
  std::int64_t dataset_samples = 0;
  std::string dataset;  // dataset tag when iterations were derived from one
};

// A placement decision: ordered region path hosting the pipeline, one stage
// per GPU, plus the bandwidth reserved on every crossed directed link.
struct PlacementPlan {
  std::string job_id;
  std::vector<std::size_t> path;  // region indices, no repeats
  std::vector<int> alloc;         // parallel to path, each >= 1
  double bandwidth_reserved = 0.0;

  int total_gpus() const {
    int g = 0;
    for (int a : alloc) g += a;
    return g;
  }
  std::vector<std::pair<std::size_t, std::size_t>> links() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      out.emplace_back(path[i], path[i + 1]);
    return out;
  }
};

struct ComputeProfile {
  double gpu_power = 300.0;  // watts per GPU, converts $/kWh to $/GPU-second
  double peak_flops = 155e12;
  double calibration = 2.5;
  std::map<std::string, double> per_layer_time;  // per-model pin, seconds
};

}  // namespace bacepipe
