#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bacepipe/scenario.hpp"
#include "bacepipe/topology.hpp"
#include "bacepipe/types.hpp"

namespace bacepipe::testing {

inline JobSpec make_job(std::string id, int layers, int hidden, int batch,
                        int micro_batches, std::int64_t iterations,
                        double submit = 0.0) {
  JobSpec j;
  j.id = std::move(id);
  j.model.name = "synthetic-" + std::to_string(layers) + "x" + std::to_string(hidden);
  j.model.layers = layers;
  j.model.hidden = hidden;
  j.model.batch_size = batch;
  j.micro_batches = micro_batches;
  j.iterations = iterations;
  j.submit_time = submit;
  return j;
}

struct RegionSpec {
  std::string id;
  int cap;
  double price;
  double node_gbps = 50.0;
  double intra_gbps = 100.0;
};

inline Scenario make_scenario(const std::vector<RegionSpec>& regions,
                              std::vector<JobSpec> jobs,
                              bool full_mesh = true) {
  Scenario s;
  s.name = "test";
  for (const auto& r : regions)
    s.regions.push_back(
        {r.id, r.id, r.cap, r.price, r.node_gbps * 1e9, r.intra_gbps * 1e9});
  s.full_mesh = full_mesh;
  s.jobs = std::move(jobs);
  return s;
}

inline ClusterState make_cluster(const std::vector<RegionSpec>& regions,
                                 bool full_mesh = true) {
  return build_cluster(make_scenario(regions, {}, full_mesh));
}

// Fingerprint for whole-state equality checks.
inline std::string fingerprint(const ClusterState& c) {
  std::ostringstream out;
  for (const auto& r : c.regions())
    out << r.id << ":" << r.gpu_capacity << "/" << r.gpu_free << " ";
  for (const auto& [key, l] : c.links())
    out << key.first << ">" << key.second << "=" << l.capacity << "&"
        << l.reserved << " ";
  out << "active=" << c.active_plans().size();
  return out.str();
}

// Deterministic random scenario for fuzz runs: 2-8 regions, 2-24 jobs,
// random bandwidth/GPU scales, occasional staggered arrivals.
inline Scenario fuzz_scenario(std::mt19937_64& rng) {
  static const char* model_names[] = {
      "FLM-101B", "Solar-Open-100B", "Llama-3.1-70B",  "Falcon-40B",
      "Qwen2.5-32B", "Gemma-3-27B",  "Ministral-3-14B", "Qwen2.5-14B"};
  static const int model_layers[] = {80, 48, 80, 60, 64, 62, 40, 48};
  static const int model_hidden[] = {10240, 4096, 8192, 8192, 5120, 5376, 5120, 5120};
  static const int model_batch[] = {128, 128, 128, 256, 256, 256, 512, 512};
  static const char* datasets[] = {"alpaca-52k", "wikitext-103", "openwebtext"};

  Scenario s;
  s.name = "fuzz";
  int nregions = 2 + static_cast<int>(rng() % 7);
  for (int i = 0; i < nregions; ++i) {
    ScenarioRegion r;
    r.id = "R" + std::to_string(i);
    r.name = r.id;
    r.gpu_capacity = 1 + static_cast<int>(rng() % 16);
    r.elec_price = 0.10 + 0.001 * static_cast<double>(rng() % 300);
    r.node_bandwidth = (25.0 + static_cast<double>(rng() % 76)) * 1e9;
    r.intra_bandwidth = (5.0 + static_cast<double>(rng() % 96)) * 1e9;
    s.regions.push_back(std::move(r));
  }
  int njobs = 2 + static_cast<int>(rng() % 23);
  for (int i = 0; i < njobs; ++i) {
    std::size_t m = rng() % 8;
    JobSpec j;
    j.id = (i + 1 < 10 ? "j0" : "j") + std::to_string(i + 1);
    j.model.name = model_names[m];
    j.model.layers = model_layers[m];
    j.model.hidden = model_hidden[m];
    j.model.batch_size = model_batch[m];
    j.dataset = datasets[rng() % 3];
    j.dataset_samples = dataset_samples_table().at(j.dataset);
    j.micro_batches = j.model.batch_size / 8;
    j.iterations = (j.dataset_samples + j.model.batch_size - 1) / j.model.batch_size;
    if (rng() % 3 == 0) j.submit_time = static_cast<double>(rng() % 5) * 5000.0;
    s.jobs.push_back(std::move(j));
  }
  s.bw_scale = 0.3 + 0.01 * static_cast<double>(rng() % 171);   // 0.3 .. 2.0
  s.gpu_scale = 0.5 + 0.01 * static_cast<double>(rng() % 101);  // 0.5 .. 1.5
  return s;
}

}  // namespace bacepipe::testing
