#include "bacepipe/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "bacepipe/numeric.hpp"

namespace bacepipe {
namespace {

constexpr double kGbps = 1e9;

struct ModelRow {
  const char* name;
  double params_b;
  int layers;
  int hidden;
  int batch;
};

// Region fleet: id, location, GPUs, $/kWh, node bandwidth (Gbps).
const std::vector<ScenarioRegion>& region_fleet() {
  static const std::vector<ScenarioRegion> rows = {
      {"EU-West", "Ireland", 64, 0.251, 50 * kGbps, 100 * kGbps},
      {"US-East-2", "New York, USA", 64, 0.156, 90 * kGbps, 100 * kGbps},
      {"EU-Central", "Frankfurt, Germany", 16, 0.288, 30 * kGbps, 100 * kGbps},
      {"EA-East", "Tokyo, Japan", 128, 0.191, 70 * kGbps, 100 * kGbps},
      {"SEA-South", "Singapore", 32, 0.222, 50 * kGbps, 100 * kGbps},
      {"OC-East", "Sydney, Australia", 32, 0.295, 70 * kGbps, 100 * kGbps},
  };
  return rows;
}

const std::vector<ModelRow>& model_rows() {
  static const std::vector<ModelRow> rows = {
      {"FLM-101B", 101e9, 80, 10240, 128},
      {"Solar-Open-100B", 100e9, 48, 4096, 128},
      {"Llama-3.1-70B", 70e9, 80, 8192, 128},
      {"Falcon-40B", 40e9, 60, 8192, 256},
      {"Qwen2.5-32B", 32e9, 64, 5120, 256},
      {"Gemma-3-27B", 27e9, 62, 5376, 256},
      {"Ministral-3-14B", 14e9, 40, 5120, 512},
      {"Qwen2.5-14B", 14e9, 48, 5120, 512},
  };
  return rows;
}

const std::vector<std::string>& dataset_cycle() {
  static const std::vector<std::string> c = {"alpaca-52k", "wikitext-103",
                                             "openwebtext"};
  return c;
}

ModelConfig builtin_model(const std::string& name) {
  for (const ModelRow& r : model_rows()) {
    if (name == r.name) {
      ModelConfig m;
      m.name = r.name;
      m.params = r.params_b;
      m.layers = r.layers;
      m.hidden = r.hidden;
      m.batch_size = r.batch;
      return m;
    }
  }
  throw ConfigError("unknown built-in model: " + name);
}

std::int64_t samples_for(const std::string& dataset) {
  auto it = dataset_samples_table().find(dataset);
  if (it == dataset_samples_table().end())
    throw ConfigError("unknown dataset: " + dataset);
  return it->second;
}

// Fill defaulted JobSpec fields: samples from the dataset tag, iterations
// as ceil(samples / batch) * epochs, micro_batches as batch / 8.
void finish_job(JobSpec& j, int epochs) {
  if (!j.dataset.empty() && j.dataset_samples == 0)
    j.dataset_samples = samples_for(j.dataset);
  if (j.micro_batches == 0)
    j.micro_batches = std::max(1, j.model.batch_size / 8);
  if (j.iterations == 0) {
    if (j.dataset_samples <= 0)
      throw ConfigError("job " + j.id + ": needs iterations, dataset, or dataset_samples");
    j.iterations = ceil_div(j.dataset_samples, j.model.batch_size) *
                   std::max(1, epochs);
  }
}

double get_num(const nlohmann::json& j, const std::string& ctx,
               const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(ctx + "." + key + ": missing or non-numeric");
  return j[key].get<double>();
}

std::string get_str(const nlohmann::json& j, const std::string& ctx,
                    const std::string& key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError(ctx + "." + key + ": missing or non-string");
  return j[key].get<std::string>();
}

}  // namespace

const std::map<std::string, std::int64_t>& dataset_samples_table() {
  static const std::map<std::string, std::int64_t> t = {
      {"alpaca-52k", 52002},
      {"wikitext-103", 1810000},
      {"openwebtext", 8010000},
  };
  return t;
}

Scenario default_scenario() {
  Scenario s;
  s.name = "default";
  s.regions = region_fleet();
  s.full_mesh = true;
  for (std::size_t i = 0; i < model_rows().size(); ++i) {
    JobSpec j;
    std::ostringstream id;
    id << "j0" << (i + 1);
    j.id = id.str();
    j.model = builtin_model(model_rows()[i].name);
    j.dataset = dataset_cycle()[i % dataset_cycle().size()];
    finish_job(j, 1);
    s.jobs.push_back(std::move(j));
  }
  return s;
}

Scenario motivation_scenario() {
  Scenario s;
  s.name = "motivation";
  s.full_mesh = false;
  s.regions = {
      {"A", "Region A", 4, 0.230, 1 * kGbps, 100 * kGbps},
      {"B", "Region B", 3, 0.222, 1 * kGbps, 0.2 * kGbps},
      {"C", "Region C", 2, 0.191, 1 * kGbps, 100 * kGbps},
      {"D", "Region D", 2, 0.291, 1 * kGbps, 100 * kGbps},
  };
  s.link_overrides = {
      {"A", "C", 1.0 * kGbps}, {"C", "A", 1.0 * kGbps},
      {"B", "D", 0.2 * kGbps}, {"D", "B", 0.2 * kGbps},
  };
  JobSpec p;
  p.id = "P";
  p.model = builtin_model("Qwen2.5-14B");
  p.dataset = "alpaca-52k";
  p.micro_batches = p.model.batch_size;  // micro-batch of one sequence
  finish_job(p, 1);
  JobSpec q;
  q.id = "Q";
  q.model = builtin_model("Llama-3.1-70B");
  q.dataset = "alpaca-52k";
  q.micro_batches = q.model.batch_size;
  finish_job(q, 1);
  s.jobs = {p, q};
  s.profile.per_layer_time = {
      {"Qwen2.5-14B", 0.06},
      {"Llama-3.1-70B", 0.03},
  };
  return s;
}

Scenario load_scenario(const std::string& name_or_path) {
  if (name_or_path == "default") return default_scenario();
  if (name_or_path == "motivation") return motivation_scenario();
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError("cannot open scenario file: " + name_or_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario parse error in " + name_or_path + ": " + e.what());
  }
  // summary documents embed the resolved scenario under "scenario"
  if (j.contains("scenario") && !j.contains("regions"))
    j = j["scenario"];
  return scenario_from_json(j);
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.value("name", std::string("custom"));
  if (!j.contains("regions") || !j["regions"].is_array() || j["regions"].empty())
    throw ConfigError("regions: missing or empty");
  int ridx = 0;
  for (const auto& rj : j["regions"]) {
    std::string ctx = "regions[" + std::to_string(ridx++) + "]";
    ScenarioRegion r;
    r.id = get_str(rj, ctx, "id");
    r.name = rj.value("name", r.id);
    r.gpu_capacity = static_cast<int>(get_num(rj, ctx, "gpu_capacity"));
    r.elec_price = get_num(rj, ctx, "elec_price");
    r.node_bandwidth = get_num(rj, ctx, "node_bandwidth_gbps") * kGbps;
    r.intra_bandwidth = rj.value("intra_bandwidth_gbps", 100.0) * kGbps;
    s.regions.push_back(std::move(r));
  }
  s.full_mesh = j.value("full_mesh", true);
  if (j.contains("links")) {
    int lidx = 0;
    for (const auto& lj : j["links"]) {
      std::string ctx = "links[" + std::to_string(lidx++) + "]";
      LinkOverride l;
      l.src = get_str(lj, ctx, "src");
      l.dst = get_str(lj, ctx, "dst");
      l.capacity = get_num(lj, ctx, "capacity_gbps") * kGbps;
      bool both = lj.value("bidirectional", false);
      s.link_overrides.push_back(l);
      if (both) s.link_overrides.push_back({l.dst, l.src, l.capacity});
    }
  }
  if (j.contains("profile")) {
    const auto& pj = j["profile"];
    s.profile.gpu_power = pj.value("gpu_power_watts", 300.0);
    s.profile.peak_flops = pj.value("peak_flops", 155e12);
    s.profile.calibration = pj.value("calibration", 2.5);
    if (pj.contains("per_layer_time"))
      for (const auto& [model, v] : pj["per_layer_time"].items())
        s.profile.per_layer_time[model] = v.get<double>();
  }
  int epochs = j.value("epochs", 1);
  if (!j.contains("jobs") || !j["jobs"].is_array())
    throw ConfigError("jobs: missing");
  int jidx = 0;
  for (const auto& jj : j["jobs"]) {
    std::string ctx = "jobs[" + std::to_string(jidx++) + "]";
    JobSpec job;
    job.id = get_str(jj, ctx, "id");
    if (!jj.contains("model")) throw ConfigError(ctx + ".model: missing");
    if (jj["model"].is_string()) {
      job.model = builtin_model(jj["model"].get<std::string>());
    } else {
      const auto& mj = jj["model"];
      std::string mctx = ctx + ".model";
      job.model.name = get_str(mj, mctx, "name");
      job.model.layers = static_cast<int>(get_num(mj, mctx, "layers"));
      job.model.hidden = static_cast<int>(get_num(mj, mctx, "hidden"));
      job.model.batch_size = static_cast<int>(get_num(mj, mctx, "batch_size"));
      job.model.params = mj.value("params", 0.0);
      job.model.seq_len = static_cast<int>(mj.value("seq_len", 2048.0));
      job.model.bytes_per_elem = static_cast<int>(mj.value("bytes_per_elem", 2.0));
    }
    job.dataset = jj.value("dataset", std::string());
    job.dataset_samples = static_cast<std::int64_t>(jj.value("dataset_samples", 0.0));
    job.micro_batches = static_cast<int>(jj.value("micro_batches", 0.0));
    job.iterations = static_cast<std::int64_t>(jj.value("iterations", 0.0));
    job.submit_time = jj.value("submit_time", 0.0);
    finish_job(job, epochs);
    s.jobs.push_back(std::move(job));
  }
  s.bw_scale = j.value("bw_scale", 1.0);
  s.gpu_scale = j.value("gpu_scale", 1.0);
  s.job_count = static_cast<int>(j.value("job_count", 0.0));
  s.strict_blocking = j.value("strict_blocking", false);
  validate(s);
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["regions"] = nlohmann::json::array();
  for (const auto& r : s.regions) {
    j["regions"].push_back({{"id", r.id},
                            {"name", r.name},
                            {"gpu_capacity", r.gpu_capacity},
                            {"elec_price", r.elec_price},
                            {"node_bandwidth_gbps", r.node_bandwidth / kGbps},
                            {"intra_bandwidth_gbps", r.intra_bandwidth / kGbps}});
  }
  j["full_mesh"] = s.full_mesh;
  if (!s.link_overrides.empty()) {
    j["links"] = nlohmann::json::array();
    for (const auto& l : s.link_overrides)
      j["links"].push_back({{"src", l.src},
                            {"dst", l.dst},
                            {"capacity_gbps", l.capacity / kGbps}});
  }
  nlohmann::json pj;
  pj["gpu_power_watts"] = s.profile.gpu_power;
  pj["peak_flops"] = s.profile.peak_flops;
  pj["calibration"] = s.profile.calibration;
  if (!s.profile.per_layer_time.empty()) {
    nlohmann::json plt;
    for (const auto& [model, v] : s.profile.per_layer_time) plt[model] = v;
    pj["per_layer_time"] = plt;
  }
  j["profile"] = pj;
  j["jobs"] = nlohmann::json::array();
  for (const auto& job : s.jobs) {
    nlohmann::json jj;
    jj["id"] = job.id;
    jj["model"] = {{"name", job.model.name},
                   {"params", job.model.params},
                   {"layers", job.model.layers},
                   {"hidden", job.model.hidden},
                   {"batch_size", job.model.batch_size},
                   {"seq_len", job.model.seq_len},
                   {"bytes_per_elem", job.model.bytes_per_elem}};
    if (!job.dataset.empty()) jj["dataset"] = job.dataset;
    jj["dataset_samples"] = job.dataset_samples;
    jj["micro_batches"] = job.micro_batches;
    jj["iterations"] = job.iterations;
    jj["submit_time"] = job.submit_time;
    j["jobs"].push_back(std::move(jj));
  }
  j["bw_scale"] = s.bw_scale;
  j["gpu_scale"] = s.gpu_scale;
  j["job_count"] = s.job_count;
  j["strict_blocking"] = s.strict_blocking;
  return j;
}

std::vector<JobSpec> expand_jobs(const std::vector<JobSpec>& base,
                                 int target_count, std::uint64_t seed) {
  if (base.empty()) throw ConfigError("expand_jobs: empty base job list");
  if (target_count <= static_cast<int>(base.size()))
    return std::vector<JobSpec>(base.begin(), base.begin() + target_count);
  std::vector<JobSpec> out = base;
  std::mt19937_64 rng(seed);
  for (int i = static_cast<int>(base.size()); i < target_count; ++i) {
    JobSpec j = base[i % base.size()];
    int copy = i / static_cast<int>(base.size()) + 1;
    j.id = j.id + "#" + std::to_string(copy);
    // templates pinned to an explicit iteration count clone verbatim;
    // dataset-driven ones draw a fresh dataset and keep their epoch multiple
    if (!j.dataset.empty() && j.dataset_samples > 0) {
      std::int64_t per_epoch = ceil_div(j.dataset_samples, j.model.batch_size);
      std::int64_t epochs = std::max<std::int64_t>(1, j.iterations / per_epoch);
      const auto& cycle = dataset_cycle();
      j.dataset = cycle[rng() % cycle.size()];
      j.dataset_samples = samples_for(j.dataset);
      j.iterations = ceil_div(j.dataset_samples, j.model.batch_size) * epochs;
    }
    out.push_back(std::move(j));
  }
  return out;
}

Scenario resolve(const Scenario& s, std::uint64_t seed) {
  Scenario r = s;
  if (r.job_count > 0) {
    r.jobs = expand_jobs(r.jobs, r.job_count, seed);
    r.job_count = 0;
  }
  return r;
}

ClusterState build_cluster(const Scenario& s) {
  validate(s);
  std::vector<RegionState> regions;
  for (const auto& sr : s.regions) {
    RegionState r;
    r.id = sr.id;
    r.name = sr.name;
    r.gpu_capacity = std::max(
        1, static_cast<int>(std::floor(sr.gpu_capacity * s.gpu_scale)));
    r.gpu_free = r.gpu_capacity;
    r.elec_price = sr.elec_price;
    r.node_bandwidth = sr.node_bandwidth;
    r.intra_bandwidth = sr.intra_bandwidth;
    regions.push_back(std::move(r));
  }

  std::map<std::pair<std::size_t, std::size_t>, double> caps;
  if (s.full_mesh) {
    for (std::size_t u = 0; u < regions.size(); ++u)
      for (std::size_t v = 0; v < regions.size(); ++v)
        if (u != v)
          caps[{u, v}] = derive_link_capacity(regions[u].node_bandwidth,
                                              regions[v].node_bandwidth);
  }
  auto index_of = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < regions.size(); ++i)
      if (regions[i].id == id) return i;
    throw ConfigError("link override references unknown region: " + id);
  };
  for (const auto& l : s.link_overrides)
    caps[{index_of(l.src), index_of(l.dst)}] = l.capacity;

  std::vector<LinkState> links;
  for (const auto& [key, cap] : caps) {
    LinkState l;
    l.src = key.first;
    l.dst = key.second;
    l.capacity = cap * s.bw_scale;
    links.push_back(l);
  }
  return ClusterState(std::move(regions), links);
}

void validate(const Scenario& s) {
  if (s.regions.empty()) throw ConfigError("regions: empty");
  std::set<std::string> ids;
  for (const auto& r : s.regions) {
    if (!ids.insert(r.id).second)
      throw ConfigError("regions: duplicate id " + r.id);
    if (r.gpu_capacity < 1) throw ConfigError("region " + r.id + ".gpu_capacity: must be >= 1");
    if (r.elec_price <= 0) throw ConfigError("region " + r.id + ".elec_price: must be > 0");
    if (r.node_bandwidth <= 0) throw ConfigError("region " + r.id + ".node_bandwidth_gbps: must be > 0");
    if (r.intra_bandwidth <= 0) throw ConfigError("region " + r.id + ".intra_bandwidth_gbps: must be > 0");
  }
  std::set<std::string> jids;
  for (const auto& job : s.jobs) {
    std::string ctx = "job " + job.id;
    if (!jids.insert(job.id).second) throw ConfigError("jobs: duplicate id " + job.id);
    if (job.model.layers < 1) throw ConfigError(ctx + ".model.layers: must be >= 1");
    if (job.model.hidden < 1) throw ConfigError(ctx + ".model.hidden: must be >= 1");
    if (job.model.batch_size < 1) throw ConfigError(ctx + ".model.batch_size: must be >= 1");
    if (job.model.seq_len < 1) throw ConfigError(ctx + ".model.seq_len: must be >= 1");
    if (job.model.bytes_per_elem != 1 && job.model.bytes_per_elem != 2 &&
        job.model.bytes_per_elem != 4)
      throw ConfigError(ctx + ".model.bytes_per_elem: must be 1, 2, or 4");
    if (job.micro_batches < 1) throw ConfigError(ctx + ".micro_batches: must be >= 1");
    if (job.iterations < 1) throw ConfigError(ctx + ".iterations: must be >= 1");
    if (job.submit_time < 0) throw ConfigError(ctx + ".submit_time: must be >= 0");
  }
  if (s.bw_scale <= 0) throw ConfigError("bw_scale: must be > 0");
  if (s.gpu_scale <= 0) throw ConfigError("gpu_scale: must be > 0");
  if (s.job_count < 0) throw ConfigError("job_count: must be >= 0");
  if (s.job_count > 0 && s.jobs.empty())
    throw ConfigError("job_count: requires at least one template job");
}

}  // namespace bacepipe
