#include "bacepipe/sweep.hpp"

#include <fstream>

#include "bacepipe/report.hpp"

namespace bacepipe {

std::optional<SweepAxis> sweep_axis_from_name(const std::string& name) {
  if (name == "bandwidth") return SweepAxis::Bandwidth;
  if (name == "gpu") return SweepAxis::Gpu;
  if (name == "jobs") return SweepAxis::Jobs;
  return std::nullopt;
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Bandwidth: return "bandwidth";
    case SweepAxis::Gpu: return "gpu";
    case SweepAxis::Jobs: return "jobs";
  }
  return "?";
}

const std::vector<double>& default_sweep_values(SweepAxis axis) {
  static const std::vector<double> bw = {0.3, 0.9, 1.5};
  static const std::vector<double> gpu = {0.5, 0.75, 1.25};
  static const std::vector<double> jobs = {8, 16, 24};
  switch (axis) {
    case SweepAxis::Bandwidth: return bw;
    case SweepAxis::Gpu: return gpu;
    case SweepAxis::Jobs: return jobs;
  }
  return bw;
}

SweepResult run_sweep(const Scenario& base, const SweepSpec& spec_in,
                      std::uint64_t seed) {
  SweepSpec spec = spec_in;
  if (spec.values.empty())
    throw ConfigError("sweep values: must not be empty");
  if (spec.policies.empty())
    spec.policies = {"BACE", "LCF", "LDF", "CR-LCF", "CR-LDF"};

  SweepResult result;
  result.spec = spec;
  for (double value : spec.values) {
    SweepCell cell;
    cell.value = value;
    Scenario s = base;
    switch (spec.axis) {
      case SweepAxis::Bandwidth: s.bw_scale = value; break;
      case SweepAxis::Gpu: s.gpu_scale = value; break;
      case SweepAxis::Jobs: s.job_count = static_cast<int>(value); break;
    }
    cell.scenario = resolve(s, seed);
    for (const std::string& pname : spec.policies) {
      auto policy = policy_from_name(pname);
      if (!policy) throw ConfigError("unknown policy: " + pname);
      cell.runs.push_back(run(cell.scenario, *policy, seed));
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

nlohmann::json sweep_summary_json(const Scenario& base, const SweepResult& r,
                                  std::uint64_t seed) {
  nlohmann::json j;
  j["seed"] = seed;
  j["scenario"] = scenario_to_json(base);
  j["sweep"] = {{"axis", sweep_axis_name(r.spec.axis)},
                {"values", r.spec.values},
                {"policies", r.spec.policies}};
  j["cells"] = nlohmann::json::array();
  for (const SweepCell& cell : r.cells) {
    nlohmann::json cj;
    cj["value"] = round_g9(cell.value);
    cj["scenario"] = scenario_to_json(cell.scenario);
    cj["runs"] = nlohmann::json::array();
    for (const SimReport& run : cell.runs)
      cj["runs"].push_back(run_to_json(run, cell.scenario));

    const SimReport* bace = nullptr;
    for (const SimReport& run : cell.runs)
      if (run.policy == "BACE") {
        bace = &run;
        break;
      }
    if (bace) {
      nlohmann::json norm;
      for (const SimReport& run : cell.runs) {
        nlohmann::json n;
        if (bace->avg_jct > 0)
          n["avg_jct_ratio"] = round_g9(run.avg_jct / bace->avg_jct);
        else
          n["avg_jct_ratio_undefined"] = true;
        if (bace->total_cost > 0)
          n["total_cost_ratio"] = round_g9(run.total_cost / bace->total_cost);
        else
          n["total_cost_ratio_undefined"] = true;
        norm[run.policy] = std::move(n);
      }
      cj["normalized_to_BACE"] = norm;
    }
    j["cells"].push_back(std::move(cj));
  }
  return j;
}

void emit_sweep(const std::filesystem::path& out_dir, const Scenario& base,
                const SweepResult& r, std::uint64_t seed,
                const std::string& format) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir.string());

  if (format == "csv" || format == "both") {
    for (const SweepCell& cell : r.cells) {
      std::filesystem::path dir =
          out_dir / (sweep_axis_name(r.spec.axis) + "=" + format_g9(cell.value));
      std::filesystem::create_directories(dir, ec);
      if (ec) throw ConfigError("cannot create output directory: " + dir.string());
      std::ofstream csv(dir / "records.csv", std::ios::binary);
      if (!csv) throw ConfigError("cannot write " + (dir / "records.csv").string());
      std::vector<Scenario> scenarios(cell.runs.size(), cell.scenario);
      write_records_csv(csv, cell.runs, scenarios);
    }
  }
  if (format == "summary" || format == "both") {
    std::ofstream js(out_dir / "summary.json", std::ios::binary);
    if (!js) throw ConfigError("cannot write " + (out_dir / "summary.json").string());
    js << sweep_summary_json(base, r, seed).dump(2) << '\n';
  }
}

}  // namespace bacepipe
