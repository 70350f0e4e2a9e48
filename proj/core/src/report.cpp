#include "bacepipe/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bacepipe {
namespace {

std::string plan_path_str(const PlacementPlan& plan, const Scenario& s) {
  std::string out;
  for (std::size_t i = 0; i < plan.path.size(); ++i) {
    if (i) out += ">";
    out += s.regions[plan.path[i]].id;
  }
  return out;
}

std::string plan_alloc_str(const PlacementPlan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.alloc.size(); ++i) {
    if (i) out += ">";
    out += std::to_string(plan.alloc[i]);
  }
  return out;
}

}  // namespace

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double round_g9(double v) { return std::strtod(format_g9(v).c_str(), nullptr); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string scenario_hash(const Scenario& resolved) {
  std::ostringstream hex;
  hex << std::hex << fnv1a64(scenario_to_json(resolved).dump());
  return hex.str();
}

void write_records_csv(std::ostream& out, const std::vector<SimReport>& runs,
                       const std::vector<Scenario>& run_scenarios) {
  out << "job_id,policy,submit,start,wait,exec,jct,cost,path,alloc\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const SimReport& run = runs[i];
    const Scenario& sc = run_scenarios[i];
    for (const JobRecord& r : run.records) {
      out << r.job_id << ',' << run.policy << ',' << format_g9(r.submit) << ','
          << format_g9(r.start) << ',' << format_g9(r.wait) << ','
          << format_g9(r.exec) << ',' << format_g9(r.jct) << ','
          << format_g9(r.cost) << ',' << plan_path_str(r.plan, sc) << ','
          << plan_alloc_str(r.plan) << '\n';
    }
  }
}

nlohmann::json run_to_json(const SimReport& run, const Scenario& resolved) {
  nlohmann::json j;
  j["policy"] = run.policy;
  j["seed"] = run.seed;
  j["scenario_hash"] = run.scenario_hash;
  j["avg_jct"] = round_g9(run.avg_jct);
  j["total_cost"] = round_g9(run.total_cost);
  j["no_jobs"] = run.no_jobs;
  nlohmann::json peaks;
  for (const auto& [link, util] : run.peak_link_utilization)
    peaks[link] = round_g9(util);
  j["peak_link_utilization"] = peaks;
  j["records"] = nlohmann::json::array();
  for (const JobRecord& r : run.records) {
    nlohmann::json rj;
    rj["job_id"] = r.job_id;
    rj["submit"] = round_g9(r.submit);
    rj["start"] = round_g9(r.start);
    rj["wait"] = round_g9(r.wait);
    rj["exec"] = round_g9(r.exec);
    rj["jct"] = round_g9(r.jct);
    rj["cost"] = round_g9(r.cost);
    nlohmann::json plan;
    plan["path"] = nlohmann::json::array();
    for (std::size_t idx : r.plan.path)
      plan["path"].push_back(resolved.regions[idx].id);
    plan["alloc"] = r.plan.alloc;
    plan["bandwidth_reserved"] = round_g9(r.plan.bandwidth_reserved);
    rj["plan"] = plan;
    j["records"].push_back(std::move(rj));
  }
  j["timeline"] = nlohmann::json::array();
  for (const ReservationEvent& ev : run.timeline)
    j["timeline"].push_back({{"time", round_g9(ev.time)},
                             {"event", ev.release ? "release" : "reserve"},
                             {"job_id", ev.job_id}});
  return j;
}

nlohmann::json summary_to_json(const Scenario& base,
                               const std::vector<SimReport>& runs,
                               const std::vector<Scenario>& run_scenarios,
                               std::uint64_t seed) {
  nlohmann::json j;
  j["seed"] = seed;
  j["scenario"] = scenario_to_json(base);
  j["runs"] = nlohmann::json::array();
  nlohmann::json base_json = scenario_to_json(base);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    nlohmann::json rj = run_to_json(runs[i], run_scenarios[i]);
    nlohmann::json cell_json = scenario_to_json(run_scenarios[i]);
    if (cell_json != base_json) rj["scenario"] = cell_json;
    j["runs"].push_back(std::move(rj));
  }

  const SimReport* bace = nullptr;
  for (const SimReport& r : runs)
    if (r.policy == "BACE") {
      bace = &r;
      break;
    }
  if (bace) {
    nlohmann::json norm;
    for (const SimReport& r : runs) {
      nlohmann::json n;
      if (bace->avg_jct > 0)
        n["avg_jct_ratio"] = round_g9(r.avg_jct / bace->avg_jct);
      else
        n["avg_jct_ratio_undefined"] = true;
      if (bace->total_cost > 0)
        n["total_cost_ratio"] = round_g9(r.total_cost / bace->total_cost);
      else
        n["total_cost_ratio_undefined"] = true;
      norm[r.policy] = std::move(n);
    }
    j["normalized_to_BACE"] = norm;
  }
  return j;
}

void emit_report(const std::filesystem::path& out_dir, const Scenario& base,
                 const std::vector<SimReport>& runs,
                 const std::vector<Scenario>& run_scenarios, std::uint64_t seed,
                 const std::string& format) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir.string());

  if (format == "csv" || format == "both") {
    std::ofstream csv(out_dir / "records.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + (out_dir / "records.csv").string());
    write_records_csv(csv, runs, run_scenarios);
  }
  if (format == "summary" || format == "both") {
    std::ofstream js(out_dir / "summary.json", std::ios::binary);
    if (!js) throw ConfigError("cannot write " + (out_dir / "summary.json").string());
    js << summary_to_json(base, runs, run_scenarios, seed).dump(2) << '\n';
  }
}

}  // namespace bacepipe
