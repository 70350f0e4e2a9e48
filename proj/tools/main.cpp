// Command-line front end: simulate, sweep, verify.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bacepipe/report.hpp"
#include "bacepipe/scenario.hpp"
#include "bacepipe/simulator.hpp"
#include "bacepipe/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;

std::vector<std::string> resolve_policies(const std::string& arg) {
  if (arg == "all") return bacepipe::all_policy_names();
  std::vector<std::string> out;
  std::string cur;
  for (char c : arg) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int run_simulate(const std::string& scenario_arg, const std::string& policy_arg,
                 double bw_scale, double gpu_scale, int jobs,
                 std::uint64_t seed, const std::string& out_dir,
                 const std::string& format) {
  bacepipe::Scenario base = bacepipe::load_scenario(scenario_arg);
  if (bw_scale > 0) base.bw_scale = bw_scale;
  if (gpu_scale > 0) base.gpu_scale = gpu_scale;
  if (jobs > 0) base.job_count = jobs;
  bacepipe::Scenario resolved = bacepipe::resolve(base, seed);

  std::vector<bacepipe::SimReport> runs;
  std::vector<bacepipe::Scenario> run_scenarios;
  for (const std::string& name : resolve_policies(policy_arg)) {
    auto policy = bacepipe::policy_from_name(name);
    if (!policy) {
      std::cerr << "error: unknown policy '" << name << "'\n";
      return kExitUsage;
    }
    runs.push_back(bacepipe::run(resolved, *policy, seed));
    run_scenarios.push_back(resolved);
    const auto& r = runs.back();
    std::cout << r.policy << ": avg_jct=" << bacepipe::format_g9(r.avg_jct)
              << " s, total_cost=" << bacepipe::format_g9(r.total_cost)
              << " $\n";
  }
  bacepipe::emit_report(out_dir, resolved, runs, run_scenarios, seed, format);
  std::cout << "reports written to " << out_dir << "\n";
  return kExitOk;
}

int run_sweep_cmd(const std::string& scenario_arg, const std::string& axis_arg,
                  const std::string& values_arg, const std::string& policy_arg,
                  std::uint64_t seed, const std::string& out_dir,
                  const std::string& format) {
  bacepipe::Scenario base = bacepipe::load_scenario(scenario_arg);
  auto axis = bacepipe::sweep_axis_from_name(axis_arg);
  if (!axis) {
    std::cerr << "error: unknown sweep axis '" << axis_arg << "'\n";
    return kExitUsage;
  }
  bacepipe::SweepSpec spec;
  spec.axis = *axis;
  if (values_arg.empty()) {
    spec.values = bacepipe::default_sweep_values(*axis);
  } else {
    std::string cur;
    for (char c : values_arg + ",") {
      if (c == ',') {
        if (!cur.empty()) spec.values.push_back(std::stod(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
  }
  if (!policy_arg.empty()) spec.policies = resolve_policies(policy_arg);

  bacepipe::SweepResult result = bacepipe::run_sweep(base, spec, seed);
  for (const auto& cell : result.cells)
    for (const auto& r : cell.runs)
      std::cout << bacepipe::sweep_axis_name(spec.axis) << "="
                << bacepipe::format_g9(cell.value) << " " << r.policy
                << ": avg_jct=" << bacepipe::format_g9(r.avg_jct)
                << " s, total_cost=" << bacepipe::format_g9(r.total_cost)
                << " $\n";
  bacepipe::emit_sweep(out_dir, base, result, seed, format);
  std::cout << "reports written to " << out_dir << "\n";
  return kExitOk;
}

bacepipe::SimReport report_from_json(const nlohmann::json& rj,
                                     const bacepipe::Scenario& scenario) {
  bacepipe::SimReport run;
  run.policy = rj.value("policy", std::string());
  run.seed = rj.value("seed", 0ULL);
  run.scenario_hash = rj.value("scenario_hash", std::string());
  run.avg_jct = rj.value("avg_jct", 0.0);
  run.total_cost = rj.value("total_cost", 0.0);
  run.no_jobs = rj.value("no_jobs", false);
  auto region_index = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < scenario.regions.size(); ++i)
      if (scenario.regions[i].id == id) return i;
    throw bacepipe::ConfigError("report references unknown region: " + id);
  };
  for (const auto& rec : rj.value("records", nlohmann::json::array())) {
    bacepipe::JobRecord r;
    r.job_id = rec.at("job_id").get<std::string>();
    r.submit = rec.value("submit", 0.0);
    r.start = rec.value("start", 0.0);
    r.wait = rec.value("wait", 0.0);
    r.exec = rec.value("exec", 0.0);
    r.jct = rec.value("jct", 0.0);
    r.cost = rec.value("cost", 0.0);
    const auto& plan = rec.at("plan");
    r.plan.job_id = r.job_id;
    for (const auto& id : plan.at("path"))
      r.plan.path.push_back(region_index(id.get<std::string>()));
    r.plan.alloc = plan.at("alloc").get<std::vector<int>>();
    r.plan.bandwidth_reserved = plan.value("bandwidth_reserved", 0.0);
    run.records.push_back(std::move(r));
  }
  for (const auto& ev : rj.value("timeline", nlohmann::json::array())) {
    bacepipe::ReservationEvent e;
    e.time = ev.at("time").get<double>();
    e.release = ev.at("event").get<std::string>() == "release";
    e.job_id = ev.at("job_id").get<std::string>();
    run.timeline.push_back(std::move(e));
  }
  return run;
}

int run_verify(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in) {
    std::cerr << "error: cannot open report " << report_path << "\n";
    return kExitUsage;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: report parse failure: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!j.contains("scenario") || (!j.contains("runs") && !j.contains("cells"))) {
    std::cerr << "error: not a summary document (missing scenario/runs)\n";
    return kExitUsage;
  }

  bacepipe::Scenario base = bacepipe::scenario_from_json(j["scenario"]);
  int violations = 0;
  int checked = 0;
  auto verify_runs = [&](const nlohmann::json& runs, const bacepipe::Scenario& fallback) {
    for (const auto& rj : runs) {
      bacepipe::Scenario sc = fallback;
      if (rj.contains("scenario"))
        sc = bacepipe::scenario_from_json(rj["scenario"]);
      bacepipe::SimReport run = report_from_json(rj, sc);
      auto v = bacepipe::verify_invariants(run, sc);
      ++checked;
      if (v.empty()) {
        std::cout << "ok: " << run.policy << " (" << run.records.size()
                  << " jobs)\n";
      } else {
        violations += static_cast<int>(v.size());
        for (const std::string& msg : v)
          std::cout << "violation [" << run.policy << "]: " << msg << "\n";
      }
    }
  };
  if (j.contains("runs")) verify_runs(j["runs"], base);
  if (j.contains("cells"))
    for (const auto& cell : j["cells"]) {
      bacepipe::Scenario sc =
          cell.contains("scenario") ? bacepipe::scenario_from_json(cell["scenario"]) : base;
      verify_runs(cell.value("runs", nlohmann::json::array()), sc);
    }
  std::cout << checked << " run(s) checked, " << violations
            << " violation(s)\n";
  return violations == 0 ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geo-distributed pipeline-parallel training scheduler simulator"};
  app.require_subcommand(1);

  std::string scenario = "default";
  std::string policy = "BACE";
  double bw_scale = 0.0;
  double gpu_scale = 0.0;
  int jobs = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string format = "both";

  auto* sim = app.add_subcommand("simulate", "Run one scenario under one or more policies");
  sim->add_option("--scenario", scenario, "Built-in name (default, motivation) or JSON path");
  sim->add_option("--policy", policy, "Policy name, comma list, or 'all'");
  sim->add_option("--bw-scale", bw_scale, "Scale factor for inter-region link capacity");
  sim->add_option("--gpu-scale", gpu_scale, "Scale factor for regional GPU capacity");
  sim->add_option("--jobs", jobs, "Expand the job list to this count");
  sim->add_option("--seed", seed, "Seed for job expansion");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--format", format, "csv | summary | both")
      ->check(CLI::IsMember({"csv", "summary", "both"}));

  std::string axis;
  std::string values;
  std::string sweep_policies;
  auto* sw = app.add_subcommand("sweep", "Run a sensitivity sweep over one axis");
  sw->add_option("--axis", axis, "bandwidth | gpu | jobs")->required();
  sw->add_option("--values", values, "Comma-separated axis values");
  sw->add_option("--policies", sweep_policies, "Comma list or 'all'");
  sw->add_option("--scenario", scenario, "Built-in name or JSON path");
  sw->add_option("--seed", seed, "Seed for job expansion");
  sw->add_option("--out", out_dir, "Output directory");
  sw->add_option("--format", format, "csv | summary | both")
      ->check(CLI::IsMember({"csv", "summary", "both"}));

  std::string report_path;
  auto* ver = app.add_subcommand("verify", "Re-check every invariant of an emitted summary");
  ver->add_option("--report", report_path, "Path to summary.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed())
      return run_simulate(scenario, policy, bw_scale, gpu_scale, jobs, seed,
                          out_dir, format);
    if (sw->parsed())
      return run_sweep_cmd(scenario, axis, values, sweep_policies, seed,
                           out_dir, format);
    if (ver->parsed()) return run_verify(report_path);
  } catch (const bacepipe::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
