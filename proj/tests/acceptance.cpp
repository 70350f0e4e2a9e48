// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerance in code.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "bacepipe/cost_model.hpp"
#include "bacepipe/placement.hpp"
#include "bacepipe/report.hpp"
#include "bacepipe/scenario.hpp"
#include "bacepipe/simulator.hpp"
#include "bacepipe/sweep.hpp"
#include "gpipe_oracle.hpp"
#include "support.hpp"

using namespace bacepipe;
using namespace bacepipe::testing;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("[%s] C%d %s: %s\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------- C1
void criterion1_constraint_soundness() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(12345);
  int violations = 0;
  int runs = 0;
  for (int i = 0; i < 100; ++i) {
    Scenario s = fuzz_scenario(rng);
    for (const auto& name : all_policy_names()) {
      SimReport r = run(s, *policy_from_name(name), i);
      violations += static_cast<int>(verify_invariants(r, s).size());
      ++runs;
    }
  }
  double secs = elapsed_s(t0);
  std::ostringstream d;
  d << runs << " runs, " << violations << " violations, " << std::fixed
    << secs << " s";
  report(1, "capacity constraints hold under fuzzed scenarios",
         violations == 0 && secs < 60.0, d.str());
}

// ---------------------------------------------------------------- C2
void criterion2_allocator_optimality() {
  auto t0 = std::chrono::steady_clock::now();
  long instances = 0;
  long mismatches = 0;
  for (int len = 1; len <= 4; ++len) {
    std::vector<int> cap(len, 1);
    while (true) {
      // prices are exact multiples of 0.05 so costs compare as integers;
      // the pattern repeats values to exercise tie handling
      std::vector<RegionSpec> regions;
      std::vector<std::size_t> path;
      std::vector<long> price_units(len);
      int free_sum = 0;
      for (int i = 0; i < len; ++i) {
        price_units[i] = 2 + (i * 7 + cap[i]) % 5;
        regions.push_back(
            {"R" + std::to_string(i), cap[i], 0.05 * price_units[i]});
        path.push_back(i);
        free_sum += cap[i];
      }
      auto cluster = make_cluster(regions);
      for (int g = len; g <= std::min(12, free_sum); ++g) {
        auto alloc = cost_min_allocate(path, g, cluster);
        long got = 0;
        int total = 0;
        for (int i = 0; i < len; ++i) {
          got += alloc[i] * price_units[i];
          total += alloc[i];
        }
        // exhaustive minimum over every connectivity-respecting split
        long best = std::numeric_limits<long>::max();
        std::vector<int> n(len);
        auto rec = [&](auto&& self, int i, int rem) -> void {
          if (i + 1 == len) {
            if (rem >= 1 && rem <= cap[i]) {
              n[i] = rem;
              long c = 0;
              for (int k = 0; k < len; ++k) c += n[k] * price_units[k];
              best = std::min(best, c);
            }
            return;
          }
          for (int v = 1; v <= std::min(rem, cap[i]); ++v) {
            n[i] = v;
            self(self, i + 1, rem - v);
          }
        };
        rec(rec, 0, g);
        ++instances;
        if (total != g || got != best) ++mismatches;
      }
      // next capacity vector over [1..6]^len
      int pos = 0;
      while (pos < len && ++cap[pos] > 6) cap[pos++] = 1;
      if (pos == len) break;
    }
  }
  double secs = elapsed_s(t0);
  std::ostringstream d;
  d << instances << " instances, " << mismatches << " mismatches, "
    << std::fixed << secs << " s";
  report(2, "cost-min allocation equals the exhaustive minimum",
         mismatches == 0 && secs < 10.0, d.str());
}

// ---------------------------------------------------------------- C3
void criterion3_gpu_count() {
  auto t0 = std::chrono::steady_clock::now();
  ComputeProfile prof;
  Scenario s = default_scenario();
  int mismatches = 0;
  int cases = 0;
  for (const JobSpec& j : s.jobs) {
    for (int total : {8, 16, 64, 160}) {
      // independent argmin: raw formula, smallest k on ties
      int best = 0;
      double best_v = std::numeric_limits<double>::infinity();
      double plt = per_layer_time(j, prof);
      for (int k = 1; k <= std::min(total, j.model.layers); ++k) {
        double stage = plt * std::ceil(static_cast<double>(j.model.layers) / k);
        double v = 2.0 * (k * stage + (j.micro_batches - 1) * stage);
        if (v < best_v) {
          best_v = v;
          best = k;
        }
      }
      ++cases;
      if (optimal_gpu_count(j, total, prof) != best) ++mismatches;
    }
  }
  double secs = elapsed_s(t0);
  std::ostringstream d;
  d << cases << " cases, " << mismatches << " mismatches, " << std::fixed
    << secs << " s";
  report(3, "optimal GPU count equals brute-force argmin",
         mismatches == 0 && secs < 5.0, d.str());
}

// ---------------------------------------------------------------- C4
void criterion4_iteration_time_fidelity() {
  int mismatches = 0;
  int cases = 0;
  for (int stages = 1; stages <= 8; ++stages) {
    for (int micro = 1; micro <= 8; ++micro) {
      for (double frac : {0.0, 0.3, 0.7, 1.0}) {
        JobSpec j = make_job("j", stages, 4096, 64, micro, 1);
        double plt = 0.25;
        ComputeProfile prof;
        prof.per_layer_time[j.model.name] = plt;
        double comm = frac * plt;
        double intra = comm > 0.0
                           ? 8.0 * static_cast<double>(activation_size(j)) / comm
                           : 1e30;
        auto cluster = make_cluster({{"A", 64, 0.2, 50.0, intra / 1e9}});
        PlacementPlan plan;
        plan.job_id = j.id;
        plan.path = {0};
        plan.alloc = {stages};
        double got = iter_time(j, plan, cluster, prof);
        std::vector<double> stage_times(stages, plt);
        std::vector<double> comms(
            std::max(0, stages - 1),
            comm > 0.0 ? 8.0 * static_cast<double>(activation_size(j)) / intra
                       : 0.0);
        double span = gpipe_forward_makespan(stages, micro, stage_times, comms);
        // the closed form drops the tiny 1e30-fabric residue; compare against
        // the same comm values the plan actually sees
        double expect = 2.0 * span;
        if (comm == 0.0) {
          // fold the negligible residue into the oracle as well
          double residue = 8.0 * static_cast<double>(activation_size(j)) / 1e30;
          std::vector<double> comms2(std::max(0, stages - 1), residue);
          expect = 2.0 * gpipe_forward_makespan(stages, micro, stage_times, comms2);
        }
        ++cases;
        if (std::abs(got - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
          ++mismatches;
      }
    }
  }
  std::ostringstream d;
  d << cases << " grid points, " << mismatches << " beyond 1e-9";
  report(4, "iteration time matches the event-level pipeline schedule",
         mismatches == 0, d.str());
}

// ---------------------------------------------------------------- C5
void criterion5_motivation_direction() {
  Scenario s = motivation_scenario();
  std::map<std::string, SimReport> r;
  for (const auto& name : {"BACE", "BACE-noPriority", "LDF", "LCF"})
    r[name] = run(s, *policy_from_name(name), 0);
  double b = r["BACE"].avg_jct, np = r["BACE-noPriority"].avg_jct,
         ldf = r["LDF"].avg_jct, lcf = r["LCF"].avg_jct;
  bool jct_ok = b < np && np <= ldf && ldf <= lcf;
  bool cost_ok = r["BACE"].total_cost <=
                 std::min(r["LCF"].total_cost, r["LDF"].total_cost);
  std::ostringstream d;
  d << "jct " << format_g9(b) << " < " << format_g9(np) << " <= "
    << format_g9(ldf) << " <= " << format_g9(lcf) << "; cost "
    << format_g9(r["BACE"].total_cost) << " <= min(" << format_g9(r["LCF"].total_cost)
    << ", " << format_g9(r["LDF"].total_cost) << ")";
  report(5, "motivation scenario ordering", jct_ok && cost_ok, d.str());
}

// ---------------------------------------------------------------- C6 & C7
void criterion6_and_7_default_direction() {
  Scenario s = default_scenario();
  std::map<std::string, SimReport> r;
  for (const auto& name : all_policy_names())
    r[name] = run(s, *policy_from_name(name), 0);
  double b_jct = r["BACE"].avg_jct;
  double b_cost = r["BACE"].total_cost;

  {
    bool ok = true;
    std::ostringstream d;
    d << "jct ratios vs BACE:";
    for (const auto& name : {"LCF", "LDF", "CR-LCF", "CR-LDF"}) {
      double ratio = r[name].avg_jct / b_jct;
      d << " " << name << "=" << format_g9(ratio);
      if (!(ratio >= 1.05)) ok = false;
    }
    d << "; cost ratios:";
    for (const auto& name : {"LCF", "LDF", "CR-LCF", "CR-LDF"}) {
      double ratio = r[name].total_cost / b_cost;
      d << " " << name << "=" << format_g9(ratio);
      if (!(r[name].total_cost > b_cost)) ok = false;
    }
    report(6, "fleet scenario: lowest JCT by >=5% and lowest cost", ok, d.str());
  }
  {
    double np = r["BACE-noPriority"].avg_jct;
    double npf = r["BACE-noPathfinder"].avg_jct;
    double ncm = r["BACE-noCostMin"].avg_jct;
    bool le_all = b_jct <= np && b_jct <= npf && b_jct <= ncm;
    bool cost_le = b_cost <= r["BACE-noCostMin"].total_cost;
    bool pf_largest = npf >= np && npf >= ncm;
    std::ostringstream d;
    d << "jct ratios: noPriority=" << format_g9(np / b_jct)
      << " noPathfinder=" << format_g9(npf / b_jct)
      << " noCostMin=" << format_g9(ncm / b_jct)
      << "; cost(noCostMin)/cost=" << format_g9(r["BACE-noCostMin"].total_cost / b_cost);
    report(7, "ablation ordering", le_all && cost_le && pf_largest, d.str());
  }
}

// ---------------------------------------------------------------- C8
void criterion8_cross_region_paradox() {
  Scenario s = default_scenario();
  s.bw_scale = 1.5;
  auto ldf = run(s, *policy_from_name("LDF"), 0);
  auto crldf = run(s, *policy_from_name("CR-LDF"), 0);
  std::ostringstream d;
  d << "avg jct CR-LDF=" << format_g9(crldf.avg_jct) << " vs LDF="
    << format_g9(ldf.avg_jct);
  report(8, "cross-region expansion collapses at 1.5x bandwidth",
         crldf.avg_jct > ldf.avg_jct, d.str());
}

// ---------------------------------------------------------------- C9
void criterion9_determinism() {
  auto t0 = std::chrono::steady_clock::now();
  Scenario s = default_scenario();
  fs::path a = fs::temp_directory_path() / "bacepipe_accept_a";
  fs::path b = fs::temp_directory_path() / "bacepipe_accept_b";
  fs::remove_all(a);
  fs::remove_all(b);

  auto full_sweep = [&](const fs::path& out) {
    for (auto axis : {SweepAxis::Bandwidth, SweepAxis::Gpu, SweepAxis::Jobs}) {
      SweepSpec spec;
      spec.axis = axis;
      spec.values = default_sweep_values(axis);
      auto result = run_sweep(s, spec, 42);
      emit_sweep(out / sweep_axis_name(axis), s, result, 42, "both");
    }
  };
  full_sweep(a);
  full_sweep(b);

  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };
  int files = 0;
  bool identical = true;
  for (auto it = fs::recursive_directory_iterator(a);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    ++files;
    fs::path rel = fs::relative(it->path(), a);
    if (!fs::exists(b / rel) || read(it->path()) != read(b / rel))
      identical = false;
  }
  double secs = elapsed_s(t0);
  std::ostringstream d;
  d << files << " files compared, two full sweeps in " << std::fixed << secs
    << " s";
  report(9, "byte-identical reports and sweep under 60 s",
         identical && files > 0 && secs < 60.0, d.str());
}

}  // namespace

int main() {
  criterion1_constraint_soundness();
  criterion2_allocator_optimality();
  criterion3_gpu_count();
  criterion4_iteration_time_fidelity();
  criterion5_motivation_direction();
  criterion6_and_7_default_direction();
  criterion8_cross_region_paradox();
  criterion9_determinism();
  if (failures)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all criteria passed\n");
  return failures;
}
