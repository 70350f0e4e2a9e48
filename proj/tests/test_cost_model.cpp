#include <doctest.h>

#include <cmath>

#include "bacepipe/cost_model.hpp"
#include "bacepipe/scenario.hpp"
#include "gpipe_oracle.hpp"
#include "support.hpp"

using namespace bacepipe;
using namespace bacepipe::testing;

namespace {

ComputeProfile pinned(const JobSpec& job, double plt) {
  ComputeProfile p;
  p.per_layer_time[job.model.name] = plt;
  return p;
}

PlacementPlan single_region_plan(const JobSpec& job, int gpus,
                                 std::size_t region = 0) {
  PlacementPlan p;
  p.job_id = job.id;
  p.path = {region};
  p.alloc = {gpus};
  return p;
}

}  // namespace

TEST_CASE("activation size") {
  SUBCASE("unit case") {
    JobSpec j = make_job("j", 1, 1, 1, 1, 1);
    j.model.seq_len = 1;
    j.model.bytes_per_elem = 1;
    CHECK(activation_size(j) == 1);
  }
  SUBCASE("batch 128 over 16 micro-batches, 2048x8192, fp16") {
    JobSpec j = make_job("j", 80, 8192, 128, 16, 1);
    CHECK(micro_batch_size(j) == 8);
    CHECK(activation_size(j) == 268435456);
  }
  SUBCASE("doubling micro-batches halves the tensor") {
    JobSpec j = make_job("j", 80, 8192, 128, 16, 1);
    JobSpec k = j;
    k.micro_batches = 32;
    CHECK(activation_size(j) == 2 * activation_size(k));
  }
}

TEST_CASE("per-micro-batch compute time") {
  JobSpec j = make_job("j", 80, 8192, 128, 16, 1);
  auto prof = pinned(j, 0.5);
  CHECK(comp_time(j, 80, prof) == doctest::Approx(0.5));
  CHECK(comp_time(j, 1, prof) == doctest::Approx(80 * 0.5));
  CHECK(comp_time(j, 3, prof) == doctest::Approx(27 * 0.5));  // ceil(80/3)
  CHECK_THROWS_AS(comp_time(j, 81, prof), std::invalid_argument);
  CHECK_THROWS_AS(comp_time(j, 0, prof), std::invalid_argument);
}

TEST_CASE("comp_time is non-increasing in the stage count") {
  JobSpec j = make_job("j", 62, 5376, 256, 32, 1);
  ComputeProfile prof;
  double prev = comp_time(j, 1, prof);
  for (int k = 2; k <= j.model.layers; ++k) {
    double cur = comp_time(j, k, prof);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
  CHECK(comp_time(j, j.model.layers, prof) ==
        doctest::Approx(per_layer_time(j, prof)));
}

TEST_CASE("minimum bandwidth requirement") {
  SUBCASE("one byte per compute-second needs eight bits per second") {
    JobSpec j = make_job("j", 1, 1, 1, 1, 1);
    j.model.seq_len = 1;
    j.model.bytes_per_elem = 1;
    auto prof = pinned(j, 1.0);
    CHECK(min_bandwidth(j, 1, prof) == doctest::Approx(8.0));
  }
  SUBCASE("doubling stages on a divisible model doubles the requirement") {
    JobSpec j = make_job("j", 64, 5120, 256, 32, 1);
    ComputeProfile prof;
    CHECK(min_bandwidth(j, 32, prof) ==
          doctest::Approx(2.0 * min_bandwidth(j, 16, prof)));
  }
  SUBCASE("formula agrees with a step-by-step evaluation to 1e-12") {
    JobSpec j = make_job("j", 80, 8192, 128, 16, 1);
    ComputeProfile prof;
    double a = static_cast<double>(micro_batch_size(j)) * j.model.seq_len *
               j.model.hidden * j.model.bytes_per_elem;
    double flops = static_cast<double>(micro_batch_size(j)) * j.model.seq_len *
                   (24.0 * j.model.hidden * static_cast<double>(j.model.hidden) +
                    4.0 * j.model.seq_len * static_cast<double>(j.model.hidden));
    double plt = prof.calibration * flops / prof.peak_flops;
    double expect = 8.0 * a / (plt * std::ceil(80.0 / 16.0));
    CHECK(min_bandwidth(j, 16, prof) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("definitional identity b * t_comp = 8A") {
    ComputeProfile prof;
    for (int layers : {40, 48, 62, 80}) {
      JobSpec j = make_job("j", layers, 5120, 256, 32, 1);
      for (int k = 1; k <= layers; k += 7) {
        double lhs = min_bandwidth(j, k, prof) * comp_time(j, k, prof);
        double rhs = 8.0 * static_cast<double>(activation_size(j));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("boundary communication times along a plan") {
  auto cluster = make_cluster({{"A", 8, 0.2, 50.0, 100.0},
                               {"B", 8, 0.3, 90.0, 100.0}});
  JobSpec j = make_job("j", 8, 4096, 64, 8, 1);
  auto prof = pinned(j, 0.25);

  SUBCASE("single-region plan has identical intra times") {
    auto plan = single_region_plan(j, 4);
    auto comms = boundary_comm_times(j, plan, cluster, prof);
    REQUIRE(comms.size() == 3);
    for (double c : comms) CHECK(c == doctest::Approx(comms[0]));
  }
  SUBCASE("one GPU means no boundaries") {
    auto plan = single_region_plan(j, 1);
    CHECK(boundary_comm_times(j, plan, cluster, prof).empty());
  }
  SUBCASE("two-region split pins the crossing to compute time") {
    PlacementPlan plan;
    plan.job_id = j.id;
    plan.path = {0, 1};
    plan.alloc = {2, 2};
    plan.bandwidth_reserved = min_bandwidth(j, 4, prof);
    auto comms = boundary_comm_times(j, plan, cluster, prof);
    REQUIRE(comms.size() == 3);
    double intra = 8.0 * activation_size(j) / 100e9;
    CHECK(comms[0] == doctest::Approx(intra));
    CHECK(comms[1] == comp_time(j, 4, prof));  // exact by construction
    CHECK(comms[2] == doctest::Approx(intra));
  }
  SUBCASE("malformed plans are rejected") {
    PlacementPlan bad;
    bad.job_id = j.id;
    bad.path = {0, 0};
    bad.alloc = {1, 1};
    bad.bandwidth_reserved = 1.0;
    CHECK_THROWS_AS(boundary_comm_times(j, bad, cluster, prof),
                    std::invalid_argument);
  }
}

TEST_CASE("bottleneck stage duration") {
  JobSpec j = make_job("j", 8, 4096, 64, 8, 1);
  auto prof = pinned(j, 0.25);
  SUBCASE("compute-bound") {
    auto cluster = make_cluster({{"A", 8, 0.2, 50.0, 100.0}});
    auto plan = single_region_plan(j, 4);
    CHECK(bottleneck(j, plan, cluster, prof) == doctest::Approx(comp_time(j, 4, prof)));
  }
  SUBCASE("a boundary at twice compute dominates") {
    // pick the intra fabric so one hop costs exactly 2 * t_comp(4)
    double t = 0.25 * 2;  // ceil(8/4) = 2 layers per stage
    double intra = 8.0 * activation_size(j) / (2.0 * t);
    auto cluster = make_cluster({{"A", 8, 0.2, 50.0, intra / 1e9}});
    auto plan = single_region_plan(j, 4);
    CHECK(bottleneck(j, plan, cluster, prof) == doctest::Approx(2.0 * t));
  }
  SUBCASE("cross-region plan is pinned to compute exactly") {
    auto cluster = make_cluster({{"A", 8, 0.2, 50.0, 100.0},
                                 {"B", 8, 0.3, 90.0, 100.0}});
    PlacementPlan plan;
    plan.job_id = j.id;
    plan.path = {0, 1};
    plan.alloc = {2, 2};
    plan.bandwidth_reserved = min_bandwidth(j, 4, prof);
    CHECK(bottleneck(j, plan, cluster, prof) == comp_time(j, 4, prof));
  }
}

TEST_CASE("iteration time") {
  auto cluster = make_cluster({{"A", 16, 0.2, 50.0, 1e12}});  // negligible intra
  SUBCASE("one stage, one micro-batch collapses to twice compute") {
    JobSpec j = make_job("j", 4, 4096, 8, 1, 1);
    auto prof = pinned(j, 0.5);
    auto plan = single_region_plan(j, 1);
    CHECK(iter_time(j, plan, cluster, prof) ==
          doctest::Approx(2.0 * comp_time(j, 1, prof)));
  }
  SUBCASE("four stages, four micro-batches, zero comm") {
    JobSpec j = make_job("j", 4, 4096, 8, 4, 1);
    auto prof = pinned(j, 0.5);
    auto plan = single_region_plan(j, 4);
    CHECK(iter_time(j, plan, cluster, prof) ==
          doctest::Approx(14.0 * 0.5).epsilon(1e-9));
  }
  SUBCASE("uniform comm below compute matches the event-level schedule") {
    JobSpec j = make_job("j", 4, 4096, 8, 4, 1);
    double plt = 0.5;
    auto prof = pinned(j, plt);
    double c = 0.2;  // boundary time, below compute
    double intra = 8.0 * activation_size(j) / c;
    auto cl = make_cluster({{"A", 16, 0.2, 50.0, intra / 1e9}});
    auto plan = single_region_plan(j, 4);
    double got = iter_time(j, plan, cl, prof);
    double comm = 8.0 * activation_size(j) / intra;
    CHECK(got == doctest::Approx(2.0 * (3 * comm + 4 * plt + 3 * plt)).epsilon(1e-12));
    double span = gpipe_forward_makespan(4, 4, {plt, plt, plt, plt},
                                         {comm, comm, comm});
    CHECK(got == doctest::Approx(2.0 * span).epsilon(1e-9));
  }
}

TEST_CASE("execution duration") {
  auto cluster = make_cluster({{"A", 16, 0.2, 50.0, 1e12}});
  SUBCASE("one iteration equals one iteration time") {
    JobSpec j = make_job("j", 4, 4096, 8, 2, 1);
    auto prof = pinned(j, 0.5);
    auto plan = single_region_plan(j, 4);
    CHECK(exec_duration(j, plan, cluster, prof) ==
          doctest::Approx(iter_time(j, plan, cluster, prof)));
  }
  SUBCASE("zero iterations violates the precondition") {
    JobSpec j = make_job("j", 4, 4096, 8, 2, 1);
    j.iterations = 0;
    auto prof = pinned(j, 0.5);
    auto plan = single_region_plan(j, 4);
    CHECK_THROWS_AS(exec_duration(j, plan, cluster, prof), std::invalid_argument);
  }
  SUBCASE("one epoch of a 52k-sample dataset at batch 128 is 407 iterations") {
    Scenario s = default_scenario();
    const JobSpec& j1 = s.jobs[0];
    CHECK(j1.dataset == "alpaca-52k");
    CHECK(j1.iterations == 407);
    auto plan = single_region_plan(j1, 8);
    ComputeProfile prof;
    auto cl = build_cluster(s);
    CHECK(exec_duration(j1, plan, cl, prof) ==
          doctest::Approx(407.0 * iter_time(j1, plan, cl, prof)));
  }
}

TEST_CASE("electricity cost") {
  auto cluster = make_cluster({{"A", 16, 0.156, 50.0},
                               {"B", 16, 0.3, 90.0}});
  JobSpec j = make_job("j", 8, 4096, 64, 8, 1);
  ComputeProfile prof;  // 300 W default
  SUBCASE("zero execution costs nothing") {
    auto plan = single_region_plan(j, 4);
    CHECK(job_cost(j, plan, 0.0, cluster, prof) == 0.0);
  }
  SUBCASE("one GPU for one hour at 0.156 $/kWh and 300 W") {
    auto plan = single_region_plan(j, 1);
    CHECK(job_cost(j, plan, 3600.0, cluster, prof) ==
          doctest::Approx(0.0468).epsilon(1e-12));
  }
  SUBCASE("bilinear in execution time and GPU counts") {
    auto plan = single_region_plan(j, 2);
    double base = job_cost(j, plan, 100.0, cluster, prof);
    CHECK(job_cost(j, plan, 200.0, cluster, prof) == doctest::Approx(2 * base));
    auto plan4 = single_region_plan(j, 4);
    CHECK(job_cost(j, plan4, 100.0, cluster, prof) == doctest::Approx(2 * base));
  }
  SUBCASE("additive across split execution spans") {
    auto plan = single_region_plan(j, 3);
    double whole = job_cost(j, plan, 777.0, cluster, prof);
    double split = job_cost(j, plan, 300.0, cluster, prof) +
                   job_cost(j, plan, 477.0, cluster, prof);
    CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  }
}

TEST_CASE("optimal GPU count") {
  ComputeProfile prof;
  SUBCASE("single-layer model always gets one GPU") {
    JobSpec j = make_job("j", 1, 4096, 8, 4, 1);
    CHECK(optimal_gpu_count(j, 64, prof) == 1);
  }
  SUBCASE("strictly decreasing iteration time saturates the domain") {
    JobSpec j = make_job("j", 2, 4096, 64, 8, 1);
    CHECK(optimal_gpu_count(j, 2, prof) == 2);  // min(cluster, layers)
  }
  SUBCASE("matches a brute-force scan for every fleet model") {
    Scenario s = default_scenario();
    for (const JobSpec& j : s.jobs) {
      for (int total : {8, 16, 64, 160, 336}) {
        int best = 1;
        double best_v = ideal_iter_time(j, 1, prof);
        for (int k = 2; k <= std::min(total, j.model.layers); ++k) {
          double v = ideal_iter_time(j, k, prof);
          if (v < best_v) {
            best_v = v;
            best = k;
          }
        }
        CHECK(optimal_gpu_count(j, total, prof) == best);
      }
    }
  }
}
