#include "bacepipe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bacepipe/cost_model.hpp"
#include "bacepipe/numeric.hpp"
#include "bacepipe/priority.hpp"
#include "bacepipe/report.hpp"

namespace bacepipe {
namespace {

struct Completion {
  double time;
  std::string job_id;
  bool operator<(const Completion& o) const {
    if (time != o.time) return time < o.time;
    return job_id < o.job_id;
  }
};

std::string link_key(const ClusterState& cluster, std::size_t u, std::size_t v) {
  return cluster.regions()[u].id + ">" + cluster.regions()[v].id;
}

}  // namespace

const std::vector<std::string>& all_policy_names() {
  static const std::vector<std::string> names = {
      "BACE",   "LCF",   "LDF",   "CR-LCF", "CR-LDF",
      "BACE-noPriority", "BACE-noPathfinder", "BACE-noCostMin"};
  return names;
}

std::optional<Policy> policy_from_name(const std::string& name) {
  if (name == "BACE") return Policy{name, QueueOrdering::Priority, PlacerKind::Pathfinder};
  if (name == "LCF") return Policy{name, QueueOrdering::Fcfs, PlacerKind::Lcf};
  if (name == "LDF") return Policy{name, QueueOrdering::Fcfs, PlacerKind::Ldf};
  if (name == "CR-LCF") return Policy{name, QueueOrdering::Fcfs, PlacerKind::CrLcf};
  if (name == "CR-LDF") return Policy{name, QueueOrdering::Fcfs, PlacerKind::CrLdf};
  if (name == "BACE-noPriority")
    return Policy{name, QueueOrdering::Fcfs, PlacerKind::Pathfinder};
  if (name == "BACE-noPathfinder")
    return Policy{name, QueueOrdering::Priority, PlacerKind::CrLdf};
  if (name == "BACE-noCostMin")
    return Policy{name, QueueOrdering::Priority, PlacerKind::PathfinderUniform};
  return std::nullopt;
}

SimReport run(const Scenario& scenario, const Policy& policy,
              std::uint64_t seed) {
  Scenario resolved = resolve(scenario, seed);
  ClusterState cluster = build_cluster(resolved);
  const ComputeProfile& profile = resolved.profile;
  int total_capacity = cluster.total_gpu_capacity();

  SimReport report;
  report.policy = policy.name;
  report.seed = seed;
  report.scenario_hash = scenario_hash(resolved);
  if (resolved.jobs.empty()) {
    report.no_jobs = true;
    return report;
  }

  std::map<std::string, int> k_star;
  for (const JobSpec& j : resolved.jobs)
    k_star[j.id] = optimal_gpu_count(j, total_capacity, profile);

  std::vector<const JobSpec*> not_submitted;
  for (const JobSpec& j : resolved.jobs) not_submitted.push_back(&j);
  std::sort(not_submitted.begin(), not_submitted.end(),
            [](const JobSpec* a, const JobSpec* b) {
              if (a->submit_time != b->submit_time)
                return a->submit_time < b->submit_time;
              return a->id < b->id;
            });

  std::vector<const JobSpec*> pending;
  std::vector<Completion> completions;
  std::map<std::string, JobRecord> done;

  auto note_peaks = [&](const PlacementPlan& plan) {
    for (auto [u, v] : plan.links()) {
      double util = cluster.link_reserved(u, v) / cluster.link_capacity(u, v);
      std::string key = link_key(cluster, u, v);
      auto it = report.peak_link_utilization.find(key);
      if (it == report.peak_link_utilization.end() || it->second < util)
        report.peak_link_utilization[key] = util;
    }
  };

  while (!not_submitted.empty() || !pending.empty() || !completions.empty()) {
    double now = std::numeric_limits<double>::infinity();
    for (const Completion& c : completions) now = std::min(now, c.time);
    if (!not_submitted.empty())
      now = std::min(now, not_submitted.front()->submit_time);
    if (!std::isfinite(now)) {
      std::ostringstream msg;
      msg << "InfeasibleScenario: jobs pending on an idle cluster:";
      for (const JobSpec* j : pending) msg << " " << j->id;
      throw InfeasibleScenario(msg.str());
    }

    // completions first, then submissions, ties by job id
    std::vector<Completion> due;
    for (const Completion& c : completions)
      if (c.time == now) due.push_back(c);
    std::sort(due.begin(), due.end());
    completions.erase(std::remove_if(completions.begin(), completions.end(),
                                     [&](const Completion& c) { return c.time == now; }),
                      completions.end());
    for (const Completion& c : due) {
      cluster.release(c.job_id);
      report.timeline.push_back({now, true, c.job_id});
    }
    while (!not_submitted.empty() && not_submitted.front()->submit_time == now) {
      pending.push_back(not_submitted.front());
      not_submitted.erase(not_submitted.begin());
    }
    if (pending.empty()) continue;

    std::vector<const JobSpec*> queue;
    if (policy.ordering == QueueOrdering::Priority) {
      queue = order_queue(pending, cluster, profile, total_capacity);
    } else {
      queue = pending;
      std::sort(queue.begin(), queue.end(),
                [](const JobSpec* a, const JobSpec* b) {
                  if (a->submit_time != b->submit_time)
                    return a->submit_time < b->submit_time;
                  return a->id < b->id;
                });
    }

    bool placed_any = false;
    for (const JobSpec* job : queue) {
      auto plan = place(policy.placer, *job, cluster, k_star[job->id], profile);
      if (!plan) {
        if (resolved.strict_blocking) break;
        continue;
      }
      if (cluster.try_reserve(*plan) != ClusterState::Admission::Admitted) {
        if (resolved.strict_blocking) break;
        continue;
      }
      note_peaks(*plan);
      double exec = exec_duration(*job, *plan, cluster, profile);
      JobRecord rec;
      rec.job_id = job->id;
      rec.submit = job->submit_time;
      rec.start = now;
      rec.wait = now - job->submit_time;
      rec.exec = exec;
      rec.jct = rec.wait + rec.exec;
      rec.cost = job_cost(*job, *plan, exec, cluster, profile);
      rec.plan = *plan;
      done[job->id] = std::move(rec);
      completions.push_back({now + exec, job->id});
      report.timeline.push_back({now, false, job->id});
      pending.erase(std::find(pending.begin(), pending.end(), job));
      placed_any = true;
    }

    if (!placed_any && completions.empty() && not_submitted.empty() &&
        !pending.empty()) {
      std::ostringstream msg;
      msg << "InfeasibleScenario: no pending job can be placed on an idle cluster:";
      for (const JobSpec* j : pending) msg << " " << j->id;
      throw InfeasibleScenario(msg.str());
    }
  }

  CompensatedSum jct_sum, cost_sum;
  for (const JobSpec& j : resolved.jobs) {
    report.records.push_back(done.at(j.id));
    jct_sum.add(report.records.back().jct);
    cost_sum.add(report.records.back().cost);
  }
  report.avg_jct = jct_sum.value() / static_cast<double>(report.records.size());
  report.total_cost = cost_sum.value();
  return report;
}

std::pair<double, double> objectives(const SimReport& report) {
  if (report.records.empty()) return {0.0, 0.0};
  CompensatedSum jct_sum, cost_sum;
  for (const JobRecord& r : report.records) {
    jct_sum.add(r.jct);
    cost_sum.add(r.cost);
  }
  return {jct_sum.value() / static_cast<double>(report.records.size()),
          cost_sum.value()};
}

std::vector<std::string> verify_invariants(const SimReport& report,
                                           const Scenario& scenario) {
  std::vector<std::string> violations;
  auto fail = [&](const std::string& msg) { violations.push_back(msg); };

  Scenario resolved = resolve(scenario, report.seed);
  ClusterState cluster = build_cluster(resolved);

  std::map<std::string, const JobRecord*> by_id;
  for (const JobRecord& r : report.records) by_id[r.job_id] = &r;

  // identities hold exactly in-memory; replayed reports carry 9-digit
  // rounding from serialization, so compare with a matching tolerance
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-7 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  };
  for (const JobRecord& r : report.records) {
    if (r.wait < 0) fail("job " + r.job_id + ": negative wait");
    if (r.exec <= 0) fail("job " + r.job_id + ": non-positive exec");
    if (r.cost < 0) fail("job " + r.job_id + ": negative cost");
    if (!close(r.jct, r.wait + r.exec))
      fail("job " + r.job_id + ": jct != wait + exec");
    if (!close(r.start, r.submit + r.wait))
      fail("job " + r.job_id + ": start != submit + wait");
  }

  double last = -std::numeric_limits<double>::infinity();
  for (const ReservationEvent& ev : report.timeline) {
    if (ev.time < last) {
      fail("timeline: events out of order");
      break;
    }
    last = ev.time;
    auto it = by_id.find(ev.job_id);
    if (it == by_id.end()) {
      fail("timeline: unknown job " + ev.job_id);
      continue;
    }
    const JobRecord& rec = *it->second;
    if (ev.release) {
      if (!close(ev.time, rec.start + rec.exec))
        fail("job " + ev.job_id + ": release not at start + exec");
      if (!cluster.release(ev.job_id))
        fail("job " + ev.job_id + ": released while not active");
    } else {
      if (!close(ev.time, rec.start))
        fail("job " + ev.job_id + ": reserve event not at recorded start");
      if (cluster.try_reserve(rec.plan) != ClusterState::Admission::Admitted)
        fail("job " + ev.job_id + ": plan infeasible at admission instant");
    }
    try {
      cluster.check_invariants();
    } catch (const std::exception& e) {
      fail(std::string("invariant failure after event: ") + e.what());
    }
  }
  return violations;
}

}  // namespace bacepipe
