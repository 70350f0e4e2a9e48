#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bacepipe/placement.hpp"
#include "bacepipe/scenario.hpp"
#include "bacepipe/types.hpp"

namespace bacepipe {

enum class QueueOrdering { Fcfs, Priority };

struct Policy {
  std::string name;
  QueueOrdering ordering = QueueOrdering::Fcfs;
  PlacerKind placer = PlacerKind::Pathfinder;
};

// Canonical policy set: BACE, the four baselines, and the three ablations.
const std::vector<std::string>& all_policy_names();
std::optional<Policy> policy_from_name(const std::string& name);

struct JobRecord {
  std::string job_id;
  double submit = 0.0;
  double start = 0.0;
  double wait = 0.0;  // start - submit
  double exec = 0.0;  // fixed at admission
  double jct = 0.0;   // wait + exec
  double cost = 0.0;
  PlacementPlan plan;
};

struct ReservationEvent {
  double time = 0.0;
  bool release = false;  // false = reserve
  std::string job_id;
};

struct SimReport {
  std::string policy;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::vector<JobRecord> records;            // scenario job order
  std::vector<ReservationEvent> timeline;    // emission order
  std::map<std::string, double> peak_link_utilization;  // "SRC>DST" -> frac
  double avg_jct = 0.0;
  double total_cost = 0.0;
  bool no_jobs = false;  // avg_jct reported as 0 for an empty job list
};

// Deterministic discrete-event run. The seed only affects job-count
// expansion; the scheduling path itself is seed-free.
SimReport run(const Scenario& scenario, const Policy& policy,
              std::uint64_t seed);

// (average JCT, total cost), compensated summation.
std::pair<double, double> objectives(const SimReport& report);

// Replays the report timeline against a fresh cluster built from the
// scenario and re-checks every capacity and accounting identity at every
// event instant. Returns human-readable violations; empty means clean.
std::vector<std::string> verify_invariants(const SimReport& report,
                                           const Scenario& scenario);

}  // namespace bacepipe
