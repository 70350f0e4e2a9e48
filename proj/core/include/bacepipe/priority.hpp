#pragma once

#include <map>
#include <string>
#include <vector>

#include "bacepipe/topology.hpp"
#include "bacepipe/types.hpp"

namespace bacepipe {

// Inputs for scoring one scheduling round: the pending set (normalization
// domain), the congestion factor, and per-job caches of the single-GPU
// execution estimate and the minimum bandwidth requirement at each job's
// optimal GPU count.
struct PriorityContext {
  std::vector<const JobSpec*> pending;
  double alpha = 0.0;
  std::map<std::string, double> e1;
  std::map<std::string, double> bandwidth;
};

// Fraction of aggregate inter-region link capacity currently reserved,
// clamped to [0,1]. Empty link set yields 0.
double congestion(const ClusterState& cluster);

PriorityContext make_priority_context(
    const std::vector<const JobSpec*>& pending, const ClusterState& cluster,
    const ComputeProfile& profile, int cluster_total_gpus);

// Normalized computation intensity: E(1) over the pending maximum.
double intensity(const JobSpec& job, const PriorityContext& ctx);

// Normalized bandwidth sensitivity: b over the pending maximum.
double sensitivity(const JobSpec& job, const PriorityContext& ctx);

// (1 - alpha) * (1 - intensity) + alpha * (1 - sensitivity); higher first.
double priority_score(const JobSpec& job, const PriorityContext& ctx);

// Pending jobs sorted by descending score; ties by submit time then id.
std::vector<const JobSpec*> order_queue(
    const std::vector<const JobSpec*>& pending, const ClusterState& cluster,
    const ComputeProfile& profile, int cluster_total_gpus);

}  // namespace bacepipe
