#include "bacepipe/priority.hpp"

#include <algorithm>
#include <stdexcept>

#include "bacepipe/cost_model.hpp"

namespace bacepipe {
namespace {

double pending_max(const PriorityContext& ctx,
                   const std::map<std::string, double>& cache) {
  if (ctx.pending.empty()) throw std::invalid_argument("NoPendingJobs");
  double m = 0.0;
  for (const JobSpec* j : ctx.pending) m = std::max(m, cache.at(j->id));
  if (m <= 0.0) throw std::invalid_argument("NoPendingJobs: non-positive maxima");
  return m;
}

}  // namespace

double congestion(const ClusterState& cluster) {
  double cap = cluster.total_link_capacity();
  if (cap <= 0.0) return 0.0;
  return std::clamp(cluster.total_link_reserved() / cap, 0.0, 1.0);
}

PriorityContext make_priority_context(
    const std::vector<const JobSpec*>& pending, const ClusterState& cluster,
    const ComputeProfile& profile, int cluster_total_gpus) {
  PriorityContext ctx;
  ctx.pending = pending;
  ctx.alpha = congestion(cluster);
  for (const JobSpec* j : pending) {
    ctx.e1[j->id] = single_gpu_exec_duration(*j, profile);
    int k_star = optimal_gpu_count(*j, cluster_total_gpus, profile);
    ctx.bandwidth[j->id] = min_bandwidth(*j, k_star, profile);
  }
  return ctx;
}

double intensity(const JobSpec& job, const PriorityContext& ctx) {
  double max = pending_max(ctx, ctx.e1);
  return ctx.e1.at(job.id) / max;
}

double sensitivity(const JobSpec& job, const PriorityContext& ctx) {
  double max = pending_max(ctx, ctx.bandwidth);
  return ctx.bandwidth.at(job.id) / max;
}

double priority_score(const JobSpec& job, const PriorityContext& ctx) {
  return (1.0 - ctx.alpha) * (1.0 - intensity(job, ctx)) +
         ctx.alpha * (1.0 - sensitivity(job, ctx));
}

std::vector<const JobSpec*> order_queue(
    const std::vector<const JobSpec*>& pending, const ClusterState& cluster,
    const ComputeProfile& profile, int cluster_total_gpus) {
  if (pending.empty()) return {};
  PriorityContext ctx =
      make_priority_context(pending, cluster, profile, cluster_total_gpus);
  std::vector<std::pair<double, const JobSpec*>> scored;
  scored.reserve(pending.size());
  for (const JobSpec* j : pending) scored.emplace_back(priority_score(*j, ctx), j);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              if (a.second->submit_time != b.second->submit_time)
                return a.second->submit_time < b.second->submit_time;
              return a.second->id < b.second->id;
            });
  std::vector<const JobSpec*> out;
  out.reserve(scored.size());
  for (auto& [s, j] : scored) out.push_back(j);
  return out;
}

}  // namespace bacepipe
