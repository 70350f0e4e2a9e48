#include "bacepipe/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "bacepipe/numeric.hpp"

namespace bacepipe {
namespace {

void check_plan(const JobSpec& job, const PlacementPlan& plan,
                const ClusterState& cluster) {
  if (plan.path.empty() || plan.path.size() != plan.alloc.size())
    throw std::invalid_argument("MalformedPlan: path/alloc mismatch");
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < plan.path.size(); ++i) {
    if (plan.path[i] >= cluster.regions().size())
      throw std::invalid_argument("MalformedPlan: region index out of range");
    if (!seen.insert(plan.path[i]).second)
      throw std::invalid_argument("MalformedPlan: repeated region on path");
    if (plan.alloc[i] < 1)
      throw std::invalid_argument("MalformedPlan: allocation below 1");
  }
  if (plan.path.size() > 1 && plan.bandwidth_reserved <= 0.0)
    throw std::invalid_argument("MalformedPlan: multi-region plan without reservation");
  (void)job;
}

}  // namespace

int micro_batch_size(const JobSpec& job) {
  return static_cast<int>(ceil_div(job.model.batch_size, job.micro_batches));
}

std::int64_t activation_size(const JobSpec& job) {
  return static_cast<std::int64_t>(micro_batch_size(job)) * job.model.seq_len *
         job.model.hidden * job.model.bytes_per_elem;
}

double per_layer_time(const JobSpec& job, const ComputeProfile& profile) {
  if (auto it = profile.per_layer_time.find(job.model.name);
      it != profile.per_layer_time.end())
    return it->second;
  const ModelConfig& m = job.model;
  double flops = static_cast<double>(micro_batch_size(job)) * m.seq_len *
                 (24.0 * static_cast<double>(m.hidden) * m.hidden +
                  4.0 * static_cast<double>(m.seq_len) * m.hidden);
  return profile.calibration * flops / profile.peak_flops;
}

double comp_time(const JobSpec& job, int stages, const ComputeProfile& profile) {
  if (stages < 1 || stages > job.model.layers)
    throw std::invalid_argument("InvalidStageCount: stages must be in [1, layers]");
  return per_layer_time(job, profile) *
         static_cast<double>(ceil_div(job.model.layers, stages));
}

double min_bandwidth(const JobSpec& job, int stages, const ComputeProfile& profile) {
  return 8.0 * static_cast<double>(activation_size(job)) /
         comp_time(job, stages, profile);
}

std::vector<double> boundary_comm_times(const JobSpec& job,
                                        const PlacementPlan& plan,
                                        const ClusterState& cluster,
                                        const ComputeProfile& profile) {
  check_plan(job, plan, cluster);
  int total = plan.total_gpus();
  double cross = plan.path.size() > 1 ? comp_time(job, total, profile) : 0.0;
  double bits = 8.0 * static_cast<double>(activation_size(job));

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(total) - 1);
  for (std::size_t i = 0; i < plan.path.size(); ++i) {
    double intra = bits / cluster.regions()[plan.path[i]].intra_bandwidth;
    for (int s = 0; s + 1 < plan.alloc[i]; ++s) out.push_back(intra);
    if (i + 1 < plan.path.size()) out.push_back(cross);
  }
  return out;
}

double bottleneck(const JobSpec& job, const PlacementPlan& plan,
                  const ClusterState& cluster, const ComputeProfile& profile) {
  double delta = comp_time(job, plan.total_gpus(), profile);
  for (double c : boundary_comm_times(job, plan, cluster, profile))
    delta = std::max(delta, c);
  return delta;
}

double iter_time(const JobSpec& job, const PlacementPlan& plan,
                 const ClusterState& cluster, const ComputeProfile& profile) {
  int total = plan.total_gpus();
  double comp = comp_time(job, total, profile);
  double comm_sum = 0.0;
  double delta = comp;
  for (double c : boundary_comm_times(job, plan, cluster, profile)) {
    comm_sum += c;
    delta = std::max(delta, c);
  }
  return 2.0 * (comm_sum + total * comp + (job.micro_batches - 1) * delta);
}

double exec_duration(const JobSpec& job, const PlacementPlan& plan,
                     const ClusterState& cluster, const ComputeProfile& profile) {
  if (job.iterations < 1)
    throw std::invalid_argument("exec_duration: iterations must be >= 1");
  return static_cast<double>(job.iterations) *
         iter_time(job, plan, cluster, profile);
}

double job_cost(const JobSpec& job, const PlacementPlan& plan,
                double exec_seconds, const ClusterState& cluster,
                const ComputeProfile& profile) {
  if (exec_seconds < 0.0)
    throw std::invalid_argument("job_cost: negative execution duration");
  check_plan(job, plan, cluster);
  double per_second = 0.0;  // $/s across all allocated GPUs
  for (std::size_t i = 0; i < plan.path.size(); ++i)
    per_second += plan.alloc[i] *
                  cluster.regions()[plan.path[i]].elec_price *
                  profile.gpu_power / 3.6e6;
  return exec_seconds * per_second;
}

double ideal_iter_time(const JobSpec& job, int k, const ComputeProfile& profile) {
  double comp = comp_time(job, k, profile);
  return 2.0 * (k * comp + (job.micro_batches - 1) * comp);
}

int optimal_gpu_count(const JobSpec& job, int cluster_total,
                      const ComputeProfile& profile) {
  if (cluster_total < 1)
    throw std::invalid_argument("optimal_gpu_count: cluster_total must be >= 1");
  int hi = std::min(cluster_total, job.model.layers);
  int best = 1;
  double best_v = ideal_iter_time(job, 1, profile);
  for (int k = 2; k <= hi; ++k) {
    double v = ideal_iter_time(job, k, profile);
    if (v < best_v) {
      best = k;
      best_v = v;
    }
  }
  return best;
}

double single_gpu_exec_duration(const JobSpec& job, const ComputeProfile& profile) {
  return static_cast<double>(job.iterations) * ideal_iter_time(job, 1, profile);
}

}  // namespace bacepipe
