#pragma once

#include <cstdint>
#include <vector>

#include "bacepipe/topology.hpp"
#include "bacepipe/types.hpp"

namespace bacepipe {

// Sequences per micro-batch: ceil(batch_size / micro_batches).
int micro_batch_size(const JobSpec& job);

// Activation/gradient tensor size exchanged between adjacent stages, bytes.
std::int64_t activation_size(const JobSpec& job);

// Forward compute time for one micro-batch on one transformer layer.
// Pinned per model via the profile, otherwise derived from the analytic
// FLOP model: calibration * mbs * seq * (24 h^2 + 4 seq h) / peak_flops.
double per_layer_time(const JobSpec& job, const ComputeProfile& profile);

// Per micro-batch compute time of the slowest stage when the model is split
// into `stages` layer-balanced stages. Domain: 1 <= stages <= layers.
double comp_time(const JobSpec& job, int stages, const ComputeProfile& profile);

// Link rate below which communication, not compute, bottlenecks the
// pipeline: 8 * activation_size / comp_time. bits/s.
double min_bandwidth(const JobSpec& job, int stages, const ComputeProfile& profile);

// Per-boundary communication times along a concrete plan, length L-1.
// Same-region boundaries ride the region's intra fabric; cross-region
// boundaries run at the reserved rate, which pins them to comp_time.
std::vector<double> boundary_comm_times(const JobSpec& job,
                                        const PlacementPlan& plan,
                                        const ClusterState& cluster,
                                        const ComputeProfile& profile);

// Bottleneck stage duration: max of compute and every boundary time.
double bottleneck(const JobSpec& job, const PlacementPlan& plan,
                  const ClusterState& cluster, const ComputeProfile& profile);

// One training iteration on a concrete plan:
//   (sum of boundary comms + L * comp + (M-1) * bottleneck) * 2.
double iter_time(const JobSpec& job, const PlacementPlan& plan,
                 const ClusterState& cluster, const ComputeProfile& profile);

double exec_duration(const JobSpec& job, const PlacementPlan& plan,
                     const ClusterState& cluster, const ComputeProfile& profile);

// Electricity cost over an execution span: exec * sum_r alloc_r * price_r,
// with $/kWh converted through gpu_power to $/GPU-second.
double job_cost(const JobSpec& job, const PlacementPlan& plan,
                double exec_seconds, const ClusterState& cluster,
                const ComputeProfile& profile);

// Iteration time of an idealized k-GPU single-region plan with zero
// communication; the objective scanned by optimal_gpu_count.
double ideal_iter_time(const JobSpec& job, int k, const ComputeProfile& profile);

// argmin of ideal_iter_time over k in [1, min(cluster_total, layers)],
// ties broken toward smaller k.
int optimal_gpu_count(const JobSpec& job, int cluster_total,
                      const ComputeProfile& profile);

// Estimated execution duration on a single GPU, used for priority scoring.
double single_gpu_exec_duration(const JobSpec& job, const ComputeProfile& profile);

}  // namespace bacepipe
