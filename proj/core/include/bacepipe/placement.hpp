#pragma once

#include <optional>
#include <vector>

#include "bacepipe/topology.hpp"
#include "bacepipe/types.hpp"

namespace bacepipe {

enum class PlacerKind {
  Pathfinder,         // bandwidth-aware path construction + cost-min allocator
  PathfinderUniform,  // same search, uniform surplus distribution
  Lcf,
  Ldf,
  CrLcf,
  CrLdf,
};

// Minimum-cost GPU split over a fixed path: 1 GPU per region for pipeline
// connectivity, surplus to regions by ascending electricity price, capped by
// residual free capacity. Exact for the linear cost objective.
std::vector<int> cost_min_allocate(const std::vector<std::size_t>& path, int g,
                                   const ClusterState& cluster);

// Ablation allocator: 1 GPU per region, surplus round-robin in path order,
// capped by residual free capacity.
std::vector<int> uniform_allocate(const std::vector<std::size_t>& path, int g,
                                  const ClusterState& cluster);

struct PathCandidate {
  PlacementPlan plan;
  double avg_price = 0.0;  // sum(alloc * price) / total_gpus
  std::size_t seed = 0;    // starting region of the greedy expansion
};

// All candidate plans the pathfinder explores (one per viable seed region,
// or the single-region shortcut when some region fits k_star outright).
std::vector<PathCandidate> find_path_candidates(const JobSpec& job,
                                                const ClusterState& cluster,
                                                int k_star,
                                                const ComputeProfile& profile,
                                                bool uniform_surplus = false);

// Bandwidth-aware pathfinder. Phase 1 places whole jobs in the cheapest
// region that fits k_star; otherwise greedy highest-residual-bandwidth path
// expansion from every seed, keeping the candidate with the most GPUs
// (ties: lowest average electricity price). Returns nullopt only when no
// region has a free GPU.
std::optional<PlacementPlan> find_path(const JobSpec& job,
                                       const ClusterState& cluster, int k_star,
                                       const ComputeProfile& profile,
                                       bool uniform_surplus = false);

// Single-region baselines.
std::optional<PlacementPlan> place_lcf(const JobSpec& job,
                                       const ClusterState& cluster, int k_star,
                                       const ComputeProfile& profile);
std::optional<PlacementPlan> place_ldf(const JobSpec& job,
                                       const ClusterState& cluster, int k_star,
                                       const ComputeProfile& profile);

// Cross-region baselines: aggregate by ascending price / by greedy
// highest-bandwidth chaining from the largest region; infeasible extensions
// are skipped, regions fill to free capacity in visit order.
std::optional<PlacementPlan> place_cr_lcf(const JobSpec& job,
                                          const ClusterState& cluster,
                                          int k_star,
                                          const ComputeProfile& profile);
std::optional<PlacementPlan> place_cr_ldf(const JobSpec& job,
                                          const ClusterState& cluster,
                                          int k_star,
                                          const ComputeProfile& profile);

std::optional<PlacementPlan> place(PlacerKind kind, const JobSpec& job,
                                   const ClusterState& cluster, int k_star,
                                   const ComputeProfile& profile);

}  // namespace bacepipe
