#include "bacepipe/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bacepipe/cost_model.hpp"

namespace bacepipe {
namespace {

int clamp_kstar(const JobSpec& job, int k_star) {
  return std::max(1, std::min(k_star, job.model.layers));
}

void check_alloc_pre(const std::vector<std::size_t>& path, int g,
                     const ClusterState& cluster) {
  if (path.empty() || g < static_cast<int>(path.size()))
    throw std::invalid_argument("InfeasibleAllocation: g below path length");
  int free_sum = 0;
  for (std::size_t r : path) {
    if (r >= cluster.regions().size())
      throw std::invalid_argument("InfeasibleAllocation: region out of range");
    int f = cluster.regions()[r].gpu_free;
    if (f < 1)
      throw std::invalid_argument("InfeasibleAllocation: region without free GPUs on path");
    free_sum += f;
  }
  if (free_sum < g)
    throw std::invalid_argument("InfeasibleAllocation: path cannot host g GPUs");
}

PlacementPlan make_plan(const JobSpec& job, std::vector<std::size_t> path,
                        std::vector<int> alloc, const ComputeProfile& profile) {
  PlacementPlan plan;
  plan.job_id = job.id;
  plan.path = std::move(path);
  plan.alloc = std::move(alloc);
  plan.bandwidth_reserved =
      plan.path.size() > 1 ? min_bandwidth(job, plan.total_gpus(), profile) : 0.0;
  return plan;
}

double avg_price(const std::vector<std::size_t>& path,
                 const std::vector<int>& alloc, const ClusterState& cluster) {
  double cost = 0.0;
  int g = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    cost += alloc[i] * cluster.regions()[path[i]].elec_price;
    g += alloc[i];
  }
  return cost / g;
}

// Shared skeleton of the CR baselines: grow a path from `seed`, trying
// candidates in the order produced by `next_candidates(tail, visited)` and
// skipping any whose link fails the communication-feasibility test, then
// fill regions to free capacity in visit order (capped at k_star).
template <typename CandidateFn>
std::optional<PlacementPlan> cr_expand(const JobSpec& job,
                                       const ClusterState& cluster, int k_star,
                                       const ComputeProfile& profile,
                                       std::size_t seed,
                                       CandidateFn next_candidates) {
  const auto& regions = cluster.regions();
  double act_bits = 8.0 * static_cast<double>(activation_size(job));

  std::vector<std::size_t> path{seed};
  std::size_t tail = seed;
  int g = std::min(regions[seed].gpu_free, k_star);
  double b_min = std::numeric_limits<double>::infinity();

  while (g < k_star && path.size() < regions.size()) {
    bool extended = false;
    for (std::size_t u : next_candidates(tail, path)) {
      auto bw = cluster.link_residual(tail, u);
      if (!bw || *bw <= 0.0 || regions[u].gpu_free < 1) continue;
      double b_tmp = std::min(b_min, *bw);
      int g_next = std::min(g + regions[u].gpu_free, k_star);
      if (act_bits / b_tmp <= comp_time(job, g_next, profile)) {
        path.push_back(u);
        tail = u;
        b_min = b_tmp;
        g = g_next;
        extended = true;
        break;
      }
    }
    if (!extended) break;
  }

  // fill to free capacity in visit order, leaving 1 GPU for each later stage
  std::vector<int> alloc(path.size(), 0);
  int rem = g;
  for (std::size_t i = 0; i < path.size(); ++i) {
    int later = static_cast<int>(path.size() - i - 1);
    alloc[i] = std::min(regions[path[i]].gpu_free, rem - later);
    rem -= alloc[i];
  }
  return make_plan(job, std::move(path), std::move(alloc), profile);
}

}  // namespace

std::vector<int> cost_min_allocate(const std::vector<std::size_t>& path, int g,
                                   const ClusterState& cluster) {
  check_alloc_pre(path, g, cluster);
  std::vector<int> alloc(path.size(), 1);
  int rem = g - static_cast<int>(path.size());

  std::vector<std::size_t> order(path.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double pa = cluster.regions()[path[a]].elec_price;
    double pb = cluster.regions()[path[b]].elec_price;
    if (pa != pb) return pa < pb;
    return a < b;
  });
  for (std::size_t i : order) {
    if (rem == 0) break;
    int add = std::min(cluster.regions()[path[i]].gpu_free - 1, rem);
    alloc[i] += add;
    rem -= add;
  }
  return alloc;
}

std::vector<int> uniform_allocate(const std::vector<std::size_t>& path, int g,
                                  const ClusterState& cluster) {
  check_alloc_pre(path, g, cluster);
  std::vector<int> alloc(path.size(), 1);
  int rem = g - static_cast<int>(path.size());
  while (rem > 0) {
    for (std::size_t i = 0; i < path.size() && rem > 0; ++i) {
      if (alloc[i] < cluster.regions()[path[i]].gpu_free) {
        ++alloc[i];
        --rem;
      }
    }
  }
  return alloc;
}

std::vector<PathCandidate> find_path_candidates(const JobSpec& job,
                                                const ClusterState& cluster,
                                                int k_star,
                                                const ComputeProfile& profile,
                                                bool uniform_surplus) {
  k_star = clamp_kstar(job, k_star);
  const auto& regions = cluster.regions();
  std::vector<PathCandidate> out;

  // Phase 1: whole job in one region, cheapest wins
  std::size_t best = regions.size();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].gpu_free < k_star) continue;
    if (best == regions.size() || regions[i].elec_price < regions[best].elec_price)
      best = i;
  }
  if (best != regions.size()) {
    PathCandidate c;
    c.plan = make_plan(job, {best}, {k_star}, profile);
    c.avg_price = regions[best].elec_price;
    c.seed = best;
    out.push_back(std::move(c));
    return out;
  }

  // Phase 2: greedy highest-residual-bandwidth expansion from every seed
  double act_bits = 8.0 * static_cast<double>(activation_size(job));
  for (std::size_t seed = 0; seed < regions.size(); ++seed) {
    if (regions[seed].gpu_free < 1) continue;
    std::vector<std::size_t> path{seed};
    std::size_t tail = seed;
    int g = std::min(regions[seed].gpu_free, k_star);
    double b_min = std::numeric_limits<double>::infinity();

    while (g < k_star && path.size() < regions.size()) {
      std::size_t pick = regions.size();
      double pick_bw = -1.0;
      for (std::size_t u = 0; u < regions.size(); ++u) {
        if (regions[u].gpu_free < 1) continue;
        if (std::find(path.begin(), path.end(), u) != path.end()) continue;
        auto bw = cluster.link_residual(tail, u);
        if (!bw || *bw <= 0.0) continue;
        if (*bw > pick_bw) {
          pick_bw = *bw;
          pick = u;
        }
      }
      if (pick == regions.size()) break;
      double b_tmp = std::min(b_min, pick_bw);
      int g_next = std::min(g + regions[pick].gpu_free, k_star);
      if (act_bits / b_tmp > comp_time(job, g_next, profile)) break;
      path.push_back(pick);
      tail = pick;
      b_min = b_tmp;
      g = g_next;
    }

    std::vector<int> alloc = uniform_surplus
                                 ? uniform_allocate(path, g, cluster)
                                 : cost_min_allocate(path, g, cluster);
    PathCandidate c;
    c.avg_price = avg_price(path, alloc, cluster);
    c.seed = seed;
    c.plan = make_plan(job, std::move(path), std::move(alloc), profile);
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<PlacementPlan> find_path(const JobSpec& job,
                                       const ClusterState& cluster, int k_star,
                                       const ComputeProfile& profile,
                                       bool uniform_surplus) {
  auto candidates = find_path_candidates(job, cluster, k_star, profile, uniform_surplus);
  if (candidates.empty()) return std::nullopt;
  const PathCandidate* best = nullptr;
  int g_max = 0;
  double c_min = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    int g = c.plan.total_gpus();
    if (g > g_max || (g == g_max && c.avg_price < c_min)) {
      best = &c;
      g_max = g;
      c_min = c.avg_price;
    }
  }
  return best->plan;
}

std::optional<PlacementPlan> place_lcf(const JobSpec& job,
                                       const ClusterState& cluster, int k_star,
                                       const ComputeProfile& profile) {
  k_star = clamp_kstar(job, k_star);
  const auto& regions = cluster.regions();
  std::size_t best = regions.size();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].gpu_free < 1) continue;
    if (best == regions.size() || regions[i].elec_price < regions[best].elec_price)
      best = i;
  }
  if (best == regions.size()) return std::nullopt;
  return make_plan(job, {best}, {std::min(k_star, regions[best].gpu_free)}, profile);
}

std::optional<PlacementPlan> place_ldf(const JobSpec& job,
                                       const ClusterState& cluster, int k_star,
                                       const ComputeProfile& profile) {
  k_star = clamp_kstar(job, k_star);
  const auto& regions = cluster.regions();
  std::size_t best = regions.size();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].gpu_free < 1) continue;
    if (best == regions.size() ||
        regions[i].gpu_free > regions[best].gpu_free ||
        (regions[i].gpu_free == regions[best].gpu_free &&
         regions[i].elec_price < regions[best].elec_price))
      best = i;
  }
  if (best == regions.size()) return std::nullopt;
  return make_plan(job, {best}, {std::min(k_star, regions[best].gpu_free)}, profile);
}

std::optional<PlacementPlan> place_cr_lcf(const JobSpec& job,
                                          const ClusterState& cluster,
                                          int k_star,
                                          const ComputeProfile& profile) {
  k_star = clamp_kstar(job, k_star);
  const auto& regions = cluster.regions();
  std::vector<std::size_t> by_price;
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].gpu_free >= 1) by_price.push_back(i);
  if (by_price.empty()) return std::nullopt;
  std::sort(by_price.begin(), by_price.end(), [&](std::size_t a, std::size_t b) {
    if (regions[a].elec_price != regions[b].elec_price)
      return regions[a].elec_price < regions[b].elec_price;
    return a < b;
  });
  std::size_t seed = by_price.front();
  auto candidates = [&](std::size_t, const std::vector<std::size_t>& visited) {
    std::vector<std::size_t> cs;
    for (std::size_t u : by_price)
      if (std::find(visited.begin(), visited.end(), u) == visited.end())
        cs.push_back(u);
    return cs;
  };
  return cr_expand(job, cluster, k_star, profile, seed, candidates);
}

std::optional<PlacementPlan> place_cr_ldf(const JobSpec& job,
                                          const ClusterState& cluster,
                                          int k_star,
                                          const ComputeProfile& profile) {
  k_star = clamp_kstar(job, k_star);
  const auto& regions = cluster.regions();
  std::size_t seed = regions.size();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].gpu_free < 1) continue;
    if (seed == regions.size() ||
        regions[i].gpu_free > regions[seed].gpu_free ||
        (regions[i].gpu_free == regions[seed].gpu_free &&
         regions[i].elec_price < regions[seed].elec_price))
      seed = i;
  }
  if (seed == regions.size()) return std::nullopt;
  auto candidates = [&](std::size_t tail, const std::vector<std::size_t>& visited) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t u = 0; u < regions.size(); ++u) {
      if (regions[u].gpu_free < 1) continue;
      if (std::find(visited.begin(), visited.end(), u) != visited.end()) continue;
      auto bw = cluster.link_residual(tail, u);
      if (!bw || *bw <= 0.0) continue;
      scored.emplace_back(-*bw, u);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<std::size_t> cs;
    cs.reserve(scored.size());
    for (auto& [neg_bw, u] : scored) cs.push_back(u);
    return cs;
  };
  return cr_expand(job, cluster, k_star, profile, seed, candidates);
}

std::optional<PlacementPlan> place(PlacerKind kind, const JobSpec& job,
                                   const ClusterState& cluster, int k_star,
                                   const ComputeProfile& profile) {
  switch (kind) {
    case PlacerKind::Pathfinder:
      return find_path(job, cluster, k_star, profile, false);
    case PlacerKind::PathfinderUniform:
      return find_path(job, cluster, k_star, profile, true);
    case PlacerKind::Lcf:
      return place_lcf(job, cluster, k_star, profile);
    case PlacerKind::Ldf:
      return place_ldf(job, cluster, k_star, profile);
    case PlacerKind::CrLcf:
      return place_cr_lcf(job, cluster, k_star, profile);
    case PlacerKind::CrLdf:
      return place_cr_ldf(job, cluster, k_star, profile);
  }
  return std::nullopt;
}

}  // namespace bacepipe
