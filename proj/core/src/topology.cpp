#include "bacepipe/topology.hpp"

#include <cmath>
#include <sstream>

namespace bacepipe {
namespace {

// Admission comparisons tolerate tiny float noise from serialized reports.
double slack(double capacity) { return 1e-9 * std::max(1.0, capacity); }

}  // namespace

double derive_link_capacity(double bw_u, double bw_v) {
  if (bw_u <= 0.0 || bw_v <= 0.0)
    throw ConfigError("derive_link_capacity: node bandwidth must be > 0");
  return (bw_u + bw_v) / 2.0;
}

ClusterState::ClusterState(std::vector<RegionState> regions,
                           const std::vector<LinkState>& links)
    : regions_(std::move(regions)) {
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    RegionState& r = regions_[i];
    if (r.gpu_capacity < 0) throw ConfigError("region " + r.id + ": gpu_capacity < 0");
    if (r.elec_price <= 0) throw ConfigError("region " + r.id + ": elec_price must be > 0");
    if (r.node_bandwidth <= 0) throw ConfigError("region " + r.id + ": node_bandwidth must be > 0");
    if (r.intra_bandwidth <= 0) throw ConfigError("region " + r.id + ": intra_bandwidth must be > 0");
    r.gpu_free = r.gpu_capacity;
  }
  for (const LinkState& l : links) {
    if (l.src >= regions_.size() || l.dst >= regions_.size() || l.src == l.dst)
      throw ConfigError("link endpoints out of range");
    if (l.capacity <= 0) throw ConfigError("link capacity must be > 0");
    LinkState fresh = l;
    fresh.reserved = 0.0;
    links_[{l.src, l.dst}] = fresh;
  }
}

std::optional<std::size_t> ClusterState::region_index(const std::string& id) const {
  for (std::size_t i = 0; i < regions_.size(); ++i)
    if (regions_[i].id == id) return i;
  return std::nullopt;
}

int ClusterState::total_gpu_capacity() const {
  int n = 0;
  for (const auto& r : regions_) n += r.gpu_capacity;
  return n;
}

int ClusterState::total_gpu_free() const {
  int n = 0;
  for (const auto& r : regions_) n += r.gpu_free;
  return n;
}

bool ClusterState::has_link(std::size_t u, std::size_t v) const {
  return links_.count({u, v}) != 0;
}

double ClusterState::link_capacity(std::size_t u, std::size_t v) const {
  return links_.at({u, v}).capacity;
}

double ClusterState::link_reserved(std::size_t u, std::size_t v) const {
  return links_.at({u, v}).reserved;
}

std::optional<double> ClusterState::link_residual(std::size_t u, std::size_t v) const {
  auto it = links_.find({u, v});
  if (it == links_.end()) return std::nullopt;
  return it->second.capacity - it->second.reserved;
}

double ClusterState::total_link_capacity() const {
  double s = 0.0;
  for (const auto& [key, l] : links_) s += l.capacity;
  return s;
}

double ClusterState::total_link_reserved() const {
  double s = 0.0;
  for (const auto& [key, l] : links_) s += l.reserved;
  return s;
}

ClusterState::Admission ClusterState::try_reserve(const PlacementPlan& plan) {
  if (active_.count(plan.job_id)) return Admission::DuplicateJob;
  if (plan.path.size() != plan.alloc.size() || plan.path.empty())
    throw std::invalid_argument("MalformedPlan: path/alloc mismatch");

  for (std::size_t i = 0; i < plan.path.size(); ++i) {
    if (plan.path[i] >= regions_.size())
      throw std::invalid_argument("MalformedPlan: region index out of range");
    if (plan.alloc[i] < 1)
      throw std::invalid_argument("MalformedPlan: allocation below 1");
    if (regions_[plan.path[i]].gpu_free < plan.alloc[i])
      return Admission::InsufficientGpus;
  }
  for (auto [u, v] : plan.links()) {
    auto it = links_.find({u, v});
    if (it == links_.end()) return Admission::MissingLink;
    const LinkState& l = it->second;
    if (plan.bandwidth_reserved > l.capacity - l.reserved + slack(l.capacity))
      return Admission::InsufficientBandwidth;
  }

  for (std::size_t i = 0; i < plan.path.size(); ++i)
    regions_[plan.path[i]].gpu_free -= plan.alloc[i];
  for (auto [u, v] : plan.links())
    links_[{u, v}].reserved += plan.bandwidth_reserved;
  active_[plan.job_id] = plan;
  check_invariants();
  return Admission::Admitted;
}

bool ClusterState::release(const std::string& job_id) {
  auto it = active_.find(job_id);
  if (it == active_.end()) return false;  // NotActive
  PlacementPlan plan = it->second;
  active_.erase(it);

  for (std::size_t i = 0; i < plan.path.size(); ++i)
    regions_[plan.path[i]].gpu_free += plan.alloc[i];
  for (auto [u, v] : plan.links()) {
    double sum = 0.0;
    for (const auto& [id, p] : active_)
      for (auto [pu, pv] : p.links())
        if (pu == u && pv == v) sum += p.bandwidth_reserved;
    links_[{u, v}].reserved = sum;
  }
  check_invariants();
  return true;
}

void ClusterState::check_invariants() const {
  std::vector<int> used(regions_.size(), 0);
  std::map<std::pair<std::size_t, std::size_t>, double> band;
  for (const auto& [id, p] : active_) {
    for (std::size_t i = 0; i < p.path.size(); ++i) used[p.path[i]] += p.alloc[i];
    for (auto e : p.links()) band[e] += p.bandwidth_reserved;
  }
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const RegionState& r = regions_[i];
    if (r.gpu_free < 0 || r.gpu_free > r.gpu_capacity)
      throw std::logic_error("region " + r.id + ": gpu_free out of [0, capacity]");
    if (used[i] != r.gpu_capacity - r.gpu_free)
      throw std::logic_error("region " + r.id + ": active allocations do not match gpu_free");
  }
  for (const auto& [key, l] : links_) {
    if (l.reserved < -slack(l.capacity) || l.reserved > l.capacity + slack(l.capacity))
      throw std::logic_error("link reserved out of [0, capacity]");
    double expect = 0.0;
    if (auto it = band.find(key); it != band.end()) expect = it->second;
    if (std::abs(expect - l.reserved) > slack(l.capacity))
      throw std::logic_error("link reserved does not match active plans");
  }
}

}  // namespace bacepipe
