#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bacepipe/types.hpp"

namespace bacepipe {

// Inter-region link capacity from the two endpoint node bandwidths.
double derive_link_capacity(double bw_u, double bw_v);

// Geo-distributed cluster state: regions, directed links, and the set of
// active placements. All mutation goes through try_reserve/release, which
// keep the GPU and bandwidth capacity constraints true by construction.
class ClusterState {
 public:
  enum class Admission {
    Admitted,
    InsufficientGpus,
    InsufficientBandwidth,
    MissingLink,
    DuplicateJob,
  };

  ClusterState() = default;
  ClusterState(std::vector<RegionState> regions,
               const std::vector<LinkState>& links);

  const std::vector<RegionState>& regions() const { return regions_; }
  std::optional<std::size_t> region_index(const std::string& id) const;
  int total_gpu_capacity() const;
  int total_gpu_free() const;

  bool has_link(std::size_t u, std::size_t v) const;
  double link_capacity(std::size_t u, std::size_t v) const;
  double link_reserved(std::size_t u, std::size_t v) const;
  // capacity - reserved, or nullopt when the link does not exist
  std::optional<double> link_residual(std::size_t u, std::size_t v) const;
  double total_link_capacity() const;
  double total_link_reserved() const;
  const std::map<std::pair<std::size_t, std::size_t>, LinkState>& links() const {
    return links_;
  }

  const std::map<std::string, PlacementPlan>& active_plans() const {
    return active_;
  }

  // Atomic admission: either the whole plan is reserved or nothing changes.
  Admission try_reserve(const PlacementPlan& plan);

  // Exact inverse of try_reserve. Returns false for unknown job ids.
  // Link reservations are re-summed from the remaining active plans so that
  // long reserve/release sequences cannot accumulate floating-point drift.
  bool release(const std::string& job_id);

  // Re-derives every bookkeeping quantity from active_plans and throws
  // std::logic_error on any mismatch or capacity violation.
  void check_invariants() const;

 private:
  std::vector<RegionState> regions_;
  std::map<std::pair<std::size_t, std::size_t>, LinkState> links_;
  std::map<std::string, PlacementPlan> active_;
};

}  // namespace bacepipe
