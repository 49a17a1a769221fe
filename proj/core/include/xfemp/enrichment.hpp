#pragma once

/// \file enrichment.hpp
/// \brief Generalized Heaviside enrichment: one degree of freedom per node,
/// phase and connected same-phase region within the nodal support.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "xfemp/cutcell.hpp"
#include "xfemp/mesh.hpp"

namespace xfemp {

struct DofKey {
  int node = -1;
  Phase phase = Phase::One;
  int level = 1;  ///< 1-based enrichment level
};

/// Element subregion referencing a dof.
struct RegionRef {
  int element = -1;
  int region = -1;
};

class EnrichmentTable {
 public:
  int total_dofs() const noexcept { return static_cast<int>(keys_.size()); }

  const DofKey& key(int dof) const { return keys_[static_cast<std::size_t>(dof)]; }

  std::optional<int> dof_of(int node, Phase phase, int level) const;
  int num_levels(int node, Phase phase) const;

  /// Dof interpolating region `region` of `element` at local node `a`.
  int region_dof(int element, int region, int local_node) const {
    return region_dofs_[static_cast<std::size_t>(element)][static_cast<std::size_t>(region)]
                       [static_cast<std::size_t>(local_node)];
  }
  const std::array<int, 4>& region_dofs(int element, int region) const {
    return region_dofs_[static_cast<std::size_t>(element)][static_cast<std::size_t>(region)];
  }
  int num_regions(int element) const {
    return static_cast<int>(region_dofs_[static_cast<std::size_t>(element)].size());
  }

  /// The four dofs used to interpolate `phase` in `element`, or nullopt when
  /// the phase is absent there. For elements holding two disjoint regions
  /// of the same phase the first region is reported; use region_dofs().
  std::optional<std::array<int, 4>> active_dofs_for_element(int element, Phase phase) const;

  /// Enrichment level used at global node `node` for `phase` in `element`.
  std::optional<int> level_of(int element, int node, Phase phase) const;

  /// Element subregions in which the dof is active.
  std::span<const RegionRef> support(int dof) const { return support_[static_cast<std::size_t>(dof)]; }

 private:
  friend EnrichmentTable build_enrichment(const StructuredMesh&, std::span<const ElementPartition>);

  std::vector<DofKey> keys_;
  std::vector<std::vector<std::array<int, 4>>> region_dofs_;
  std::vector<std::vector<RegionRef>> support_;
  std::vector<std::vector<Phase>> region_phase_;
  std::vector<std::array<int, 4>> element_nodes_;
  std::vector<int> node_first_dof_;  ///< CSR offsets into keys_ by node
};

/// Builds the dof table. Same-phase regions are grouped per node by
/// flood fill over shared edge pieces between elements of the nodal patch;
/// levels are ordered by the lexicographically smallest triangle centroid.
EnrichmentTable build_enrichment(const StructuredMesh& mesh, std::span<const ElementPartition> partitions);

}  // namespace xfemp
