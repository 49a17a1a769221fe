#include "xfemp/enrichment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace xfemp {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

bool same_piece(const EdgePiece& p, const EdgePiece& q) {
  return (p.ends[0] == q.ends[0] && p.ends[1] == q.ends[1]) || (p.ends[0] == q.ends[1] && p.ends[1] == q.ends[0]);
}

bool lex_less(const Vec2& a, const Vec2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); }

// Local edge of `e` facing `other`, or -1 when the elements are not edge neighbours.
int facing_edge(const StructuredMesh& mesh, int e, int other) {
  const int ex = e % mesh.nx();
  const int ey = e / mesh.nx();
  const int ox = other % mesh.nx();
  const int oy = other / mesh.nx();
  if (oy == ey && ox == ex + 1) return 1;
  if (oy == ey && ox == ex - 1) return 3;
  if (ox == ex && oy == ey + 1) return 2;
  if (ox == ex && oy == ey - 1) return 0;
  return -1;
}

}  // namespace

std::optional<int> EnrichmentTable::dof_of(int node, Phase phase, int level) const {
  const auto b = static_cast<std::size_t>(node_first_dof_[static_cast<std::size_t>(node)]);
  const auto end = static_cast<std::size_t>(node_first_dof_[static_cast<std::size_t>(node) + 1]);
  for (std::size_t d = b; d < end; ++d)
    if (keys_[d].phase == phase && keys_[d].level == level) return static_cast<int>(d);
  return std::nullopt;
}

int EnrichmentTable::num_levels(int node, Phase phase) const {
  const auto b = static_cast<std::size_t>(node_first_dof_[static_cast<std::size_t>(node)]);
  const auto end = static_cast<std::size_t>(node_first_dof_[static_cast<std::size_t>(node) + 1]);
  int n = 0;
  for (std::size_t d = b; d < end; ++d) n += keys_[d].phase == phase ? 1 : 0;
  return n;
}

std::optional<std::array<int, 4>> EnrichmentTable::active_dofs_for_element(int element, Phase phase) const {
  const auto& phases = region_phase_[static_cast<std::size_t>(element)];
  for (std::size_t r = 0; r < phases.size(); ++r)
    if (phases[r] == phase) return region_dofs_[static_cast<std::size_t>(element)][r];
  return std::nullopt;
}

std::optional<int> EnrichmentTable::level_of(int element, int node, Phase phase) const {
  const auto& nodes = element_nodes_[static_cast<std::size_t>(element)];
  const auto it = std::find(nodes.begin(), nodes.end(), node);
  if (it == nodes.end()) return std::nullopt;
  const auto a = static_cast<int>(it - nodes.begin());
  const auto dofs = active_dofs_for_element(element, phase);
  if (!dofs) return std::nullopt;
  return key((*dofs)[static_cast<std::size_t>(a)]).level;
}

EnrichmentTable build_enrichment(const StructuredMesh& mesh, std::span<const ElementPartition> parts) {
  if (static_cast<int>(parts.size()) != mesh.num_elements()) {
    throw std::invalid_argument("build_enrichment: one partition per element required");
  }
  EnrichmentTable table;
  const auto n_elem = static_cast<std::size_t>(mesh.num_elements());
  table.region_dofs_.resize(n_elem);
  table.region_phase_.resize(n_elem);
  table.element_nodes_.resize(n_elem);
  for (std::size_t e = 0; e < n_elem; ++e) {
    table.region_dofs_[e].assign(parts[e].regions.size(), {-1, -1, -1, -1});
    for (const auto& r : parts[e].regions) table.region_phase_[e].push_back(r.phase);
    table.element_nodes_[e] = mesh.element_nodes(static_cast<int>(e));
  }

  // Smallest triangle centroid per region, used to order levels.
  std::vector<std::vector<Vec2>> region_key(n_elem);
  for (std::size_t e = 0; e < n_elem; ++e) {
    region_key[e].assign(parts[e].regions.size(), Vec2::Constant(std::numeric_limits<double>::infinity()));
    for (const auto& t : parts[e].triangles) {
      auto& k = region_key[e][static_cast<std::size_t>(t.region)];
      if (lex_less(t.centroid(), k)) k = t.centroid();
    }
  }

  struct Component {
    Phase phase;
    Vec2 order_key;
    std::vector<RegionRef> members;
  };

  table.node_first_dof_.assign(static_cast<std::size_t>(mesh.num_nodes()) + 1, 0);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const auto patch = mesh.elements_of_node(i);
    std::vector<RegionRef> verts;
    for (int e : patch)
      for (int r = 0; r < static_cast<int>(parts[static_cast<std::size_t>(e)].regions.size()); ++r)
        verts.push_back({e, r});
    UnionFind uf(static_cast<int>(verts.size()));
    for (std::size_t u = 0; u < verts.size(); ++u) {
      for (std::size_t v = u + 1; v < verts.size(); ++v) {
        const auto& ru = verts[u];
        const auto& rv = verts[v];
        if (ru.element == rv.element) continue;
        const auto& pu = parts[static_cast<std::size_t>(ru.element)];
        const auto& pv = parts[static_cast<std::size_t>(rv.element)];
        if (pu.regions[static_cast<std::size_t>(ru.region)].phase !=
            pv.regions[static_cast<std::size_t>(rv.region)].phase)
          continue;
        const int ku = facing_edge(mesh, ru.element, rv.element);
        if (ku < 0) continue;
        const int kv = facing_edge(mesh, rv.element, ru.element);
        bool touch = false;
        for (const auto& a : pu.edge_pieces[static_cast<std::size_t>(ku)]) {
          if (a.region != ru.region) continue;
          for (const auto& b : pv.edge_pieces[static_cast<std::size_t>(kv)])
            if (b.region == rv.region && same_piece(a, b)) touch = true;
        }
        if (touch) uf.unite(static_cast<int>(u), static_cast<int>(v));
      }
    }

    std::vector<Component> comps;
    std::vector<int> comp_of_root(verts.size(), -1);
    for (std::size_t u = 0; u < verts.size(); ++u) {
      const auto root = static_cast<std::size_t>(uf.find(static_cast<int>(u)));
      if (comp_of_root[root] < 0) {
        comp_of_root[root] = static_cast<int>(comps.size());
        const auto& reg = parts[static_cast<std::size_t>(verts[u].element)].regions[static_cast<std::size_t>(verts[u].region)];
        comps.push_back({reg.phase, Vec2::Constant(std::numeric_limits<double>::infinity()), {}});
      }
      auto& c = comps[static_cast<std::size_t>(comp_of_root[root])];
      c.members.push_back(verts[u]);
      const Vec2& k = region_key[static_cast<std::size_t>(verts[u].element)][static_cast<std::size_t>(verts[u].region)];
      if (lex_less(k, c.order_key)) c.order_key = k;
    }
    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
      if (a.phase != b.phase) return phase_index(a.phase) < phase_index(b.phase);
      return lex_less(a.order_key, b.order_key);
    });

    int level = 0;
    Phase current = Phase::One;
    for (const auto& c : comps) {
      if (c.phase != current) {
        current = c.phase;
        level = 0;
      }
      ++level;
      const int dof = table.total_dofs();
      table.keys_.push_back({i, c.phase, level});
      std::vector<RegionRef> members = c.members;
      std::sort(members.begin(), members.end(), [](const RegionRef& a, const RegionRef& b) {
        return a.element < b.element || (a.element == b.element && a.region < b.region);
      });
      for (const auto& m : members) {
        const auto& nodes = table.element_nodes_[static_cast<std::size_t>(m.element)];
        const auto a = static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), i) - nodes.begin());
        table.region_dofs_[static_cast<std::size_t>(m.element)][static_cast<std::size_t>(m.region)][a] = dof;
      }
      table.support_.push_back(std::move(members));
    }
    table.node_first_dof_[static_cast<std::size_t>(i) + 1] = table.total_dofs();
  }
  return table;
}

}  // namespace xfemp
