#include <algorithm>
#include <numeric>

#include "gapminer/topology.hpp"

namespace gapminer {
namespace {

std::uint64_t pack(VertexId a, VertexId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

// Staging for cliques of one dimension >= 2.
struct CliqueBlock {
  int dim = 2;
  std::size_t width = 3;      // vertices per clique
  std::size_t key_width = 3;  // edges per clique
  std::vector<VertexId> vertices;
  std::vector<EdgeRank> keys;  // descending edge ranks
  std::vector<Year> values;
  std::size_t size() const { return values.size(); }
};

}  // namespace

FlagFiltration FlagFiltration::build(const TemporalConceptNetwork& network, int max_dim) {
  if (max_dim < 1) throw ConfigError("max_dim must be at least 1");
  FlagFiltration f;
  f.max_dim_ = max_dim;
  f.labels_ = network.concepts();
  const std::size_t n = network.vertex_count();
  const auto edges = network.edges();

  std::vector<Year> vertex_value(n, std::numeric_limits<Year>::max());
  std::vector<std::vector<VertexId>> higher(n);
  for (const auto& e : edges) {
    vertex_value[e.u] = std::min(vertex_value[e.u], e.time);
    vertex_value[e.v] = std::min(vertex_value[e.v], e.time);
    higher[e.u].push_back(e.v);
  }
  for (auto& h : higher) std::sort(h.begin(), h.end());

  // Enumerate cliques with strictly increasing vertices so each is seen once.
  std::vector<CliqueBlock> blocks;
  for (int d = 2; d <= max_dim; ++d) {
    CliqueBlock b;
    b.dim = d;
    b.width = static_cast<std::size_t>(d) + 1;
    b.key_width = b.width * (b.width - 1) / 2;
    blocks.push_back(std::move(b));
  }
  if (max_dim >= 2) {
    std::vector<VertexId> clique;
    std::vector<EdgeRank> ranks;
    auto emit = [&](CliqueBlock& block) {
      ranks.clear();
      for (std::size_t i = 0; i < clique.size(); ++i)
        for (std::size_t j = i + 1; j < clique.size(); ++j) ranks.push_back(*network.find_edge(clique[i], clique[j]));
      std::sort(ranks.begin(), ranks.end(), std::greater<>());
      block.vertices.insert(block.vertices.end(), clique.begin(), clique.end());
      block.keys.insert(block.keys.end(), ranks.begin(), ranks.end());
      block.values.push_back(edges[ranks.front()].time);
    };
    auto extend = [&](auto&& self, const std::vector<VertexId>& candidates) -> void {
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const VertexId w = candidates[i];
        clique.push_back(w);
        const int dim = static_cast<int>(clique.size()) - 1;
        if (dim >= 2) emit(blocks[static_cast<std::size_t>(dim - 2)]);
        if (dim < max_dim) {
          std::vector<VertexId> next;
          std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end(),
                                higher[w].begin(), higher[w].end(), std::back_inserter(next));
          if (!next.empty()) self(self, next);
        }
        clique.pop_back();
      }
    };
    for (VertexId u = 0; u < n; ++u) {
      if (higher[u].empty()) continue;
      clique.assign(1, u);
      for (std::size_t i = 0; i < higher[u].size(); ++i) {
        const VertexId v = higher[u][i];
        clique.push_back(v);
        std::vector<VertexId> common;
        std::set_intersection(higher[u].begin() + static_cast<std::ptrdiff_t>(i) + 1, higher[u].end(),
                              higher[v].begin(), higher[v].end(), std::back_inserter(common));
        if (!common.empty()) extend(extend, common);
        clique.pop_back();
      }
    }
  }

  // Global order over handles (dim, local index).
  struct Handle {
    Year value;
    std::int32_t dim;
    std::uint32_t local;
  };
  std::vector<Handle> handles;
  std::size_t total = edges.size();
  for (const auto& b : blocks) total += b.size();
  handles.reserve(total + n);
  for (VertexId v = 0; v < n; ++v)
    if (vertex_value[v] != std::numeric_limits<Year>::max()) handles.push_back({vertex_value[v], 0, v});
  for (EdgeRank r = 0; r < edges.size(); ++r) handles.push_back({edges[r].time, 1, r});
  for (const auto& b : blocks)
    for (std::uint32_t i = 0; i < b.size(); ++i) handles.push_back({b.values[i], b.dim, i});

  std::sort(handles.begin(), handles.end(), [&](const Handle& a, const Handle& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.dim <= 1) return a.local < b.local;
    const auto& block = blocks[static_cast<std::size_t>(a.dim - 2)];
    const EdgeRank* ka = block.keys.data() + a.local * block.key_width;
    const EdgeRank* kb = block.keys.data() + b.local * block.key_width;
    return std::lexicographical_compare(ka, ka + block.key_width, kb, kb + block.key_width);
  });

  f.records_.reserve(handles.size());
  f.vertex_simplex_.assign(n, std::numeric_limits<SimplexIndex>::max());
  f.edge_simplex_.reserve(edges.size());
  f.lex_by_dim_.assign(static_cast<std::size_t>(max_dim) + 1, {});
  for (SimplexIndex s = 0; s < handles.size(); ++s) {
    const Handle& h = handles[s];
    Record rec{static_cast<std::uint32_t>(f.vertex_data_.size()), h.value, 0, static_cast<std::int8_t>(h.dim)};
    if (h.dim == 0) {
      rec.tie = h.local;
      f.vertex_data_.push_back(h.local);
      f.vertex_simplex_[h.local] = s;
    } else if (h.dim == 1) {
      rec.tie = h.local;
      const auto& e = edges[h.local];
      f.vertex_data_.push_back(e.u);
      f.vertex_data_.push_back(e.v);
      f.edge_simplex_.emplace(pack(e.u, e.v), s);
    } else {
      const auto& block = blocks[static_cast<std::size_t>(h.dim - 2)];
      const VertexId* vs = block.vertices.data() + h.local * block.width;
      f.vertex_data_.insert(f.vertex_data_.end(), vs, vs + block.width);
      f.lex_by_dim_[static_cast<std::size_t>(h.dim)].push_back(s);
    }
    f.records_.push_back(rec);
    auto [it, inserted] = f.steps_.try_emplace(h.value, IndexRange{s, s + 1});
    if (!inserted) it->second.end = s + 1;
  }
  for (int d = 2; d <= max_dim; ++d) {
    auto& lex = f.lex_by_dim_[static_cast<std::size_t>(d)];
    std::sort(lex.begin(), lex.end(), [&](SimplexIndex a, SimplexIndex b) {
      auto va = f.vertices(a), vb = f.vertices(b);
      return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
    });
  }
  return f;
}

std::optional<SimplexIndex> FlagFiltration::find(std::span<const VertexId> vs) const {
  if (vs.empty() || vs.size() > static_cast<std::size_t>(max_dim_) + 1) return std::nullopt;
  if (vs.size() == 1) {
    if (vs[0] >= vertex_simplex_.size() || vertex_simplex_[vs[0]] == std::numeric_limits<SimplexIndex>::max())
      return std::nullopt;
    return vertex_simplex_[vs[0]];
  }
  if (vs.size() == 2) {
    auto it = edge_simplex_.find(pack(vs[0], vs[1]));
    if (it == edge_simplex_.end()) return std::nullopt;
    return it->second;
  }
  const auto& lex = lex_by_dim_[vs.size() - 1];
  auto it = std::lower_bound(lex.begin(), lex.end(), vs, [&](SimplexIndex s, std::span<const VertexId> key) {
    auto v = vertices(s);
    return std::lexicographical_compare(v.begin(), v.end(), key.begin(), key.end());
  });
  if (it == lex.end()) return std::nullopt;
  auto v = vertices(*it);
  if (!std::equal(v.begin(), v.end(), vs.begin(), vs.end())) return std::nullopt;
  return *it;
}

void FlagFiltration::boundary(SimplexIndex s, std::vector<SimplexIndex>& out) const {
  out.clear();
  const auto vs = vertices(s);
  const int d = dim(s);
  if (d == 0) return;
  if (d == 1) {
    out.push_back(vertex_simplex_[vs[0]]);
    out.push_back(vertex_simplex_[vs[1]]);
  } else if (d == 2) {
    out.push_back(edge_simplex_.at(pack(vs[0], vs[1])));
    out.push_back(edge_simplex_.at(pack(vs[0], vs[2])));
    out.push_back(edge_simplex_.at(pack(vs[1], vs[2])));
  } else {
    std::vector<VertexId> face;
    for (std::size_t skip = 0; skip < vs.size(); ++skip) {
      face.clear();
      for (std::size_t i = 0; i < vs.size(); ++i)
        if (i != skip) face.push_back(vs[i]);
      auto f = find(face);
      GAPMINER_CHECK(f.has_value(), "filtration is not closed under faces");
      out.push_back(*f);
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<SimplexIndex> FlagFiltration::boundary(SimplexIndex s) const {
  std::vector<SimplexIndex> out;
  boundary(s, out);
  return out;
}

std::vector<std::size_t> FlagFiltration::counts() const {
  std::vector<std::size_t> c(static_cast<std::size_t>(max_dim_) + 1, 0);
  for (const auto& r : records_) ++c[static_cast<std::size_t>(r.dim)];
  return c;
}

}  // namespace gapminer
