#include <algorithm>
#include <numeric>

#include "gapminer/topology.hpp"

namespace gapminer {
namespace {

constexpr std::int32_t kNone = -1;

enum Role : std::uint8_t { kUnknown = 0, kPositive, kNegative };

// Z/2 column sum of two ascending index lists into `out`.
void add_columns(const std::vector<SimplexIndex>& a, const std::vector<SimplexIndex>& b,
                 std::vector<SimplexIndex>& out) {
  out.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
}

class Reducer {
 public:
  Reducer(const FlagFiltration& f, ReductionOptions options)
      : f_(f), options_(options), role_(f.size(), kUnknown), owner_(f.size(), kNone) {
    by_dim_.assign(static_cast<std::size_t>(f.max_dim()) + 1, {});
    for (SimplexIndex s = 0; s < f.size(); ++s) by_dim_[static_cast<std::size_t>(f.dim(s))].push_back(s);
  }

  PersistenceDiagram run() {
    const int lowest = options_.union_find_dim0 ? 2 : 1;
    for (int d = f_.max_dim(); d >= lowest; --d) reduce_dimension(d);
    if (options_.union_find_dim0) union_find_low_dims();
    for (SimplexIndex v : by_dim_[0]) role_[v] = kPositive;
    return collect();
  }

 private:
  void reduce_dimension(int d) {
    std::vector<SimplexIndex> column, scratch;
    for (SimplexIndex s : by_dim_[static_cast<std::size_t>(d)]) {
      if (options_.clearing && role_[s] == kPositive) continue;
      f_.boundary(s, column);
      while (!column.empty()) {
        const std::int32_t slot = owner_[column.back()];
        if (slot == kNone) break;
        add_columns(column, stored_[static_cast<std::size_t>(slot)], scratch);
        column.swap(scratch);
      }
      if (column.empty()) {
        role_[s] = kPositive;
        continue;
      }
      const SimplexIndex low = column.back();
      owner_[low] = static_cast<std::int32_t>(stored_.size());
      stored_.push_back(column);
      pairs_.push_back({low, s, d - 1});
      role_[s] = kNegative;
      role_[low] = kPositive;
    }
  }

  // Elder rule on vertices and edges: an edge joining two components kills
  // the younger one; an edge inside one component is a dimension-1 birth.
  void union_find_low_dims() {
    std::vector<SimplexIndex> parent(f_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](SimplexIndex x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (SimplexIndex s = 0; s < f_.size(); ++s) {
      if (f_.dim(s) != 1) continue;
      auto faces = f_.boundary(s);
      SimplexIndex a = root(faces[0]), b = root(faces[1]);
      if (a == b) {
        role_[s] = kPositive;
        continue;
      }
      // Roots are always the oldest vertex of their component.
      if (a > b) std::swap(a, b);
      parent[b] = a;
      pairs_.push_back({b, s, 0});
      role_[s] = kNegative;
    }
  }

  PersistenceDiagram collect() {
    PersistenceDiagram diagram;
    std::vector<char> paired(f_.size(), 0);
    for (const auto& p : pairs_) paired[p.birth] = 1;
    for (SimplexIndex s = 0; s < f_.size(); ++s) {
      GAPMINER_CHECK(role_[s] != kUnknown, "simplex left unclassified by reduction");
      if (role_[s] == kPositive && !paired[s]) diagram.essentials.push_back({s, f_.dim(s)});
    }
    diagram.pairs = std::move(pairs_);
    std::sort(diagram.pairs.begin(), diagram.pairs.end(), [](const auto& a, const auto& b) {
      return a.dim != b.dim ? a.dim < b.dim : a.birth < b.birth;
    });
    std::sort(diagram.essentials.begin(), diagram.essentials.end(), [](const auto& a, const auto& b) {
      return a.dim != b.dim ? a.dim < b.dim : a.birth < b.birth;
    });
    return diagram;
  }

  const FlagFiltration& f_;
  ReductionOptions options_;
  std::vector<std::vector<SimplexIndex>> by_dim_;
  std::vector<std::uint8_t> role_;
  std::vector<std::int32_t> owner_;  // row -> slot in stored_
  std::vector<std::vector<SimplexIndex>> stored_;
  std::vector<PersistencePair> pairs_;
};

}  // namespace

PersistenceDiagram compute_persistence(const FlagFiltration& filtration, ReductionOptions options) {
  return Reducer(filtration, options).run();
}

std::vector<GapEdge> gap_edges(const PersistenceDiagram& diagram, const FlagFiltration& filtration,
                               int min_persistence) {
  if (min_persistence < 0) throw ConfigError("min_persistence must be non-negative");
  std::vector<GapEdge> gaps;
  for (const auto& p : diagram.pairs) {
    if (p.dim != 1) continue;
    const Year birth = filtration.value(p.birth), death = filtration.value(p.death);
    if (death - birth >= min_persistence) gaps.push_back({filtration.edge_rank(p.birth), p.birth, birth, death});
  }
  for (const auto& e : diagram.essentials) {
    if (e.dim != 1) continue;
    gaps.push_back({filtration.edge_rank(e.birth), e.birth, filtration.value(e.birth), std::nullopt});
  }
  std::sort(gaps.begin(), gaps.end(), [](const GapEdge& a, const GapEdge& b) { return a.edge < b.edge; });
  return gaps;
}

}  // namespace gapminer
