#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "gapminer/topology.hpp"
#include "test_support.hpp"

using namespace gapminer;
using gapminer::testing::DisjointSets;
using gapminer::testing::network_of;
using gapminer::testing::random_temporal_edges;
using gapminer::testing::TimedEdge;

namespace {

std::vector<TimedEdge> four_cycle(Year last = 4) {
  return {{0, 1, 1}, {1, 2, 2}, {2, 3, 3}, {3, 0, last}};
}

// Betti numbers at `year` read off the diagram: classes born by `year` and
// not yet dead.
std::vector<std::int64_t> betti_from_diagram(const PersistenceDiagram& d, const FlagFiltration& f, Year year) {
  std::vector<std::int64_t> betti(static_cast<std::size_t>(f.max_dim()) + 1, 0);
  for (const auto& p : d.pairs)
    if (f.value(p.birth) <= year && f.value(p.death) > year) ++betti[static_cast<std::size_t>(p.dim)];
  for (const auto& e : d.essentials)
    if (f.value(e.birth) <= year) ++betti[static_cast<std::size_t>(e.dim)];
  return betti;
}

// Brute force: every vertex subset of size <= 3 that is a clique, with its
// filtration value.
std::multiset<std::pair<std::vector<VertexId>, Year>> brute_force_cliques(const TemporalConceptNetwork& net) {
  std::map<std::pair<VertexId, VertexId>, Year> time;
  for (const auto& e : net.edges()) time[{e.u, e.v}] = e.time;
  std::multiset<std::pair<std::vector<VertexId>, Year>> out;
  const auto n = static_cast<VertexId>(net.vertex_count());
  for (VertexId a = 0; a < n; ++a) {
    Year first = std::numeric_limits<Year>::max();
    for (const auto& [uv, t] : time)
      if (uv.first == a || uv.second == a) first = std::min(first, t);
    if (first != std::numeric_limits<Year>::max()) out.insert({{a}, first});
    for (VertexId b = a + 1; b < n; ++b) {
      auto ab = time.find({a, b});
      if (ab == time.end()) continue;
      out.insert({{a, b}, ab->second});
      for (VertexId c = b + 1; c < n; ++c) {
        auto ac = time.find({a, c}), bc = time.find({b, c});
        if (ac == time.end() || bc == time.end()) continue;
        out.insert({{a, b, c}, std::max({ab->second, ac->second, bc->second})});
      }
    }
  }
  return out;
}

std::multiset<std::tuple<int, Year, std::optional<Year>>> value_multiset(const PersistenceDiagram& d,
                                                                         const FlagFiltration& f) {
  std::multiset<std::tuple<int, Year, std::optional<Year>>> out;
  for (const auto& p : d.pairs) out.insert({p.dim, f.value(p.birth), f.value(p.death)});
  for (const auto& e : d.essentials) out.insert({e.dim, f.value(e.birth), std::nullopt});
  return out;
}

}  // namespace

TEST_CASE("Flag filtration: small complexes") {
  SUBCASE("triangle enters with its latest edge") {
    auto f = FlagFiltration::build(network_of(3, {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}}));
    CHECK(f.counts() == std::vector<std::size_t>{3, 3, 1});
    const std::vector<VertexId> tri{0, 1, 2};
    auto s = f.find(tri);
    REQUIRE(s.has_value());
    CHECK(f.value(*s) == 3);
    CHECK(*s == f.size() - 1);
  }
  SUBCASE("chordless 4-cycle has no triangles") {
    auto f = FlagFiltration::build(network_of(4, four_cycle()));
    CHECK(f.counts() == std::vector<std::size_t>{4, 4, 0});
  }
  SUBCASE("K4 at max_dim 2 and 3") {
    std::vector<TimedEdge> k4{{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}};
    CHECK(FlagFiltration::build(network_of(4, k4)).counts() == std::vector<std::size_t>{4, 6, 4});
    CHECK(FlagFiltration::build(network_of(4, k4), 3).counts() == std::vector<std::size_t>{4, 6, 4, 1});
  }
  SUBCASE("empty network and bad max_dim") {
    auto f = FlagFiltration::build(network_of(0, {}));
    CHECK(f.size() == 0);
    CHECK(compute_persistence(f) == PersistenceDiagram{});
    CHECK_THROWS_AS(FlagFiltration::build(network_of(2, {{0, 1, 1}}), 0), ConfigError);
  }
  SUBCASE("vertices take their earliest edge and isolated concepts are absent") {
    auto net = network_of(5, {{0, 1, 2}, {1, 2, 5}});
    auto f = FlagFiltration::build(net);
    CHECK(f.counts()[0] == 3);
    const std::vector<VertexId> v2{2};
    CHECK(f.value(*f.find(v2)) == 5);
  }
}

TEST_CASE("Flag filtration matches brute-force clique enumeration") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    auto net = network_of(12, random_temporal_edges(rng, 12, 30, 6));
    auto f = FlagFiltration::build(net);
    std::multiset<std::pair<std::vector<VertexId>, Year>> got;
    for (SimplexIndex s = 0; s < f.size(); ++s) {
      auto vs = f.vertices(s);
      got.insert({{vs.begin(), vs.end()}, f.value(s)});
    }
    CHECK(got == brute_force_cliques(net));
  }
}

TEST_CASE("Filtration order: values ascend, faces first, edges before triangles within a year") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = FlagFiltration::build(network_of(12, random_temporal_edges(rng, 12, 30, 4)));
    for (SimplexIndex s = 1; s < f.size(); ++s) {
      CHECK(f.value(s - 1) <= f.value(s));
      if (f.value(s - 1) == f.value(s)) CHECK(f.dim(s - 1) <= f.dim(s));
    }
    for (SimplexIndex s = 0; s < f.size(); ++s)
      for (auto face : f.boundary(s)) CHECK(face < s);
    for (const auto& [year, range] : f.steps())
      for (auto s = range.begin; s < range.end; ++s) CHECK(f.value(s) == year);
  }
}

TEST_CASE("Boundary of a boundary is zero") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = FlagFiltration::build(network_of(10, random_temporal_edges(rng, 10, 30, 5)), 3);
    for (SimplexIndex s = 0; s < f.size(); ++s) {
      std::map<SimplexIndex, int> chain;
      for (auto face : f.boundary(s))
        for (auto ff : f.boundary(face)) chain[ff] ^= 1;
      for (const auto& [_, coeff] : chain) CHECK(coeff == 0);
    }
  }
}

TEST_CASE("Persistence: worked examples") {
  SUBCASE("4-cycle closes with an essential class") {
    auto f = FlagFiltration::build(network_of(4, four_cycle()));
    auto d = compute_persistence(f);
    std::vector<EssentialClass> dim1;
    for (const auto& e : d.essentials)
      if (e.dim == 1) dim1.push_back(e);
    REQUIRE(dim1.size() == 1);
    CHECK(f.value(dim1[0].birth) == 4);
    CHECK(betti_oracle(f, 4) == std::vector<std::int64_t>{1, 1, 0});
    auto gaps = gap_edges(d, f);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].edge == 3);
    CHECK_FALSE(gaps[0].death.has_value());
    CHECK(gap_edges(d, f, 1000).size() == 1);
  }
  SUBCASE("filled triangle has only a zero-persistence cycle") {
    auto f = FlagFiltration::build(network_of(3, {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}}));
    auto d = compute_persistence(f);
    std::vector<PersistencePair> dim1;
    for (const auto& p : d.pairs)
      if (p.dim == 1) dim1.push_back(p);
    REQUIRE(dim1.size() == 1);
    CHECK(f.value(dim1[0].birth) == 3);
    CHECK(f.dim(dim1[0].death) == 2);
    for (Year y = 1; y <= 3; ++y) CHECK(betti_oracle(f, y)[1] == 0);
    CHECK(gap_edges(d, f).empty());
    CHECK(gap_edges(d, f, 0).size() == 1);
  }
  SUBCASE("two disjoint edges") {
    auto f = FlagFiltration::build(network_of(4, {{0, 1, 1}, {2, 3, 2}}));
    auto d = compute_persistence(f);
    CHECK(d.essentials.size() == 2);
    for (const auto& e : d.essentials) CHECK(e.dim == 0);
    CHECK(gap_edges(d, f).empty());
  }
  SUBCASE("4-cycle filled two years later survives only a low threshold") {
    auto edges = four_cycle();
    edges.push_back({0, 2, 6});
    auto f = FlagFiltration::build(network_of(4, edges));
    auto d = compute_persistence(f);
    CHECK(gap_edges(d, f, 3).empty());
    auto gaps = gap_edges(d, f, 2);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].birth == 4);
    CHECK(gaps[0].death == 6);
    CHECK_THROWS_AS(gap_edges(d, f, -1), ConfigError);
  }
  SUBCASE("single vertex oracle and K4 two-skeleton") {
    auto f = FlagFiltration::build(network_of(2, {{0, 1, 1}}));
    CHECK(betti_oracle(f, 0) == std::vector<std::int64_t>{0, 0, 0});
    CHECK(betti_oracle(f, 1) == std::vector<std::int64_t>{1, 0, 0});
    std::vector<TimedEdge> k4{{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}};
    auto g = FlagFiltration::build(network_of(4, k4));
    // The hollow tetrahedron: one enclosed void, no loops.
    CHECK(betti_oracle(g, 1) == std::vector<std::int64_t>{1, 0, 1});
    CHECK(betti_from_diagram(compute_persistence(g), g, 1) == std::vector<std::int64_t>{1, 0, 1});
    auto solid = FlagFiltration::build(network_of(4, k4), 3);
    CHECK(betti_oracle(solid, 1) == std::vector<std::int64_t>{1, 0, 0, 0});
  }
}

TEST_CASE("Diagram invariants: pairing is a partition of the simplices") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = FlagFiltration::build(network_of(12, random_temporal_edges(rng, 12, 30, 5)));
    auto d = compute_persistence(f);
    std::vector<int> seen(f.size(), 0);
    for (const auto& p : d.pairs) {
      CHECK(f.dim(p.death) == f.dim(p.birth) + 1);
      CHECK(p.death > p.birth);
      CHECK(p.dim == f.dim(p.birth));
      ++seen[p.birth];
      ++seen[p.death];
    }
    for (const auto& e : d.essentials) ++seen[e.birth];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("Oracle equivalence on random temporal graphs") {
  Rng rng(2024);
  int instances = 0;
  for (int trial = 0; trial < 250; ++trial) {
    auto f = FlagFiltration::build(network_of(12, random_temporal_edges(rng, 12, 30, 8)));
    auto d = compute_persistence(f);
    for (const auto& [year, _] : f.steps()) {
      auto expected = betti_oracle(f, year);
      auto got = betti_from_diagram(d, f, year);
      CHECK(got == expected);
    }
    ++instances;
  }
  CHECK(instances >= 200);
}

TEST_CASE("Union-find positivity agrees with the reduction") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto net = network_of(12, random_temporal_edges(rng, 12, 30, 6));
    auto f = FlagFiltration::build(net);
    auto full = compute_persistence(f, {.union_find_dim0 = false, .clearing = true});
    std::set<SimplexIndex> births;
    for (const auto& p : full.pairs)
      if (p.dim == 1) births.insert(p.birth);
    for (const auto& e : full.essentials)
      if (e.dim == 1) births.insert(e.birth);
    DisjointSets sets(net.vertex_count());
    for (SimplexIndex s = 0; s < f.size(); ++s) {
      if (f.dim(s) != 1) continue;
      auto vs = f.vertices(s);
      const bool closes_cycle = !sets.unite(vs[0], vs[1]);
      CHECK(closes_cycle == births.contains(s));
    }
  }
}

TEST_CASE("Reduction variants produce identical diagrams") {
  Rng rng(37);
  for (int trial = 0; trial < 150; ++trial) {
    auto f = FlagFiltration::build(network_of(12, random_temporal_edges(rng, 12, 30, 5)));
    auto standard = compute_persistence(f);
    CHECK(compute_persistence(f, {.union_find_dim0 = false, .clearing = true}) == standard);
    CHECK(compute_persistence(f, {.union_find_dim0 = false, .clearing = false}) == standard);
    CHECK(compute_persistence(f, {.union_find_dim0 = true, .clearing = false}) == standard);
    CHECK(compute_persistence(f) == standard);
  }
}

TEST_CASE("Same-year tie order does not change the value multiset") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    auto edges = random_temporal_edges(rng, 12, 30, 3);
    auto f = FlagFiltration::build(network_of(12, edges));
    auto reference = value_multiset(compute_persistence(f), f);
    for (int k = 0; k < 3; ++k) {
      auto permuted = edges;
      for (auto lo = permuted.begin(); lo != permuted.end();) {
        auto hi = std::find_if(lo, permuted.end(), [&](const TimedEdge& e) { return e.time != lo->time; });
        rng.shuffle(std::span(lo, hi));
        lo = hi;
      }
      auto g = FlagFiltration::build(network_of(12, permuted));
      CHECK(value_multiset(compute_persistence(g), g) == reference);
    }
  }
}

TEST_CASE("Gap edges are the dimension-1 births above the threshold") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = FlagFiltration::build(network_of(12, random_temporal_edges(rng, 12, 30, 6)));
    auto d = compute_persistence(f);
    for (int threshold : {0, 1, 2}) {
      std::set<EdgeRank> expected;
      for (const auto& p : d.pairs)
        if (p.dim == 1 && f.value(p.death) - f.value(p.birth) >= threshold) expected.insert(f.edge_rank(p.birth));
      for (const auto& e : d.essentials)
        if (e.dim == 1) expected.insert(f.edge_rank(e.birth));
      std::set<EdgeRank> got;
      for (const auto& g : gap_edges(d, f, threshold)) got.insert(g.edge);
      CHECK(got == expected);
    }
  }
}

TEST_CASE("Persistence is deterministic") {
  Rng rng(47);
  auto edges = random_temporal_edges(rng, 12, 30, 4);
  auto f = FlagFiltration::build(network_of(12, edges));
  auto g = FlagFiltration::build(network_of(12, edges));
  CHECK(compute_persistence(f) == compute_persistence(g));
}

TEST_CASE("Oracle refuses large complexes") {
  std::vector<TimedEdge> edges;
  for (VertexId a = 0; a < 40; ++a)
    for (VertexId b = a + 1; b < 40; ++b) edges.push_back({a, b, 1});
  auto f = FlagFiltration::build(network_of(40, edges));
  CHECK_THROWS_AS(betti_oracle(f, 1), ConfigError);
  CHECK_NOTHROW(betti_oracle(f, 0));
}

TEST_CASE("Diagram dump round trip") {
  auto edges = four_cycle();
  edges.push_back({0, 2, 6});
  auto f = FlagFiltration::build(network_of(4, edges));
  auto d = compute_persistence(f);
  std::stringstream buffer;
  write_diagram(buffer, "D", f, d);
  auto back = read_diagrams(buffer);
  REQUIRE(back.contains("D"));
  const auto& features = back["D"];
  CHECK(features.size() == d.pairs.size() + d.essentials.size());
  auto gap = std::find_if(features.begin(), features.end(), [](const DiagramFeature& x) { return x.dim == 1; });
  REQUIRE(gap != features.end());
  CHECK(gap->birth_vertices == std::vector<std::string>{"v00", "v03"});
  CHECK(gap->birth_year == 4);
  CHECK(gap->death_year == 6);
}
