#include "gapminer/concept_net.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>

#include "gapminer/csv.hpp"
#include "gapminer/parallel.hpp"
#include "gapminer/random.hpp"

namespace gapminer {
namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

TemporalConceptNetwork TemporalConceptNetwork::from_edges(std::string discipline,
                                                          std::vector<std::string> concepts,
                                                          std::vector<NetworkEdge> edges, EdgeOrder order) {
  for (std::size_t i = 1; i < concepts.size(); ++i)
    GAPMINER_CHECK(concepts[i - 1] < concepts[i], "network concepts must be strictly increasing");
  for (auto& e : edges) {
    GAPMINER_CHECK(e.u < e.v && e.v < concepts.size(), "network edge must satisfy u < v < |V|");
    GAPMINER_CHECK(!e.introducers.empty(), "network edge without introducers");
    std::sort(e.introducers.begin(), e.introducers.end());
    e.introducers.erase(std::unique(e.introducers.begin(), e.introducers.end()), e.introducers.end());
  }
  if (order == EdgeOrder::kCanonical) {
    std::sort(edges.begin(), edges.end(), [](const NetworkEdge& a, const NetworkEdge& b) {
      if (a.time != b.time) return a.time < b.time;
      if (a.introducers.front() != b.introducers.front()) return a.introducers.front() < b.introducers.front();
      return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
  } else {
    for (std::size_t i = 1; i < edges.size(); ++i)
      GAPMINER_CHECK(edges[i - 1].time <= edges[i].time, "edge times must be non-decreasing in tie order");
  }

  TemporalConceptNetwork net;
  net.discipline_ = std::move(discipline);
  net.concepts_ = std::move(concepts);
  net.edges_ = std::move(edges);
  net.edge_index_.reserve(net.edges_.size());
  for (EdgeRank r = 0; r < net.edges_.size(); ++r) {
    const auto& e = net.edges_[r];
    GAPMINER_CHECK(net.edge_index_.emplace(pair_key(e.u, e.v), r).second, "duplicate concept pair in network");
    for (const auto& paper : e.introducers) net.introduced_[paper].push_back(r);
  }
  return net;
}

std::optional<VertexId> TemporalConceptNetwork::find_vertex(std::string_view concept_id) const {
  auto it = std::lower_bound(concepts_.begin(), concepts_.end(), concept_id);
  if (it == concepts_.end() || *it != concept_id) return std::nullopt;
  return static_cast<VertexId>(it - concepts_.begin());
}

std::optional<EdgeRank> TemporalConceptNetwork::find_edge(VertexId a, VertexId b) const {
  auto it = edge_index_.find(pair_key(a, b));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const EdgeRank> TemporalConceptNetwork::introduced_by(std::string_view paper_id) const {
  auto it = introduced_.find(std::string(paper_id));
  if (it == introduced_.end()) return {};
  return it->second;
}

TemporalConceptNetwork build_network(const CorpusStore& store, std::string_view discipline) {
  auto disc = store.find_concept(discipline);
  if (!disc || store.concept_info(*disc).level != 0)
    throw ConfigError("unknown discipline: " + std::string(discipline));

  struct Draft {
    ConceptIndex u, v;
    Year time;
    std::vector<PaperIndex> introducers;
  };
  std::vector<Draft> drafts;
  std::unordered_map<std::uint64_t, std::size_t> slot;
  for (PaperIndex p = 0; p < store.size(); ++p) {
    auto ds = store.disciplines_of(p);
    if (!std::binary_search(ds.begin(), ds.end(), *disc)) continue;
    const Year year = store.paper(p).year;
    auto cs = store.concepts_of(p);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        auto [it, inserted] = slot.try_emplace(pair_key(cs[i], cs[j]), drafts.size());
        if (inserted) {
          drafts.push_back({cs[i], cs[j], year, {p}});
        } else if (drafts[it->second].time == year) {
          drafts[it->second].introducers.push_back(p);
        }
      }
    }
  }

  std::vector<ConceptIndex> nodes;
  nodes.reserve(drafts.size() * 2);
  for (const auto& d : drafts) {
    nodes.push_back(d.u);
    nodes.push_back(d.v);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto local = [&](ConceptIndex c) {
    return static_cast<VertexId>(std::lower_bound(nodes.begin(), nodes.end(), c) - nodes.begin());
  };

  // Store order within a year is id order, so sorting on paper index here
  // matches the canonical string ordering.
  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.introducers.front() != b.introducers.front()) return a.introducers.front() < b.introducers.front();
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });

  std::vector<std::string> concepts;
  concepts.reserve(nodes.size());
  for (auto c : nodes) concepts.push_back(store.concept_info(c).id);
  std::vector<NetworkEdge> edges;
  edges.reserve(drafts.size());
  for (auto& d : drafts) {
    NetworkEdge e{local(d.u), local(d.v), d.time, {}};
    e.introducers.reserve(d.introducers.size());
    for (auto p : d.introducers) e.introducers.push_back(store.paper(p).id);
    edges.push_back(std::move(e));
  }
  return TemporalConceptNetwork::from_edges(std::string(discipline), std::move(concepts), std::move(edges),
                                            TemporalConceptNetwork::EdgeOrder::kAsGiven);
}

std::vector<TemporalConceptNetwork> build_networks(const CorpusStore& store, int threads) {
  const auto& disciplines = store.disciplines();
  std::vector<TemporalConceptNetwork> networks(disciplines.size());
  parallel_for(disciplines.size(), threads, [&](std::size_t i) {
    networks[i] = build_network(store, store.concept_info(disciplines[i]).id);
  });
  return networks;
}

std::vector<ConceptPair> novel_pairs(const PaperRecord& paper, const TemporalConceptNetwork& network) {
  const bool member = std::any_of(paper.level0.begin(), paper.level0.end(), [&](const ConceptScore& s) {
    return s.confidence > 0.0 && s.concept_id == network.discipline();
  });
  if (!member) throw ConfigError("paper " + paper.id + " is not in discipline " + network.discipline());
  std::vector<ConceptPair> pairs;
  for (EdgeRank r : network.introduced_by(paper.id)) {
    const auto& e = network.edge(r);
    pairs.emplace_back(network.concepts()[e.u], network.concepts()[e.v]);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

// ---------------------------------------------------------------------------
// Null model

CorpusStore randomize_labels(const CorpusStore& store, std::uint64_t seed) {
  std::map<std::vector<ConceptIndex>, std::vector<PaperIndex>> groups;
  for (PaperIndex p = 0; p < store.size(); ++p) {
    auto ds = store.disciplines_of(p);
    groups[std::vector<ConceptIndex>(ds.begin(), ds.end())].push_back(p);
  }

  std::vector<PaperRecord> records(store.papers().begin(), store.papers().end());
  std::uint64_t group_ordinal = 0;
  for (const auto& [signature, members] : groups) {
    struct Unit {
      ConceptIndex concept_index;
      double confidence;
    };
    std::vector<Unit> units;
    std::vector<std::size_t> offsets{0};
    std::size_t widest = 0;
    for (PaperIndex p : members) {
      for (const auto& s : store.paper(p).level3) {
        if (s.confidence > 0.0) units.push_back({*store.find_concept(s.concept_id), s.confidence});
      }
      offsets.push_back(units.size());
      widest = std::max(widest, offsets.back() - offsets[offsets.size() - 2]);
    }
    std::vector<ConceptIndex> distinct;
    for (const auto& u : units) distinct.push_back(u.concept_index);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (widest > distinct.size())
      throw DataError("null model infeasible: a paper needs " + std::to_string(widest) +
                      " distinct labels but its discipline group has " + std::to_string(distinct.size()));

    Rng rng(derive_seed(seed, group_ordinal++));
    rng.shuffle(std::span<Unit>(units));

    std::vector<std::size_t> owner(units.size());
    for (std::size_t m = 0; m < members.size(); ++m)
      for (std::size_t k = offsets[m]; k < offsets[m + 1]; ++k) owner[k] = m;
    auto holds = [&](std::size_t m, ConceptIndex c, std::size_t except) {
      for (std::size_t k = offsets[m]; k < offsets[m + 1]; ++k)
        if (k != except && units[k].concept_index == c) return true;
      return false;
    };

    // Resample colliding slots by swapping with random slots elsewhere.
    const std::size_t budget = 1000 * units.size() + 1000;
    std::size_t attempts = 0;
    for (std::size_t m = 0; m < members.size(); ++m) {
      for (std::size_t s = offsets[m]; s < offsets[m + 1]; ++s) {
        while (holds(m, units[s].concept_index, s)) {
          if (++attempts > budget)
            throw DataError("null model infeasible: could not resolve label collisions for paper " +
                            store.paper(members[m]).id);
          std::size_t t = rng.below(units.size());
          std::size_t other = owner[t];
          if (other == m) continue;
          if (holds(m, units[t].concept_index, s) || holds(other, units[s].concept_index, t)) continue;
          std::swap(units[s], units[t]);
        }
      }
    }

    for (std::size_t m = 0; m < members.size(); ++m) {
      auto& level3 = records[members[m]].level3;
      level3.clear();
      for (std::size_t k = offsets[m]; k < offsets[m + 1]; ++k)
        level3.push_back({store.concept_info(units[k].concept_index).id, units[k].confidence});
      std::sort(level3.begin(), level3.end(),
                [](const ConceptScore& a, const ConceptScore& b) { return a.concept_id < b.concept_id; });
    }
  }
  return CorpusStore::from_records(std::move(records));
}

// ---------------------------------------------------------------------------
// Dump format

void write_networks(std::ostream& out, std::span<const TemporalConceptNetwork> networks) {
  for (const auto& net : networks) {
    csv::write_row(out, {"#discipline", net.discipline()});
    std::vector<std::string> row;
    for (const auto& e : net.edges()) {
      row.clear();
      row.push_back(net.concepts()[e.u]);
      row.push_back(net.concepts()[e.v]);
      row.push_back(std::to_string(e.time));
      row.insert(row.end(), e.introducers.begin(), e.introducers.end());
      csv::write_row(out, row);
    }
  }
}

std::vector<TemporalConceptNetwork> read_networks(std::istream& in) {
  struct RawEdge {
    std::string u, v;
    Year time;
    std::vector<std::string> introducers;
  };
  std::vector<TemporalConceptNetwork> networks;
  std::optional<std::string> discipline;
  std::vector<RawEdge> raw;
  auto flush = [&] {
    if (!discipline) return;
    std::vector<std::string> concepts;
    for (const auto& e : raw) {
      concepts.push_back(e.u);
      concepts.push_back(e.v);
    }
    std::sort(concepts.begin(), concepts.end());
    concepts.erase(std::unique(concepts.begin(), concepts.end()), concepts.end());
    auto local = [&](const std::string& c) {
      return static_cast<VertexId>(std::lower_bound(concepts.begin(), concepts.end(), c) - concepts.begin());
    };
    std::vector<NetworkEdge> edges;
    edges.reserve(raw.size());
    for (auto& e : raw) {
      VertexId a = local(e.u), b = local(e.v);
      if (a > b) std::swap(a, b);
      edges.push_back({a, b, e.time, std::move(e.introducers)});
    }
    networks.push_back(TemporalConceptNetwork::from_edges(*discipline, std::move(concepts), std::move(edges),
                                                          TemporalConceptNetwork::EdgeOrder::kAsGiven));
    raw.clear();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = csv::split_row(line);
    if (fields[0] == "#discipline") {
      if (fields.size() != 2) throw DataError("network dump line " + std::to_string(line_no) + ": bad header");
      flush();
      discipline = fields[1];
      continue;
    }
    if (!discipline || fields.size() < 4)
      throw DataError("network dump line " + std::to_string(line_no) + ": expected u,v,time,introducers");
    Year time = 0;
    auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), time);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size())
      throw DataError("network dump line " + std::to_string(line_no) + ": bad time");
    raw.push_back({fields[0], fields[1], time, std::vector<std::string>(fields.begin() + 3, fields.end())});
  }
  flush();
  return networks;
}

}  // namespace gapminer
