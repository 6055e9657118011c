#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gapminer/common.hpp"
#include "gapminer/corpus.hpp"

namespace gapminer {

using VertexId = std::uint32_t;
using EdgeRank = std::uint32_t;

/// First co-assignment of a concept pair within one discipline.
struct NetworkEdge {
  VertexId u = 0;  // u < v; local ids follow lexicographic concept order
  VertexId v = 0;
  Year time = 0;
  std::vector<std::string> introducers;  // every paper of year `time` carrying the pair, ascending

  bool operator==(const NetworkEdge&) const = default;
};

/// Cumulative co-occurrence graph of level-3 concepts within one discipline.
/// Edges are stored in tie-rank order: ascending (time, first introducer id,
/// pair); an edge's position is its tie rank.
class TemporalConceptNetwork {
 public:
  enum class EdgeOrder {
    kCanonical,  // sort edges into tie-rank order
    kAsGiven,    // keep the caller's order; times must be non-decreasing
  };

  TemporalConceptNetwork() = default;

  /// `concepts` must be strictly increasing. Throws InvariantError when an edge
  /// is malformed or a pair repeats.
  static TemporalConceptNetwork from_edges(std::string discipline, std::vector<std::string> concepts,
                                           std::vector<NetworkEdge> edges,
                                           EdgeOrder order = EdgeOrder::kCanonical);

  const std::string& discipline() const { return discipline_; }
  const std::vector<std::string>& concepts() const { return concepts_; }
  std::size_t vertex_count() const { return concepts_.size(); }
  std::span<const NetworkEdge> edges() const { return edges_; }
  const NetworkEdge& edge(EdgeRank rank) const { return edges_[rank]; }
  std::size_t edge_count() const { return edges_.size(); }
  std::optional<VertexId> find_vertex(std::string_view concept_id) const;
  std::optional<EdgeRank> find_edge(VertexId a, VertexId b) const;
  /// Latest edge time; 0 for an empty network.
  Year tau_max() const { return edges_.empty() ? 0 : edges_.back().time; }
  /// Ranks of the edges a paper introduced, ascending.
  std::span<const EdgeRank> introduced_by(std::string_view paper_id) const;

  bool operator==(const TemporalConceptNetwork& other) const {
    return discipline_ == other.discipline_ && concepts_ == other.concepts_ && edges_ == other.edges_;
  }

 private:
  std::string discipline_;
  std::vector<std::string> concepts_;
  std::vector<NetworkEdge> edges_;
  std::unordered_map<std::uint64_t, EdgeRank> edge_index_;
  std::unordered_map<std::string, std::vector<EdgeRank>> introduced_;
};

/// Network of one level-0 discipline built from every paper positively
/// assigned to it. Throws ConfigError for an unknown discipline.
TemporalConceptNetwork build_network(const CorpusStore& store, std::string_view discipline);

/// One network per discipline of the store, in discipline id order.
std::vector<TemporalConceptNetwork> build_networks(const CorpusStore& store, int threads = 1);

using ConceptPair = std::pair<std::string, std::string>;

/// Pairs first co-assigned by `paper` in this network. Throws ConfigError
/// when the paper is not positively assigned to the network's discipline.
std::vector<ConceptPair> novel_pairs(const PaperRecord& paper, const TemporalConceptNetwork& network);

/// Null model: permutes level-3 labels among papers, keeping each paper's
/// label count and each discipline's label multiset. Papers are shuffled
/// within groups sharing the same discipline set; labels on a paper stay
/// distinct. Throws DataError when a group cannot be made collision-free.
CorpusStore randomize_labels(const CorpusStore& store, std::uint64_t seed);

/// Dump: a `#discipline,<id>` line opens each network, followed by one
/// `u,v,time,introducer...` row per edge in tie-rank order.
void write_networks(std::ostream& out, std::span<const TemporalConceptNetwork> networks);
std::vector<TemporalConceptNetwork> read_networks(std::istream& in);

}  // namespace gapminer
