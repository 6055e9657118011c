#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gapminer/common.hpp"
#include "gapminer/concept_net.hpp"

namespace gapminer {

using SimplexIndex = std::uint32_t;

inline constexpr int kDefaultMaxDim = 2;
inline constexpr int kDefaultMinPersistence = 1;

/// Clique (flag) complex of a temporal network, simplices in filtration order.
///
/// Order key: (value, dim, tie key). Vertices tie on vertex id, edges on their
/// network tie rank, higher simplices on the descending list of their edges'
/// tie ranks. A vertex enters with its earliest incident edge, a clique with
/// its latest edge. Faces always precede cofaces.
class FlagFiltration {
 public:
  struct IndexRange {
    SimplexIndex begin = 0;
    SimplexIndex end = 0;
  };

  FlagFiltration() = default;

  static FlagFiltration build(const TemporalConceptNetwork& network, int max_dim = kDefaultMaxDim);

  std::size_t size() const { return records_.size(); }
  int max_dim() const { return max_dim_; }
  int dim(SimplexIndex s) const { return records_[s].dim; }
  Year value(SimplexIndex s) const { return records_[s].value; }
  std::span<const VertexId> vertices(SimplexIndex s) const {
    return {vertex_data_.data() + records_[s].offset, static_cast<std::size_t>(records_[s].dim) + 1};
  }
  /// Network tie rank of an edge simplex.
  EdgeRank edge_rank(SimplexIndex s) const { return records_[s].tie; }

  /// Faces of s as filtration indices, ascending. Empty for vertices.
  std::vector<SimplexIndex> boundary(SimplexIndex s) const;
  void boundary(SimplexIndex s, std::vector<SimplexIndex>& out) const;

  /// Index of the simplex with these (sorted) vertices, if present.
  std::optional<SimplexIndex> find(std::span<const VertexId> vertices) const;

  /// Number of simplices of each dimension.
  std::vector<std::size_t> counts() const;

  /// Distinct filtration values ascending, with the index range each one
  /// appends to the complex.
  const std::map<Year, IndexRange>& steps() const { return steps_; }

  const std::vector<std::string>& vertex_labels() const { return labels_; }

 private:
  struct Record {
    std::uint32_t offset;
    Year value;
    EdgeRank tie;  // vertex id for vertices, network rank for edges, unused above
    std::int8_t dim;
  };
  std::vector<Record> records_;
  std::vector<VertexId> vertex_data_;
  std::vector<SimplexIndex> vertex_simplex_;                  // vertex id -> index
  std::unordered_map<std::uint64_t, SimplexIndex> edge_simplex_;  // packed pair -> index
  std::vector<std::vector<SimplexIndex>> lex_by_dim_;            // dims >= 2, lexicographic
  std::map<Year, IndexRange> steps_;
  std::vector<std::string> labels_;
  int max_dim_ = kDefaultMaxDim;
};

struct PersistencePair {
  SimplexIndex birth = 0;
  SimplexIndex death = 0;
  int dim = 0;  // dimension of the class, i.e. of the birth simplex
  bool operator==(const PersistencePair&) const = default;
};

struct EssentialClass {
  SimplexIndex birth = 0;
  int dim = 0;
  bool operator==(const EssentialClass&) const = default;
};

/// Pairs sorted by (dim, birth); essentials sorted by (dim, birth).
struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  std::vector<EssentialClass> essentials;
  bool operator==(const PersistenceDiagram&) const = default;
};

struct ReductionOptions {
  /// Resolve dimension 0 with union-find instead of reducing edge columns.
  bool union_find_dim0 = true;
  /// Skip columns already known to be positive (twist optimization).
  bool clearing = true;
};

/// Z/2 persistent homology by column reduction, dimensions high to low.
PersistenceDiagram compute_persistence(const FlagFiltration& filtration, ReductionOptions options = {});

struct GapEdge {
  EdgeRank edge = 0;  // network tie rank
  SimplexIndex simplex = 0;
  Year birth = 0;
  std::optional<Year> death;  // nullopt for an essential class
};

/// Dimension-1 births that are essential or persist at least
/// `min_persistence` filtration steps of time.
std::vector<GapEdge> gap_edges(const PersistenceDiagram& diagram, const FlagFiltration& filtration,
                               int min_persistence = kDefaultMinPersistence);

inline constexpr std::size_t kBettiOracleLimit = 2000;

/// Betti numbers (dims 0..max_dim) of the subcomplex with values <= year, by
/// dense Z/2 elimination over explicitly built boundary matrices. Intended as
/// an independent check; throws ConfigError above kBettiOracleLimit simplices.
std::vector<std::int64_t> betti_oracle(const FlagFiltration& filtration, Year year);

/// Persistence features per discipline as `dim,birth_u,birth_v,birth_year,death_year`.
/// birth_v holds the remaining birth vertices separated by spaces (empty for
/// dimension 0); death_year is `inf` for essential classes.
void write_diagram(std::ostream& out, const std::string& discipline, const FlagFiltration& filtration,
                   const PersistenceDiagram& diagram);

struct DiagramFeature {
  int dim = 0;
  std::vector<std::string> birth_vertices;
  Year birth_year = 0;
  std::optional<Year> death_year;
  bool operator==(const DiagramFeature&) const = default;
};

/// Reads a dump written by write_diagram (possibly several disciplines).
std::map<std::string, std::vector<DiagramFeature>> read_diagrams(std::istream& in);

}  // namespace gapminer
