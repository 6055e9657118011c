#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gapminer/concept_net.hpp"
#include "gapminer/corpus.hpp"
#include "gapminer/topology.hpp"

namespace gapminer {

enum class Category : std::uint8_t { kGapOpener, kNovelPairNonGap, kNoNovelPair };
inline constexpr Category kCategories[] = {Category::kGapOpener, Category::kNovelPairNonGap, Category::kNoNovelPair};

std::string_view to_string(Category category);

enum class EvidenceKind : std::uint8_t { kGap, kNovel };

struct Evidence {
  std::string discipline;
  ConceptPair pair;
  EvidenceKind kind = EvidenceKind::kNovel;
  bool operator==(const Evidence&) const = default;
};

struct PaperClassification {
  std::string paper_id;
  Category category = Category::kNoNovelPair;
  std::vector<Evidence> evidence;  // by discipline, then edge rank

  std::size_t gap_count() const;
  std::size_t novel_count() const;  // every introduced pair, gap ones included
  bool operator==(const PaperClassification&) const = default;
};

/// Category implied by a list of evidence: any gap entry wins.
Category categorize(std::span<const Evidence> evidence);

/// Gap edges of one discipline, as network tie ranks (ascending).
struct DisciplineGaps {
  std::string discipline;
  std::vector<EdgeRank> edges;
};

/// Runs the filtration and reduction for one network.
DisciplineGaps find_gaps(const TemporalConceptNetwork& network, int max_dim = kDefaultMaxDim,
                         int min_persistence = kDefaultMinPersistence);

/// Gap edges recovered from a diagram dump of this network.
DisciplineGaps find_gaps(const TemporalConceptNetwork& network, std::span<const DiagramFeature> features,
                         int min_persistence = kDefaultMinPersistence);

/// One classification per paper, in store order. `networks` and `gaps` are
/// matched by discipline id; throws DataError when a discipline holding
/// papers has no network or no gap list.
std::vector<PaperClassification> classify_all(const CorpusStore& store,
                                              std::span<const TemporalConceptNetwork> networks,
                                              std::span<const DisciplineGaps> gaps, int threads = 1);

enum class Grouping : std::uint8_t { kOverall, kDiscipline, kYear };
enum class Source : std::uint8_t { kReal, kRandom };

std::string_view to_string(Grouping grouping);
std::string_view to_string(Source source);

struct ShareRow {
  Grouping grouping = Grouping::kOverall;
  std::string key;  // "all", a discipline id, or a year
  Category category = Category::kGapOpener;
  double count = 0;  // mean count for random rows
  double fraction = 0;
  Source source = Source::kReal;
  std::optional<double> standard_error;  // random rows only
};

/// Rows per group in group order, each group listing every category.
struct ShareTable {
  std::vector<ShareRow> rows;
};

/// Papers with several disciplines count once in each discipline group and
/// once in the overall group.
ShareTable share_table(std::span<const PaperClassification> classifications, const CorpusStore& store,
                       Grouping grouping);

/// Overall, discipline and year groupings concatenated.
ShareTable share_tables(std::span<const PaperClassification> classifications, const CorpusStore& store);

struct NullOptions {
  int replicates = 10;
  int max_dim = kDefaultMaxDim;
  int min_persistence = kDefaultMinPersistence;
  int threads = 1;
};

/// Randomize, rebuild, reduce and classify `replicates` times; rows hold the
/// mean count and fraction with the standard error of the mean fraction.
/// Replicate r draws from derive_seed(seed, r).
ShareTable null_comparison(const CorpusStore& store, std::uint64_t seed, const NullOptions& options = {});

/// `paper_id,category,n_gap_edges,n_novel_pairs`
void write_classification(std::ostream& out, std::span<const PaperClassification> classifications);
/// `paper_id,discipline,concept_a,concept_b,kind`
void write_evidence(std::ostream& out, std::span<const PaperClassification> classifications);
/// `grouping,key,category,count,fraction,source,stderr`
void write_shares(std::ostream& out, const ShareTable& table);

/// Rebuilds classifications from the two files above; papers keep the
/// order of the classification file.
std::vector<PaperClassification> read_classification(std::istream& classes, std::istream& evidence);

}  // namespace gapminer
