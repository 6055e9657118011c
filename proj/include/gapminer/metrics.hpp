#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gapminer/concept_net.hpp"
#include "gapminer/corpus.hpp"
#include "gapminer/random.hpp"

namespace gapminer::metrics {

// Disruption

struct DisruptionCounts {
  std::int64_t n_i = 0;  // cite the focal paper but none of its references
  std::int64_t n_j = 0;  // cite the focal paper and at least one reference
  std::int64_t n_k = 0;  // cite a reference but not the focal paper
};

/// (n_i - n_j) / (n_i + n_j + n_k); missing when the denominator is zero.
std::optional<double> cd_from_counts(const DisruptionCounts& counts);

/// Counts over in-store citations. n_k only considers papers published no
/// earlier than the focal paper. With a window, citing papers later than
/// year + window are ignored.
DisruptionCounts disruption_counts(PaperIndex p, const CorpusStore& store, const CitationIndex& index,
                                   std::optional<int> window = std::nullopt);

/// Missing when the paper lists no references or nothing cites the neighbourhood.
std::optional<double> cd_index(PaperIndex p, const CorpusStore& store, const CitationIndex& index,
                               std::optional<int> window = std::nullopt);

// Percentiles

/// Mid-rank percentile within each cohort: 100 * (below + equal / 2) / size,
/// where size counts the cohort's non-missing values. Missing stays missing.
std::vector<std::optional<double>> percentile_rank(std::span<const std::optional<double>> values,
                                                   std::span<const std::int64_t> cohorts);

/// Sample quantile by linear interpolation at position q * (n - 1) of the
/// sorted values. `sorted` must be non-empty and ascending.
double quantile_linear(std::span<const double> sorted, double q);

// Sleeping Beauty

inline constexpr int kDefaultSbHorizon = 20;

/// c[t] = citations received t years after publication, t in [0, T] with
/// T = min(horizon, last corpus year - publication year).
std::vector<std::int64_t> citation_trajectory(PaperIndex p, const CorpusStore& store, const CitationIndex& index,
                                              int horizon = kDefaultSbHorizon);

/// Smallest index of the maximum. `c` must be non-empty.
std::size_t peak_index(std::span<const std::int64_t> c);

/// B = sum_{t=0}^{t_m} (l_t - c_t) / max(1, c_t) with the line l through
/// (0, c_0) and (t_m, c_{t_m}); 0 when t_m = 0 or the trajectory is empty.
double sleeping_beauty(std::span<const std::int64_t> c);

// Citation windows and top-k

inline constexpr int kMaxWindow = 20;

/// C1..C20: citations from years [year, year + k]; missing when year + k
/// passes `horizon` (the last observed year).
std::array<std::optional<std::int64_t>, kMaxWindow> citation_windows(PaperIndex p, const CorpusStore& store,
                                                                     const CitationIndex& index, Year horizon);

/// Threshold at the (100 - k)th percentile with weights i / (n + 1) and
/// linear interpolation, clamped to the sample range.
double top_threshold(std::span<const double> sorted, double k_percent);

/// 1 when the paper's citation count reaches the top-k threshold of its
/// year x discipline cohort for any of its disciplines.
std::vector<std::uint8_t> top_k_flags(const CorpusStore& store, std::span<const std::int64_t> citations,
                                      double k_percent);

// Concepts linked by novel pairs

struct ConceptPairStats {
  std::optional<double> age;
  std::optional<double> popularity;      // prior papers, strictly before the publication year
  std::optional<double> popularity_5;    // papers before year + 5
  std::optional<double> popularity_10;   // papers before year + 10
};

/// Per-concept publication years, for popularity lookups.
class ConceptOccurrences {
 public:
  explicit ConceptOccurrences(const CorpusStore& store);
  /// Papers carrying the concept (positive level-3) published before `year`.
  std::int64_t before(ConceptIndex c, Year year) const;

 private:
  std::vector<std::vector<Year>> years_;
};

/// Means over the distinct pairs of the mean over both endpoints. Missing
/// when `pairs` is empty.
ConceptPairStats concept_pair_stats(const PaperRecord& paper, std::span<const ConceptPair> pairs,
                                    const CorpusStore& store, const ConceptOccurrences& occurrences);

// Teams

inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle distance on a spherical Earth.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct TeamStats {
  std::int64_t team_size = 0;
  std::optional<double> career_age;
  std::optional<double> freshness;  // team sizes 2..20 only
  std::optional<double> geo_km;     // at least two located affiliations
};

/// First publication year per author and each author's papers in store order.
class AuthorHistory {
 public:
  explicit AuthorHistory(const CorpusStore& store);
  Year first_year(AuthorIndex a) const { return first_year_[a]; }
  std::span<const PaperIndex> papers(AuthorIndex a) const;

 private:
  std::vector<Year> first_year_;
  std::vector<std::uint32_t> offsets_;
  std::vector<PaperIndex> papers_;
};

TeamStats team_stats(PaperIndex p, const CorpusStore& store, const AuthorHistory& history);

// Novelty

struct NoveltyConfig {
  int n_rand = 10;
  double sd_floor = 1e-6;
  int swaps_per_edge = 10;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct NoveltyProfile {
  std::vector<double> z_scores;  // one per distinct journal pair of the reference list
  double tenth_percentile = 0;
};

/// References of a set of same-year citing papers.
struct ReferenceLayer {
  std::vector<PaperIndex> citing;
  std::vector<std::vector<PaperIndex>> cited;  // parallel to `citing`
};

/// Degree-preserving citation switching: picks two reference edges and swaps
/// their cited endpoints unless that duplicates a reference or makes a
/// self-citation. Returns the number of accepted swaps.
std::size_t rewire(ReferenceLayer& layer, Rng& rng, std::size_t attempts);

/// Per paper, missing unless the paper has a venue and its in-store
/// references resolve to at least two distinct venues. Replicate r of year y
/// uses derive_seed(seed, y, r).
std::vector<std::optional<NoveltyProfile>> novelty(const CorpusStore& store, const CitationIndex& index,
                                                   const NoveltyConfig& config);

// Title verbs

/// Inflected forms of the creation, innovation, demonstration, improvement
/// and exploitation verbs.
const std::vector<std::string>& default_verb_lexicon();

/// One word per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> load_lexicon(const std::filesystem::path& path);

/// Lowercased runs of ASCII letters.
std::vector<std::string> tokenize(std::string_view text);

/// r = (occurrences per token in A) / (occurrences per token in B); +inf when
/// only A uses the verb, 0 when only B does; verbs in neither are omitted.
/// Throws DataError when either collection has no tokens.
std::map<std::string, double> verb_ratio(std::span<const std::string> titles_a, std::span<const std::string> titles_b,
                                         std::span<const std::string> lexicon);

}  // namespace gapminer::metrics
