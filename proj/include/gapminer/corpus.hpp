#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gapminer/common.hpp"

namespace gapminer {

struct ConceptScore {
  std::string concept_id;
  double confidence = 0.0;
  bool operator==(const ConceptScore&) const = default;
};

struct Affiliation {
  std::string author_id;
  double latitude = 0.0;
  double longitude = 0.0;
  bool operator==(const Affiliation&) const = default;
};

/// One publication. After validation the concept lists are sorted by id with
/// duplicates merged, references are sorted and deduplicated and never
/// contain the paper itself, and authors keep their order with repeats dropped.
struct PaperRecord {
  std::string id;
  Year year = 0;
  std::optional<std::string> title;
  std::optional<std::string> venue;
  std::vector<ConceptScore> level0;
  std::vector<ConceptScore> level3;
  std::vector<std::string> references;
  std::vector<std::string> authors;
  std::vector<Affiliation> affiliations;

  bool operator==(const PaperRecord&) const = default;
};

inline constexpr int kSchemaVersion = 1;

struct IngestConfig {
  Year year_min = 1900;
  Year year_max = 2020;
  int schema_version = kSchemaVersion;
  /// Loading aborts when the malformed share of record lines exceeds this.
  double max_malformed_fraction = 0.5;
};

enum class RejectReason {
  kMalformed,
  kDuplicateId,
  kYearOutOfRange,
  kNoPositiveLevel0,
  kTooFewPositiveLevel3,
};

std::string_view to_string(RejectReason reason);

struct Rejection {
  std::string paper_id;
  std::vector<RejectReason> reasons;
  std::string detail;
};

/// Parses one JSON record line. Returns nullopt (and fills `error`) when a
/// mandatory key is missing or has the wrong type.
std::optional<PaperRecord> parse_record(std::string_view line, std::string* error = nullptr);

/// Applies the inclusion filters and normalizes set-valued fields.
std::variant<PaperRecord, Rejection> validate_record(PaperRecord raw, const IngestConfig& config = {});

/// Canonical JSON line for a record, keys in sorted order.
std::string serialize_record(const PaperRecord& record);

struct ConceptInfo {
  std::string id;
  int level = 3;
  Year first_year_seen = 0;
  bool operator==(const ConceptInfo&) const = default;
};

/// Immutable, validated collection of papers ordered by (year, id).
class CorpusStore {
 public:
  struct YearRange {
    PaperIndex begin = 0;
    PaperIndex end = 0;
  };

  CorpusStore() = default;
  CorpusStore(const CorpusStore& other);
  CorpusStore& operator=(const CorpusStore& other);
  CorpusStore(CorpusStore&&) noexcept = default;
  CorpusStore& operator=(CorpusStore&&) noexcept = default;

  /// Records must already be validated. Throws DataError on duplicate ids.
  static CorpusStore from_records(std::vector<PaperRecord> records);

  std::size_t size() const { return papers_.size(); }
  bool empty() const { return papers_.empty(); }
  const PaperRecord& paper(PaperIndex i) const { return papers_[i]; }
  std::span<const PaperRecord> papers() const { return papers_; }
  std::optional<PaperIndex> find(std::string_view id) const;

  /// Distinct years, ascending.
  const std::vector<Year>& years() const { return years_; }
  YearRange year_range(Year year) const;
  Year min_year() const { return years_.empty() ? 0 : years_.front(); }
  Year max_year() const { return years_.empty() ? 0 : years_.back(); }

  /// Registry sorted by concept id, so comparing indices compares ids.
  std::span<const ConceptInfo> concepts() const { return concepts_; }
  std::optional<ConceptIndex> find_concept(std::string_view id) const;
  const ConceptInfo& concept_info(ConceptIndex c) const { return concepts_[c]; }

  /// Positive-confidence level-0 concepts of a paper, ascending index.
  std::span<const ConceptIndex> disciplines_of(PaperIndex i) const;
  /// Positive-confidence level-3 concepts of a paper, ascending index.
  std::span<const ConceptIndex> concepts_of(PaperIndex i) const;
  /// Level-0 concepts with at least one positively assigned paper, ascending.
  const std::vector<ConceptIndex>& disciplines() const { return disciplines_; }

  std::size_t author_count() const { return author_ids_.size(); }
  const std::string& author_id(AuthorIndex a) const { return author_ids_[a]; }
  std::span<const AuthorIndex> authors_of(PaperIndex i) const;

  /// Concepts listed at both level 0 and level 3; the first level seen wins.
  std::size_t level_conflicts() const { return level_conflicts_; }

  bool operator==(const CorpusStore& other) const { return papers_ == other.papers_; }

 private:
  std::vector<PaperRecord> papers_;
  std::unordered_map<std::string_view, PaperIndex> by_id_;
  std::vector<Year> years_;
  std::vector<YearRange> year_ranges_;
  std::vector<ConceptInfo> concepts_;
  std::unordered_map<std::string_view, ConceptIndex> concept_by_id_;
  std::vector<ConceptIndex> disciplines_;
  // CSR layouts, one slice per paper.
  std::vector<std::uint32_t> l0_offsets_, l3_offsets_, author_offsets_;
  std::vector<ConceptIndex> l0_data_, l3_data_;
  std::vector<AuthorIndex> author_data_;
  std::vector<std::string> author_ids_;
  std::size_t level_conflicts_ = 0;

  void build_indices();
};

struct IngestReport {
  std::size_t record_lines = 0;
  std::size_t accepted = 0;
  std::size_t malformed = 0;
  std::vector<Rejection> rejections;
};

struct LoadedCorpus {
  CorpusStore store;
  IngestReport report;
};

/// Streams a line-delimited corpus file. The first non-blank line must be the
/// schema header `{"schema_version": N}`; an entirely blank file is an empty
/// corpus. Throws DataError on unreadable input, schema mismatch, or when
/// malformed lines exceed the configured fraction.
LoadedCorpus load_corpus(const std::filesystem::path& path, const IngestConfig& config = {});
LoadedCorpus load_corpus(std::istream& in, const IngestConfig& config = {});

void write_corpus(std::ostream& out, const CorpusStore& store);
void write_corpus(const std::filesystem::path& path, const CorpusStore& store);

/// `paper_id,reason` rows; multiple failed filters are joined with ';'.
void write_rejections(std::ostream& out, std::span<const Rejection> rejections);

/// Forward (citers) and backward (resolved references) adjacency over the
/// store. References to papers outside the store are counted, not indexed.
class CitationIndex {
 public:
  static CitationIndex build(const CorpusStore& store);

  /// Citing papers in store order (ascending year, then id).
  std::span<const PaperIndex> citers(PaperIndex p) const;
  /// In-store references in store order.
  std::span<const PaperIndex> references(PaperIndex p) const;
  std::size_t external_references(PaperIndex p) const { return external_[p]; }
  std::size_t external_total() const { return external_total_; }
  /// Citations whose citing year precedes the cited year.
  std::size_t anomalies() const { return anomalies_; }
  std::size_t size() const { return external_.size(); }

 private:
  std::vector<std::uint32_t> fwd_offsets_, bwd_offsets_;
  std::vector<PaperIndex> fwd_, bwd_;
  std::vector<std::uint32_t> external_;
  std::size_t external_total_ = 0;
  std::size_t anomalies_ = 0;
};

}  // namespace gapminer
