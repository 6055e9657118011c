#include "gapminer/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

#include "gapminer/csv.hpp"

namespace gapminer {

using nlohmann::json;

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kMalformed: return "malformed";
    case RejectReason::kDuplicateId: return "duplicate-id";
    case RejectReason::kYearOutOfRange: return "out-of-range-year";
    case RejectReason::kNoPositiveLevel0: return "no-positive-level0";
    case RejectReason::kTooFewPositiveLevel3: return "too-few-positive-level3";
  }
  return "unknown";
}

namespace {

bool read_concepts(const json& node, std::vector<ConceptScore>& out, std::string& error,
                   const char* key) {
  if (!node.is_array()) {
    error = std::string(key) + " is not an array";
    return false;
  }
  for (const auto& item : node) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_number()) {
      error = std::string(key) + " entries must be [concept, confidence]";
      return false;
    }
    double confidence = item[1].get<double>();
    if (!std::isfinite(confidence) || confidence < 0.0 || confidence > 1.0) {
      error = std::string(key) + " confidence outside [0, 1]";
      return false;
    }
    out.push_back({item[0].get<std::string>(), confidence});
  }
  return true;
}

bool read_strings(const json& node, std::vector<std::string>& out, std::string& error,
                  const char* key) {
  if (!node.is_array()) {
    error = std::string(key) + " is not an array";
    return false;
  }
  for (const auto& item : node) {
    if (!item.is_string()) {
      error = std::string(key) + " entries must be strings";
      return false;
    }
    out.push_back(item.get<std::string>());
  }
  return true;
}

bool read_optional_string(const json& obj, const char* key, std::optional<std::string>& out,
                          std::string& error) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return true;
  if (!it->is_string()) {
    error = std::string(key) + " is not a string";
    return false;
  }
  out = it->get<std::string>();
  return true;
}

// Merges duplicate concept ids (keeping the highest confidence) and sorts by id.
void normalize_concepts(std::vector<ConceptScore>& concepts) {
  std::sort(concepts.begin(), concepts.end(), [](const auto& a, const auto& b) {
    return a.concept_id != b.concept_id ? a.concept_id < b.concept_id : a.confidence > b.confidence;
  });
  concepts.erase(std::unique(concepts.begin(), concepts.end(),
                             [](const auto& a, const auto& b) { return a.concept_id == b.concept_id; }),
                 concepts.end());
}

std::size_t count_positive(const std::vector<ConceptScore>& concepts) {
  return static_cast<std::size_t>(std::count_if(concepts.begin(), concepts.end(),
                                                [](const auto& c) { return c.confidence > 0.0; }));
}

}  // namespace

std::optional<PaperRecord> parse_record(std::string_view line, std::string* error_out) {
  std::string error;
  auto fail = [&](std::string message) -> std::optional<PaperRecord> {
    if (error_out) *error_out = std::move(message);
    return std::nullopt;
  };
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded()) return fail("invalid JSON");
  if (!obj.is_object()) return fail("record is not an object");

  PaperRecord record;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || id->get_ref<const std::string&>().empty())
    return fail("missing or invalid id");
  record.id = id->get<std::string>();

  auto year = obj.find("year");
  if (year == obj.end() || !(year->is_number_integer() || year->is_number_unsigned()))
    return fail("missing or non-integer year");
  record.year = year->get<Year>();

  for (const char* key : {"l0", "l3", "refs"}) {
    if (!obj.contains(key)) return fail(std::string("missing ") + key);
  }
  if (!read_concepts(obj["l0"], record.level0, error, "l0")) return fail(error);
  if (!read_concepts(obj["l3"], record.level3, error, "l3")) return fail(error);
  if (!read_strings(obj["refs"], record.references, error, "refs")) return fail(error);

  if (!read_optional_string(obj, "title", record.title, error)) return fail(error);
  if (!read_optional_string(obj, "venue", record.venue, error)) return fail(error);
  if (auto it = obj.find("authors"); it != obj.end() && !it->is_null()) {
    if (!read_strings(*it, record.authors, error, "authors")) return fail(error);
  }
  if (auto it = obj.find("affil"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) return fail("affil is not an array");
    for (const auto& item : *it) {
      if (!item.is_array() || item.size() != 3 || !item[0].is_string() || !item[1].is_number() ||
          !item[2].is_number())
        return fail("affil entries must be [author, lat, lon]");
      Affiliation a{item[0].get<std::string>(), item[1].get<double>(), item[2].get<double>()};
      if (!(std::abs(a.latitude) <= 90.0) || !(std::abs(a.longitude) <= 180.0))
        return fail("affil coordinates out of range");
      record.affiliations.push_back(std::move(a));
    }
  }
  return record;
}

std::variant<PaperRecord, Rejection> validate_record(PaperRecord raw, const IngestConfig& config) {
  normalize_concepts(raw.level0);
  normalize_concepts(raw.level3);

  std::erase(raw.references, raw.id);
  std::sort(raw.references.begin(), raw.references.end());
  raw.references.erase(std::unique(raw.references.begin(), raw.references.end()), raw.references.end());

  std::unordered_set<std::string> seen;
  std::erase_if(raw.authors, [&](const std::string& a) { return !seen.insert(a).second; });

  Rejection rejection{raw.id, {}, {}};
  if (raw.year < config.year_min || raw.year > config.year_max)
    rejection.reasons.push_back(RejectReason::kYearOutOfRange);
  if (count_positive(raw.level0) < 1) rejection.reasons.push_back(RejectReason::kNoPositiveLevel0);
  if (count_positive(raw.level3) < 2) rejection.reasons.push_back(RejectReason::kTooFewPositiveLevel3);
  if (!rejection.reasons.empty()) return rejection;
  return raw;
}

std::string serialize_record(const PaperRecord& r) {
  auto concepts = [](const std::vector<ConceptScore>& list) {
    json arr = json::array();
    for (const auto& c : list) arr.push_back(json::array({c.concept_id, c.confidence}));
    return arr;
  };
  json obj;
  obj["id"] = r.id;
  obj["year"] = r.year;
  obj["l0"] = concepts(r.level0);
  obj["l3"] = concepts(r.level3);
  obj["refs"] = r.references;
  if (r.title) obj["title"] = *r.title;
  if (r.venue) obj["venue"] = *r.venue;
  if (!r.authors.empty()) obj["authors"] = r.authors;
  if (!r.affiliations.empty()) {
    json arr = json::array();
    for (const auto& a : r.affiliations) arr.push_back(json::array({a.author_id, a.latitude, a.longitude}));
    obj["affil"] = std::move(arr);
  }
  return obj.dump();
}

// ---------------------------------------------------------------------------
// CorpusStore

CorpusStore::CorpusStore(const CorpusStore& other) : papers_(other.papers_) { build_indices(); }

CorpusStore& CorpusStore::operator=(const CorpusStore& other) {
  if (this != &other) {
    papers_ = other.papers_;
    build_indices();
  }
  return *this;
}

CorpusStore CorpusStore::from_records(std::vector<PaperRecord> records) {
  std::sort(records.begin(), records.end(), [](const PaperRecord& a, const PaperRecord& b) {
    return a.year != b.year ? a.year < b.year : a.id < b.id;
  });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].id == records[i - 1].id && records[i].year == records[i - 1].year)
      throw DataError("duplicate paper id: " + records[i].id);
  }
  CorpusStore store;
  store.papers_ = std::move(records);
  store.build_indices();
  return store;
}

void CorpusStore::build_indices() {
  by_id_.clear();
  by_id_.reserve(papers_.size());
  years_.clear();
  year_ranges_.clear();
  for (PaperIndex i = 0; i < papers_.size(); ++i) {
    if (!by_id_.emplace(papers_[i].id, i).second) throw DataError("duplicate paper id: " + papers_[i].id);
    if (years_.empty() || years_.back() != papers_[i].year) {
      if (!year_ranges_.empty()) year_ranges_.back().end = i;
      years_.push_back(papers_[i].year);
      year_ranges_.push_back({i, i});
    }
  }
  if (!year_ranges_.empty()) year_ranges_.back().end = static_cast<PaperIndex>(papers_.size());

  // Concept registry, sorted by id.
  std::vector<std::string_view> ids;
  for (const auto& p : papers_) {
    for (const auto& c : p.level0) ids.push_back(c.concept_id);
    for (const auto& c : p.level3) ids.push_back(c.concept_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  concepts_.clear();
  concepts_.reserve(ids.size());
  for (auto id : ids) concepts_.push_back({std::string(id), -1, 0});
  concept_by_id_.clear();
  concept_by_id_.reserve(concepts_.size());
  for (ConceptIndex c = 0; c < concepts_.size(); ++c) concept_by_id_.emplace(concepts_[c].id, c);

  std::vector<char> positive_seen(concepts_.size(), 0);
  level_conflicts_ = 0;
  std::vector<char> conflicted(concepts_.size(), 0);
  auto visit = [&](const ConceptScore& score, int level, Year year) {
    ConceptIndex c = concept_by_id_.at(score.concept_id);
    ConceptInfo& info = concepts_[c];
    if (info.level < 0) {
      info.level = level;
      info.first_year_seen = year;
    } else if (info.level != level && !conflicted[c]) {
      conflicted[c] = 1;
      ++level_conflicts_;
    }
    // Papers are visited in year order, so the first positive sighting is the earliest.
    if (score.confidence > 0.0 && !positive_seen[c]) {
      positive_seen[c] = 1;
      info.first_year_seen = year;
    }
    return c;
  };

  l0_offsets_.assign(1, 0);
  l3_offsets_.assign(1, 0);
  l0_data_.clear();
  l3_data_.clear();
  std::vector<char> is_discipline(concepts_.size(), 0);
  for (const auto& p : papers_) {
    for (const auto& s : p.level0) {
      ConceptIndex c = visit(s, 0, p.year);
      if (s.confidence > 0.0) {
        l0_data_.push_back(c);
        is_discipline[c] = 1;
      }
    }
    for (const auto& s : p.level3) {
      ConceptIndex c = visit(s, 3, p.year);
      if (s.confidence > 0.0) l3_data_.push_back(c);
    }
    std::sort(l0_data_.begin() + l0_offsets_.back(), l0_data_.end());
    std::sort(l3_data_.begin() + l3_offsets_.back(), l3_data_.end());
    l0_offsets_.push_back(static_cast<std::uint32_t>(l0_data_.size()));
    l3_offsets_.push_back(static_cast<std::uint32_t>(l3_data_.size()));
  }
  disciplines_.clear();
  for (ConceptIndex c = 0; c < concepts_.size(); ++c)
    if (is_discipline[c]) disciplines_.push_back(c);

  // Authors.
  std::vector<std::string_view> names;
  for (const auto& p : papers_)
    for (const auto& a : p.authors) names.push_back(a);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  author_ids_.assign(names.begin(), names.end());
  std::unordered_map<std::string_view, AuthorIndex> author_index;
  author_index.reserve(author_ids_.size());
  for (AuthorIndex a = 0; a < author_ids_.size(); ++a) author_index.emplace(author_ids_[a], a);
  author_offsets_.assign(1, 0);
  author_data_.clear();
  for (const auto& p : papers_) {
    for (const auto& a : p.authors) author_data_.push_back(author_index.at(a));
    author_offsets_.push_back(static_cast<std::uint32_t>(author_data_.size()));
  }
}

std::optional<PaperIndex> CorpusStore::find(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

CorpusStore::YearRange CorpusStore::year_range(Year year) const {
  auto it = std::lower_bound(years_.begin(), years_.end(), year);
  if (it == years_.end() || *it != year) return {};
  return year_ranges_[static_cast<std::size_t>(it - years_.begin())];
}

std::optional<ConceptIndex> CorpusStore::find_concept(std::string_view id) const {
  auto it = concept_by_id_.find(id);
  if (it == concept_by_id_.end()) return std::nullopt;
  return it->second;
}

std::span<const ConceptIndex> CorpusStore::disciplines_of(PaperIndex i) const {
  return {l0_data_.data() + l0_offsets_[i], l0_offsets_[i + 1] - l0_offsets_[i]};
}

std::span<const ConceptIndex> CorpusStore::concepts_of(PaperIndex i) const {
  return {l3_data_.data() + l3_offsets_[i], l3_offsets_[i + 1] - l3_offsets_[i]};
}

std::span<const AuthorIndex> CorpusStore::authors_of(PaperIndex i) const {
  return {author_data_.data() + author_offsets_[i], author_offsets_[i + 1] - author_offsets_[i]};
}

// ---------------------------------------------------------------------------
// Loading and writing

LoadedCorpus load_corpus(std::istream& in, const IngestConfig& config) {
  IngestReport report;
  std::vector<PaperRecord> accepted;
  std::unordered_set<std::string> ids;
  bool header_seen = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (!header_seen) {
      json header = json::parse(line, nullptr, false);
      if (header.is_discarded() || !header.is_object() || !header.contains("schema_version"))
        throw DataError("line " + std::to_string(line_no) + ": expected schema_version header");
      const auto& version = header["schema_version"];
      if (!version.is_number_integer() || version.get<int>() != config.schema_version)
        throw DataError("schema version mismatch: expected " + std::to_string(config.schema_version) +
                        ", found " + version.dump());
      header_seen = true;
      continue;
    }
    ++report.record_lines;
    std::string error;
    auto raw = parse_record(line, &error);
    if (!raw) {
      ++report.malformed;
      report.rejections.push_back({"line:" + std::to_string(line_no), {RejectReason::kMalformed}, error});
      continue;
    }
    auto result = validate_record(std::move(*raw), config);
    if (auto* rejection = std::get_if<Rejection>(&result)) {
      report.rejections.push_back(std::move(*rejection));
      continue;
    }
    auto& record = std::get<PaperRecord>(result);
    if (!ids.insert(record.id).second) {
      report.rejections.push_back({record.id, {RejectReason::kDuplicateId}, {}});
      continue;
    }
    accepted.push_back(std::move(record));
  }
  if (in.bad()) throw DataError("read error while loading corpus");
  if (report.record_lines > 0 &&
      static_cast<double>(report.malformed) > config.max_malformed_fraction * static_cast<double>(report.record_lines))
    throw DataError("corpus quality: " + std::to_string(report.malformed) + " of " +
                    std::to_string(report.record_lines) + " record lines are malformed");
  report.accepted = accepted.size();
  return {CorpusStore::from_records(std::move(accepted)), std::move(report)};
}

LoadedCorpus load_corpus(const std::filesystem::path& path, const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read corpus: " + path.string());
  return load_corpus(in, config);
}

void write_corpus(std::ostream& out, const CorpusStore& store) {
  out << "{\"schema_version\":" << kSchemaVersion << "}\n";
  for (const auto& p : store.papers()) out << serialize_record(p) << '\n';
}

void write_corpus(const std::filesystem::path& path, const CorpusStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus: " + path.string());
  write_corpus(out, store);
}

void write_rejections(std::ostream& out, std::span<const Rejection> rejections) {
  csv::write_row(out, {"paper_id", "reason"});
  for (const auto& r : rejections) {
    std::string reasons;
    for (auto reason : r.reasons) {
      if (!reasons.empty()) reasons += ';';
      reasons += to_string(reason);
    }
    csv::write_row(out, {r.paper_id, reasons});
  }
}

// ---------------------------------------------------------------------------
// CitationIndex

CitationIndex CitationIndex::build(const CorpusStore& store) {
  CitationIndex index;
  const std::size_t n = store.size();
  index.external_.assign(n, 0);
  index.bwd_offsets_.assign(1, 0);
  std::vector<std::uint32_t> in_degree(n, 0);
  for (PaperIndex p = 0; p < n; ++p) {
    const auto& record = store.paper(p);
    const std::size_t start = index.bwd_.size();
    for (const auto& ref : record.references) {
      if (auto q = store.find(ref)) {
        index.bwd_.push_back(*q);
        ++in_degree[*q];
        if (record.year < store.paper(*q).year) ++index.anomalies_;
      } else {
        ++index.external_[p];
        ++index.external_total_;
      }
    }
    std::sort(index.bwd_.begin() + static_cast<std::ptrdiff_t>(start), index.bwd_.end());
    index.bwd_offsets_.push_back(static_cast<std::uint32_t>(index.bwd_.size()));
  }
  index.fwd_offsets_.assign(n + 1, 0);
  for (std::size_t q = 0; q < n; ++q) index.fwd_offsets_[q + 1] = index.fwd_offsets_[q] + in_degree[q];
  index.fwd_.resize(index.bwd_.size());
  std::vector<std::uint32_t> cursor(index.fwd_offsets_.begin(), index.fwd_offsets_.end() - 1);
  for (PaperIndex p = 0; p < n; ++p) {
    for (auto q : index.references(p)) index.fwd_[cursor[q]++] = p;
  }
  return index;
}

std::span<const PaperIndex> CitationIndex::citers(PaperIndex p) const {
  return {fwd_.data() + fwd_offsets_[p], fwd_offsets_[p + 1] - fwd_offsets_[p]};
}

std::span<const PaperIndex> CitationIndex::references(PaperIndex p) const {
  return {bwd_.data() + bwd_offsets_[p], bwd_offsets_[p + 1] - bwd_offsets_[p]};
}

}  // namespace gapminer
