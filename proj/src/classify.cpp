#include "gapminer/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "gapminer/csv.hpp"
#include "gapminer/parallel.hpp"
#include "gapminer/random.hpp"

namespace gapminer {

std::string_view to_string(Category category) {
  switch (category) {
    case Category::kGapOpener: return "GapOpener";
    case Category::kNovelPairNonGap: return "NovelPairNonGap";
    case Category::kNoNovelPair: return "NoNovelPair";
  }
  return "?";
}

std::string_view to_string(Grouping grouping) {
  switch (grouping) {
    case Grouping::kOverall: return "overall";
    case Grouping::kDiscipline: return "discipline";
    case Grouping::kYear: return "year";
  }
  return "?";
}

std::string_view to_string(Source source) { return source == Source::kReal ? "real" : "random"; }

std::size_t PaperClassification::gap_count() const {
  return static_cast<std::size_t>(
      std::count_if(evidence.begin(), evidence.end(), [](const Evidence& e) { return e.kind == EvidenceKind::kGap; }));
}

std::size_t PaperClassification::novel_count() const { return evidence.size(); }

Category categorize(std::span<const Evidence> evidence) {
  if (evidence.empty()) return Category::kNoNovelPair;
  for (const auto& e : evidence)
    if (e.kind == EvidenceKind::kGap) return Category::kGapOpener;
  return Category::kNovelPairNonGap;
}

DisciplineGaps find_gaps(const TemporalConceptNetwork& network, int max_dim, int min_persistence) {
  const auto filtration = FlagFiltration::build(network, max_dim);
  const auto diagram = compute_persistence(filtration);
  DisciplineGaps out{network.discipline(), {}};
  for (const auto& g : gap_edges(diagram, filtration, min_persistence)) out.edges.push_back(g.edge);
  return out;
}

DisciplineGaps find_gaps(const TemporalConceptNetwork& network, std::span<const DiagramFeature> features,
                         int min_persistence) {
  if (min_persistence < 0) throw ConfigError("min_persistence must be non-negative");
  DisciplineGaps out{network.discipline(), {}};
  for (const auto& f : features) {
    if (f.dim != 1) continue;
    if (f.death_year && *f.death_year - f.birth_year < min_persistence) continue;
    if (f.birth_vertices.size() != 2)
      throw DataError("diagram for " + network.discipline() + ": dimension-1 feature without an edge");
    auto u = network.find_vertex(f.birth_vertices[0]);
    auto v = network.find_vertex(f.birth_vertices[1]);
    std::optional<EdgeRank> rank;
    if (u && v) rank = network.find_edge(*u, *v);
    if (!rank)
      throw DataError("diagram for " + network.discipline() + " names an edge absent from the network: " +
                      f.birth_vertices[0] + "-" + f.birth_vertices[1]);
    out.edges.push_back(*rank);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

std::vector<PaperClassification> classify_all(const CorpusStore& store,
                                              std::span<const TemporalConceptNetwork> networks,
                                              std::span<const DisciplineGaps> gaps, int threads) {
  struct Lookup {
    const TemporalConceptNetwork* network = nullptr;
    std::vector<char> is_gap;
  };
  std::unordered_map<std::string_view, Lookup> by_discipline;
  for (const auto& n : networks) by_discipline[n.discipline()].network = &n;
  for (const auto& g : gaps) {
    auto it = by_discipline.find(g.discipline);
    if (it == by_discipline.end()) throw DataError("gap list for unknown discipline " + g.discipline);
    auto& flags = it->second.is_gap;
    flags.assign(it->second.network->edge_count(), 0);
    for (auto e : g.edges) {
      if (e >= flags.size()) throw DataError("gap edge rank out of range in " + g.discipline);
      flags[e] = 1;
    }
  }

  // Resolve each discipline once, in index order.
  std::vector<const Lookup*> resolved(store.concepts().size(), nullptr);
  for (auto d : store.disciplines()) {
    const auto& id = store.concept_info(d).id;
    auto it = by_discipline.find(id);
    if (it == by_discipline.end() || !it->second.network)
      throw DataError("no network for discipline " + id + " (run the network stage)");
    if (it->second.is_gap.size() != it->second.network->edge_count())
      throw DataError("no diagram for discipline " + id + " (run the persist/topology stage)");
    resolved[d] = &it->second;
  }

  std::vector<PaperClassification> out(store.size());
  parallel_for(store.size(), threads, [&](std::size_t i) {
    const auto p = static_cast<PaperIndex>(i);
    auto& c = out[i];
    c.paper_id = store.paper(p).id;
    for (auto d : store.disciplines_of(p)) {
      const auto& lookup = *resolved[d];
      const auto& net = *lookup.network;
      for (auto rank : net.introduced_by(c.paper_id)) {
        const auto& e = net.edge(rank);
        c.evidence.push_back({net.discipline(),
                              {net.concepts()[e.u], net.concepts()[e.v]},
                              lookup.is_gap[rank] ? EvidenceKind::kGap : EvidenceKind::kNovel});
      }
    }
    c.category = categorize(c.evidence);
  });
  return out;
}

namespace {

using Counts = std::array<std::int64_t, 3>;

// Ordered (key, counts) groups for one grouping.
std::vector<std::pair<std::string, Counts>> group_counts(std::span<const PaperClassification> classifications,
                                                         const CorpusStore& store, Grouping grouping) {
  GAPMINER_CHECK(classifications.size() == store.size(), "share_table: classifications do not match the store");
  std::vector<std::pair<std::string, Counts>> groups;
  auto bump = [&](std::size_t g, Category c) { ++groups[g].second[static_cast<std::size_t>(c)]; };
  switch (grouping) {
    case Grouping::kOverall:
      groups.push_back({"all", {}});
      for (const auto& c : classifications) bump(0, c.category);
      break;
    case Grouping::kDiscipline: {
      std::vector<std::size_t> slot(store.concepts().size());
      for (auto d : store.disciplines()) {
        slot[d] = groups.size();
        groups.push_back({store.concept_info(d).id, {}});
      }
      for (PaperIndex p = 0; p < store.size(); ++p)
        for (auto d : store.disciplines_of(p)) bump(slot[d], classifications[p].category);
      break;
    }
    case Grouping::kYear:
      for (auto y : store.years()) {
        const auto range = store.year_range(y);
        groups.push_back({std::to_string(y), {}});
        for (auto p = range.begin; p < range.end; ++p) bump(groups.size() - 1, classifications[p].category);
      }
      break;
  }
  return groups;
}

}  // namespace

ShareTable share_table(std::span<const PaperClassification> classifications, const CorpusStore& store,
                       Grouping grouping) {
  ShareTable table;
  for (const auto& [key, counts] : group_counts(classifications, store, grouping)) {
    const auto total = counts[0] + counts[1] + counts[2];
    for (auto c : kCategories) {
      const auto n = counts[static_cast<std::size_t>(c)];
      table.rows.push_back({grouping, key, c, static_cast<double>(n),
                            total ? static_cast<double>(n) / static_cast<double>(total) : 0.0, Source::kReal,
                            std::nullopt});
    }
  }
  return table;
}

ShareTable share_tables(std::span<const PaperClassification> classifications, const CorpusStore& store) {
  ShareTable all;
  for (auto g : {Grouping::kOverall, Grouping::kDiscipline, Grouping::kYear}) {
    auto t = share_table(classifications, store, g);
    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
  }
  return all;
}

ShareTable null_comparison(const CorpusStore& store, std::uint64_t seed, const NullOptions& options) {
  if (options.replicates < 1) throw ConfigError("null replicates must be at least 1");
  const auto replicates = static_cast<std::size_t>(options.replicates);
  std::vector<ShareTable> tables(replicates);
  parallel_for(replicates, options.threads, [&](std::size_t r) {
    const auto shuffled = randomize_labels(store, derive_seed(seed, r));
    const auto networks = build_networks(shuffled);
    std::vector<DisciplineGaps> gaps;
    gaps.reserve(networks.size());
    for (const auto& n : networks) gaps.push_back(find_gaps(n, options.max_dim, options.min_persistence));
    tables[r] = share_tables(classify_all(shuffled, networks, gaps), shuffled);
  });

  // Disciplines and years are untouched by the shuffle, so every replicate
  // has the same row layout.
  ShareTable out = tables[0];
  const double n = static_cast<double>(replicates);
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    double count = 0, sum = 0;
    for (const auto& t : tables) {
      GAPMINER_CHECK(t.rows[i].key == out.rows[i].key, "null replicates disagree on share layout");
      count += t.rows[i].count;
      sum += t.rows[i].fraction;
    }
    const double mean = sum / n;
    double ss = 0;
    for (const auto& t : tables) ss += (t.rows[i].fraction - mean) * (t.rows[i].fraction - mean);
    auto& row = out.rows[i];
    row.count = count / n;
    row.fraction = mean;
    row.source = Source::kRandom;
    row.standard_error = replicates > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n) : 0.0;
  }
  return out;
}

void write_classification(std::ostream& out, std::span<const PaperClassification> classifications) {
  csv::write_row(out, {"paper_id", "category", "n_gap_edges", "n_novel_pairs"});
  for (const auto& c : classifications)
    csv::write_row(out, {c.paper_id, std::string(to_string(c.category)), std::to_string(c.gap_count()),
                         std::to_string(c.novel_count())});
}

void write_evidence(std::ostream& out, std::span<const PaperClassification> classifications) {
  csv::write_row(out, {"paper_id", "discipline", "concept_a", "concept_b", "kind"});
  for (const auto& c : classifications)
    for (const auto& e : c.evidence)
      csv::write_row(out, {c.paper_id, e.discipline, e.pair.first, e.pair.second,
                           e.kind == EvidenceKind::kGap ? "gap" : "novel"});
}

void write_shares(std::ostream& out, const ShareTable& table) {
  csv::write_row(out, {"grouping", "key", "category", "count", "fraction", "source", "stderr"});
  for (const auto& r : table.rows)
    csv::write_row(out, {std::string(to_string(r.grouping)), r.key, std::string(to_string(r.category)),
                         csv::format_real(r.count), csv::format_real(r.fraction), std::string(to_string(r.source)),
                         csv::format_optional(r.standard_error)});
}

std::vector<PaperClassification> read_classification(std::istream& classes, std::istream& evidence) {
  std::vector<PaperClassification> out;
  std::unordered_map<std::string, std::size_t> position;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError("classification dump line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(classes, line)) {
    if (++line_no == 1 || line.empty()) continue;
    auto f = csv::split_row(line);
    if (f.size() != 4) fail("expected 4 fields");
    PaperClassification c;
    c.paper_id = f[0];
    auto category = std::find_if(std::begin(kCategories), std::end(kCategories),
                                 [&](Category k) { return to_string(k) == f[1]; });
    if (category == std::end(kCategories)) fail("unknown category '" + f[1] + "'");
    c.category = *category;
    position[c.paper_id] = out.size();
    out.push_back(std::move(c));
  }
  line_no = 0;
  while (std::getline(evidence, line)) {
    if (++line_no == 1 || line.empty()) continue;
    auto f = csv::split_row(line);
    if (f.size() != 5 || (f[4] != "gap" && f[4] != "novel")) fail("bad evidence row");
    auto it = position.find(f[0]);
    if (it == position.end()) fail("evidence for unclassified paper " + f[0]);
    out[it->second].evidence.push_back(
        {f[1], {f[2], f[3]}, f[4] == "gap" ? EvidenceKind::kGap : EvidenceKind::kNovel});
  }
  for (const auto& c : out)
    if (categorize(c.evidence) != c.category)
      throw DataError("classification dump disagrees with its evidence for " + c.paper_id);
  return out;
}

}  // namespace gapminer
