#include "gapminer/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gapminer/classify.hpp"
#include "gapminer/concept_net.hpp"
#include "gapminer/corpus.hpp"
#include "gapminer/csv.hpp"
#include "gapminer/metrics.hpp"
#include "gapminer/parallel.hpp"
#include "gapminer/random.hpp"
#include "gapminer/topology.hpp"

namespace gapminer::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Bump when an artifact format changes so stale caches are recomputed.
constexpr int kFormatVersion = 1;
constexpr int kSwapsPerEdge = 10;
constexpr double kNoveltySdFloor = 1e-6;
constexpr std::uint64_t kNoveltyStream = 0x6e6f76656c7479;  // "novelty"

constexpr const char* kCanonical = "corpus.canonical.jsonl";
constexpr const char* kRejections = "rejections.csv";
constexpr const char* kIngestSummary = "ingest.json";
constexpr const char* kNetworks = "networks.csv";
constexpr const char* kDiagrams = "diagrams.csv";
constexpr const char* kClassification = "classification.csv";
constexpr const char* kEvidence = "evidence.csv";
constexpr const char* kShares = "shares.csv";
constexpr const char* kMetrics = "metrics.csv";
constexpr const char* kConceptStats = "concept_stats.csv";
constexpr const char* kVerbRatios = "verb_ratios.csv";
constexpr const char* kSummary = "summary.txt";

// Stage that produces each intermediate file, for dependency errors.
std::string producer_of(const std::string& file) {
  if (file == kCanonical || file == kIngestSummary) return "ingest";
  if (file == kNetworks) return "network";
  if (file == kDiagrams) return "persist (topology)";
  return "classify";
}

struct StagePlan {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json params = json::object();
};

StagePlan plan(Stage stage, const PipelineConfig& c) {
  switch (stage) {
    case Stage::kIngest:
      return {{}, {kCanonical, kRejections, kIngestSummary},
              {{"year_min", c.year_min}, {"year_max", c.year_max}, {"schema_version", kSchemaVersion}}};
    case Stage::kNetwork:
      return {{kCanonical}, {kNetworks}, json::object()};
    case Stage::kPersist:
      return {{kNetworks}, {kDiagrams}, {{"max_dim", c.max_dim}}};
    case Stage::kClassify:
      return {{kCanonical, kNetworks, kDiagrams},
              {kClassification, kEvidence, kShares},
              {{"max_dim", c.max_dim},
               {"min_persistence", c.min_persistence},
               {"null_replicates", c.null_replicates},
               {"seed", c.seed}}};
    case Stage::kMetrics:
      return {{kCanonical, kClassification, kEvidence},
              {kMetrics, kConceptStats},
              {{"n_rand", c.n_rand},
               {"seed", c.seed},
               {"cd_window", c.cd_window ? json(*c.cd_window) : json(nullptr)},
               {"sb_horizon", c.sb_horizon},
               {"rewire_swaps_per_edge", kSwapsPerEdge},
               {"novelty_sd_floor", kNoveltySdFloor}}};
    case Stage::kReport:
      return {{kCanonical, kClassification, kEvidence, kShares}, {kVerbRatios, kSummary}, json::object()};
  }
  return {};
}

json parameters_of(const PipelineConfig& c) {
  return {{"year_min", c.year_min},
          {"year_max", c.year_max},
          {"max_dim", c.max_dim},
          {"min_persistence", c.min_persistence},
          {"null_replicates", c.null_replicates},
          {"n_rand", c.n_rand},
          {"seed", c.seed},
          {"cd_window", c.cd_window ? json(*c.cd_window) : json(nullptr)},
          {"sb_horizon", c.sb_horizon},
          {"rewire_swaps_per_edge", kSwapsPerEdge},
          {"novelty_sd_floor", kNoveltySdFloor},
          {"schema_version", kSchemaVersion},
          {"format_version", kFormatVersion}};
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

// Writes through a temporary file so a crash never leaves a half-written
// artifact under the final name.
void write_artifact(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    body(out);
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return json::object();
  json m = json::parse(in, nullptr, false);
  return m.is_object() ? m : json::object();
}

void write_manifest(const fs::path& path, const json& manifest) {
  write_artifact(path, [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
}

bool outputs_verify(const fs::path& dir, const json& entry) {
  if (!entry.contains("outputs") || !entry["outputs"].is_object()) return false;
  for (const auto& [name, digest] : entry["outputs"].items()) {
    const auto path = dir / name;
    if (!fs::is_regular_file(path) || !digest.is_string() || sha256_file(path) != digest.get<std::string>())
      return false;
  }
  return true;
}

// Data shared between stages, loaded from artifacts on first use.
class Context {
 public:
  explicit Context(const PipelineConfig& config) : config_(config), threads_(resolve_threads(config.threads)) {}

  const PipelineConfig& config() const { return config_; }
  int threads() const { return threads_; }
  fs::path file(const std::string& name) const { return config_.output_dir / name; }

  const CorpusStore& store() {
    if (!store_) {
      IngestConfig ic{config_.year_min, config_.year_max};
      store_ = load_corpus(file(kCanonical), ic).store;
    }
    return *store_;
  }
  void set_store(CorpusStore s) { store_ = std::move(s); }

  const std::vector<TemporalConceptNetwork>& networks() {
    if (!networks_) {
      auto in = open_input(file(kNetworks));
      networks_ = read_networks(in);
    }
    return *networks_;
  }
  void set_networks(std::vector<TemporalConceptNetwork> n) { networks_ = std::move(n); }

  const std::vector<PaperClassification>& classes() {
    if (!classes_) {
      auto c = open_input(file(kClassification));
      auto e = open_input(file(kEvidence));
      classes_ = read_classification(c, e);
    }
    return *classes_;
  }
  void set_classes(std::vector<PaperClassification> c) { classes_ = std::move(c); }

 private:
  const PipelineConfig& config_;
  int threads_;
  std::optional<CorpusStore> store_;
  std::optional<std::vector<TemporalConceptNetwork>> networks_;
  std::optional<std::vector<PaperClassification>> classes_;
};

void run_ingest(Context& ctx) {
  IngestConfig ic{ctx.config().year_min, ctx.config().year_max};
  auto loaded = load_corpus(ctx.config().corpus_path, ic);
  write_artifact(ctx.file(kCanonical), [&](std::ostream& out) { write_corpus(out, loaded.store); });
  write_artifact(ctx.file(kRejections),
                 [&](std::ostream& out) { write_rejections(out, loaded.report.rejections); });
  json summary = {{"record_lines", loaded.report.record_lines},
                  {"accepted", loaded.report.accepted},
                  {"malformed", loaded.report.malformed},
                  {"rejected", loaded.report.rejections.size()},
                  {"level_conflicts", loaded.store.level_conflicts()}};
  write_artifact(ctx.file(kIngestSummary), [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
  ctx.set_store(std::move(loaded.store));
}

void run_network(Context& ctx) {
  auto networks = build_networks(ctx.store(), ctx.threads());
  write_artifact(ctx.file(kNetworks), [&](std::ostream& out) { write_networks(out, networks); });
  ctx.set_networks(std::move(networks));
}

void run_persist(Context& ctx) {
  const auto& networks = ctx.networks();
  std::vector<std::string> dumps(networks.size());
  parallel_for(networks.size(), ctx.threads(), [&](std::size_t i) {
    const auto filtration = FlagFiltration::build(networks[i], ctx.config().max_dim);
    const auto diagram = compute_persistence(filtration);
    std::ostringstream out;
    write_diagram(out, networks[i].discipline(), filtration, diagram);
    dumps[i] = std::move(out).str();
  });
  write_artifact(ctx.file(kDiagrams), [&](std::ostream& out) {
    for (const auto& d : dumps) out << d;
  });
}

void run_classify(Context& ctx) {
  const auto& config = ctx.config();
  const auto& store = ctx.store();
  const auto& networks = ctx.networks();
  auto in = open_input(ctx.file(kDiagrams));
  const auto diagrams = read_diagrams(in);
  std::vector<DisciplineGaps> gaps;
  for (const auto& n : networks) {
    auto it = diagrams.find(n.discipline());
    if (it == diagrams.end())
      throw DataError("no diagram for discipline " + n.discipline() + " (run the persist/topology stage)");
    gaps.push_back(find_gaps(n, it->second, config.min_persistence));
  }
  auto classes = classify_all(store, networks, gaps, ctx.threads());
  auto shares = share_tables(classes, store);
  NullOptions null{config.null_replicates, config.max_dim, config.min_persistence, ctx.threads()};
  const auto random = null_comparison(store, config.seed, null);
  shares.rows.insert(shares.rows.end(), random.rows.begin(), random.rows.end());

  write_artifact(ctx.file(kClassification), [&](std::ostream& out) { write_classification(out, classes); });
  write_artifact(ctx.file(kEvidence), [&](std::ostream& out) { write_evidence(out, classes); });
  write_artifact(ctx.file(kShares), [&](std::ostream& out) { write_shares(out, shares); });
  ctx.set_classes(std::move(classes));
}

const std::vector<PaperClassification>& classes_for(Context& ctx) {
  const auto& store = ctx.store();
  const auto& classes = ctx.classes();
  bool match = classes.size() == store.size();
  for (PaperIndex p = 0; match && p < store.size(); ++p) match = classes[p].paper_id == store.paper(p).id;
  if (!match) throw DataError("classification.csv does not match the corpus (rerun the classify stage)");
  return classes;
}

std::string cell(const std::optional<double>& v) { return csv::format_optional(v); }
std::string cell(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); }

void run_metrics(Context& ctx) {
  namespace m = metrics;
  const auto& config = ctx.config();
  const auto& store = ctx.store();
  const auto& classes = classes_for(ctx);
  const auto index = CitationIndex::build(store);
  const m::ConceptOccurrences occurrences(store);
  const m::AuthorHistory history(store);
  const std::size_t n = store.size();

  struct Row {
    std::optional<double> cd;
    double sb = 0;
    std::array<std::optional<std::int64_t>, m::kMaxWindow> windows;
    m::ConceptPairStats concepts;
    m::TeamStats team;
  };
  std::vector<Row> rows(n);
  std::vector<std::int64_t> cohorts(n), citations(n);
  parallel_for(n, ctx.threads(), [&](std::size_t i) {
    const auto p = static_cast<PaperIndex>(i);
    auto& r = rows[i];
    cohorts[i] = store.paper(p).year;
    citations[i] = static_cast<std::int64_t>(index.citers(p).size());
    r.cd = m::cd_index(p, store, index, config.cd_window);
    r.sb = m::sleeping_beauty(m::citation_trajectory(p, store, index, config.sb_horizon));
    r.windows = m::citation_windows(p, store, index, store.max_year());
    std::vector<ConceptPair> pairs;
    for (const auto& e : classes[i].evidence) pairs.push_back(e.pair);
    r.concepts = m::concept_pair_stats(store.paper(p), pairs, store, occurrences);
    r.team = m::team_stats(p, store, history);
  });

  std::vector<std::optional<double>> cd(n), novelty_raw(n);
  for (std::size_t i = 0; i < n; ++i) cd[i] = rows[i].cd;
  const auto cd_pct = m::percentile_rank(cd, cohorts);

  m::NoveltyConfig nc;
  nc.n_rand = config.n_rand;
  nc.sd_floor = kNoveltySdFloor;
  nc.swaps_per_edge = kSwapsPerEdge;
  nc.seed = derive_seed(config.seed, kNoveltyStream);
  nc.threads = ctx.threads();
  const auto profiles = m::novelty(store, index, nc);
  for (std::size_t i = 0; i < n; ++i)
    if (profiles[i]) novelty_raw[i] = profiles[i]->tenth_percentile;
  const auto novelty_pct = m::percentile_rank(novelty_raw, cohorts);

  constexpr double kTops[] = {1, 5, 10, 15, 20};
  std::vector<std::vector<std::uint8_t>> tops;
  for (double k : kTops) tops.push_back(m::top_k_flags(store, citations, k));

  write_artifact(ctx.file(kMetrics), [&](std::ostream& out) {
    std::vector<std::string> header{"paper_id", "category", "cd", "cd_pct", "sb", "novelty_pct"};
    for (int k = 1; k <= m::kMaxWindow; ++k) header.push_back("c" + std::to_string(k));
    for (double k : kTops) header.push_back("top" + std::to_string(static_cast<int>(k)));
    for (const char* h : {"concept_age", "concept_pop", "team_size", "career_age", "freshness", "geo_km"})
      header.emplace_back(h);
    csv::write_row(out, header);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = rows[i];
      std::vector<std::string> f{classes[i].paper_id, std::string(to_string(classes[i].category)), cell(r.cd),
                                 cell(cd_pct[i]), csv::format_real(r.sb), cell(novelty_pct[i])};
      for (const auto& w : r.windows) f.push_back(cell(w));
      for (const auto& t : tops) f.push_back(std::to_string(t[i]));
      f.push_back(cell(r.concepts.age));
      f.push_back(cell(r.concepts.popularity));
      f.push_back(std::to_string(r.team.team_size));
      f.push_back(cell(r.team.career_age));
      f.push_back(cell(r.team.freshness));
      f.push_back(cell(r.team.geo_km));
      csv::write_row(out, f);
    }
  });
  write_artifact(ctx.file(kConceptStats), [&](std::ostream& out) {
    csv::write_row(out, {"paper_id", "concept_pop_5", "concept_pop_10", "n_refs"});
    for (std::size_t i = 0; i < n; ++i)
      csv::write_row(out, {classes[i].paper_id, cell(rows[i].concepts.popularity_5),
                           cell(rows[i].concepts.popularity_10),
                           std::to_string(store.paper(static_cast<PaperIndex>(i)).references.size())});
  });
}

void run_report(Context& ctx) {
  const auto& config = ctx.config();
  const auto& store = ctx.store();
  const auto& classes = classes_for(ctx);

  std::vector<std::string> gap_titles, novel_titles;
  std::size_t gap_tokens = 0, novel_tokens = 0;
  std::array<std::size_t, 3> counts{};
  for (PaperIndex p = 0; p < store.size(); ++p) {
    const auto category = classes[p].category;
    ++counts[static_cast<std::size_t>(category)];
    const auto& title = store.paper(p).title;
    if (!title) continue;
    if (category == Category::kGapOpener) {
      gap_titles.push_back(*title);
      gap_tokens += metrics::tokenize(*title).size();
    } else if (category == Category::kNovelPairNonGap) {
      novel_titles.push_back(*title);
      novel_tokens += metrics::tokenize(*title).size();
    }
  }
  const auto lexicon =
      config.verb_lexicon_path ? metrics::load_lexicon(*config.verb_lexicon_path) : metrics::default_verb_lexicon();
  std::map<std::string, double> ratios;
  const bool have_ratios = gap_tokens > 0 && novel_tokens > 0;
  if (have_ratios) ratios = metrics::verb_ratio(gap_titles, novel_titles, lexicon);
  write_artifact(ctx.file(kVerbRatios), [&](std::ostream& out) {
    csv::write_row(out, {"verb", "ratio"});
    for (const auto& [verb, r] : ratios) csv::write_row(out, {verb, csv::format_real(r)});
  });

  // Overall shares, real and null, from the classify output.
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> overall;
  {
    auto in = open_input(ctx.file(kShares));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      auto f = csv::split_row(line);
      if (f.size() == 7 && f[0] == "overall") overall[{f[2], f[5]}] = f;
    }
  }
  write_artifact(ctx.file(kSummary), [&](std::ostream& out) {
    out << "papers " << store.size() << '\n';
    out << "disciplines " << store.disciplines().size() << '\n';
    out << "years " << (store.empty() ? std::string("none")
                                      : std::to_string(store.min_year()) + "-" + std::to_string(store.max_year()))
        << '\n';
    for (auto c : kCategories) {
      const std::string name(to_string(c));
      out << name << " count " << counts[static_cast<std::size_t>(c)];
      if (auto it = overall.find({name, "real"}); it != overall.end()) out << " share " << it->second[4];
      if (auto it = overall.find({name, "random"}); it != overall.end())
        out << " random_share " << it->second[4] << " random_stderr " << it->second[6];
      out << '\n';
    }
    if (have_ratios)
      out << "verb_ratios " << ratios.size() << " verbs\n";
    else
      out << "verb_ratios skipped: gap-opener or novel-pair titles have no tokens\n";
  });
}

void run_stage(Stage stage, Context& ctx) {
  switch (stage) {
    case Stage::kIngest: return run_ingest(ctx);
    case Stage::kNetwork: return run_network(ctx);
    case Stage::kPersist: return run_persist(ctx);
    case Stage::kClassify: return run_classify(ctx);
    case Stage::kMetrics: return run_metrics(ctx);
    case Stage::kReport: return run_report(ctx);
  }
}

[[noreturn]] void rethrow_named(Stage stage) {
  const std::string prefix = "stage " + std::string(to_string(stage)) + ": ";
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const fs::filesystem_error& e) {
    throw DataError(prefix + e.what());
  } catch (const std::exception& e) {
    throw InvariantError(prefix + e.what());
  }
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kNetwork: return "network";
    case Stage::kPersist: return "persist";
    case Stage::kClassify: return "classify";
    case Stage::kMetrics: return "metrics";
    case Stage::kReport: return "report";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  if (name == "networks") return Stage::kNetwork;
  if (name == "topology") return Stage::kPersist;
  for (auto s : kStages)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config " + path.string() + " is not a JSON object");
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  PipelineConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "corpus") c.corpus_path = resolve(value.get<std::string>());
      else if (key == "output_dir") c.output_dir = resolve(value.get<std::string>());
      else if (key == "year_min") c.year_min = value.get<Year>();
      else if (key == "year_max") c.year_max = value.get<Year>();
      else if (key == "max_dim") c.max_dim = value.get<int>();
      else if (key == "min_persistence") c.min_persistence = value.get<int>();
      else if (key == "null_replicates") c.null_replicates = value.get<int>();
      else if (key == "n_rand") c.n_rand = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = value.get<int>();
      else if (key == "cd_window") c.cd_window = value.is_null() ? std::nullopt : std::optional(value.get<int>());
      else if (key == "sb_horizon") c.sb_horizon = value.get<int>();
      else if (key == "verb_lexicon_path") c.verb_lexicon_path = resolve(value.get<std::string>());
      else if (key == "stages") {
        for (const auto& [name, on] : value.items()) {
          auto s = parse_stage(name);
          if (!s) throw ConfigError("unknown stage '" + name + "' in config");
          c.enabled[static_cast<std::size_t>(*s)] = on.get<bool>();
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return c;
}

void validate(const PipelineConfig& c) {
  if (c.output_dir.empty()) throw ConfigError("output directory is not set");
  if (c.year_min > c.year_max) throw ConfigError("year_min exceeds year_max");
  if (c.max_dim < 1) throw ConfigError("max_dim must be at least 1");
  if (c.min_persistence < 0) throw ConfigError("min_persistence must be non-negative");
  if (c.null_replicates < 1) throw ConfigError("null_replicates must be at least 1");
  if (c.n_rand < 1) throw ConfigError("n_rand must be at least 1");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  if (c.cd_window && *c.cd_window < 0) throw ConfigError("cd_window must be non-negative");
  if (c.sb_horizon < 0) throw ConfigError("sb_horizon must be non-negative");
  if (c.verb_lexicon_path && !fs::is_regular_file(*c.verb_lexicon_path))
    throw ConfigError("verb lexicon not found: " + c.verb_lexicon_path->string());
  if (fs::exists(c.output_dir) && !fs::is_directory(c.output_dir))
    throw ConfigError("output path is not a directory: " + c.output_dir.string());
}

RunResult run(const PipelineConfig& config, std::optional<Stage> only) {
  validate(config);
  fs::create_directories(config.output_dir);
  Context ctx(config);
  RunResult result;
  result.manifest_path = config.output_dir / kManifestFile;
  json manifest = read_manifest(result.manifest_path);
  manifest["format_version"] = kFormatVersion;
  manifest["parameters"] = parameters_of(config);
  if (!manifest.contains("stages") || !manifest["stages"].is_object()) manifest["stages"] = json::object();

  for (auto stage : kStages) {
    if (only ? stage != *only : !config.stage_enabled(stage)) continue;
    const std::string name(to_string(stage));
    const auto p = plan(stage, config);

    json inputs = json::object();
    try {
      if (stage == Stage::kIngest) {
        if (!fs::is_regular_file(config.corpus_path))
          throw ConfigError("corpus file not found: " + config.corpus_path.string());
        inputs["corpus"] = sha256_file(config.corpus_path);
      }
      if (stage == Stage::kReport && config.verb_lexicon_path)
        inputs["verb_lexicon"] = sha256_file(*config.verb_lexicon_path);
      for (const auto& file : p.inputs) {
        if (!fs::is_regular_file(ctx.file(file)))
          throw DataError("missing input " + file + "; run the " + producer_of(file) + " stage first");
        inputs[file] = sha256_file(ctx.file(file));
      }
    } catch (...) {
      rethrow_named(stage);
    }
    const json key_material = {
        {"stage", name}, {"format_version", kFormatVersion}, {"params", p.params}, {"inputs", inputs}};
    const std::string key = sha256_hex(key_material.dump());

    auto& entry = manifest["stages"][name];
    if (entry.is_object() && entry.value("key", "") == key && entry.value("valid", false) &&
        outputs_verify(config.output_dir, entry)) {
      result.stages.push_back({stage, true, key});
      continue;
    }

    entry = {{"key", key}, {"valid", false}, {"outputs", json::object()}};
    write_manifest(result.manifest_path, manifest);
    try {
      run_stage(stage, ctx);
    } catch (...) {
      rethrow_named(stage);
    }
    for (const auto& file : p.outputs) entry["outputs"][file] = sha256_file(ctx.file(file));
    entry["valid"] = true;
    write_manifest(result.manifest_path, manifest);
    result.stages.push_back({stage, false, key});
  }
  write_manifest(result.manifest_path, manifest);
  return result;
}

namespace {

std::string to_hex(const unsigned char* digest, unsigned int length) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw InvariantError("SHA-256 failed");
  return to_hex(digest, length);
}

std::string sha256_file(const fs::path& path) {
  auto in = open_input(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> md(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!md || EVP_DigestInit_ex(md.get(), EVP_sha256(), nullptr) != 1) throw InvariantError("SHA-256 init failed");
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(md.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw DataError("read failed for " + path.string());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(md.get(), digest, &length);
  return to_hex(digest, length);
}

std::vector<std::string> verify_manifest(const fs::path& output_dir) {
  const auto path = output_dir / kManifestFile;
  if (!fs::is_regular_file(path)) throw DataError("no manifest in " + output_dir.string());
  const json manifest = read_manifest(path);
  if (!manifest.contains("stages")) throw DataError("unreadable manifest " + path.string());
  std::set<std::string> bad;
  for (const auto& [stage, entry] : manifest["stages"].items()) {
    if (!entry.is_object() || !entry.contains("outputs")) continue;
    for (const auto& [name, digest] : entry["outputs"].items()) {
      const auto file = output_dir / name;
      if (!fs::is_regular_file(file) || sha256_file(file) != digest.get<std::string>()) bad.insert(name);
    }
  }
  return {bad.begin(), bad.end()};
}

}  // namespace gapminer::pipeline
