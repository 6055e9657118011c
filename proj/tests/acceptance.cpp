// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "gapminer/classify.hpp"
#include "gapminer/csv.hpp"
#include "gapminer/metrics.hpp"
#include "gapminer/parallel.hpp"
#include "gapminer/pipeline.hpp"
#include "gapminer/synth.hpp"
#include "gapminer/topology.hpp"
#include "test_support.hpp"

using namespace gapminer;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs a criterion body, turning an escaped exception into a failure line.
void criterion(int id, const char* name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    report(id, name, ok, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt_s(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

constexpr std::uint64_t kRandomGraphSeed = 2024;
constexpr int kRandomGraphs = 250;

std::vector<TemporalConceptNetwork> random_graphs() {
  Rng rng(kRandomGraphSeed);
  std::vector<TemporalConceptNetwork> out;
  for (int i = 0; i < kRandomGraphs; ++i)
    out.push_back(testing::network_of(12, testing::random_temporal_edges(rng, 12, 30, 8)));
  return out;
}

std::vector<std::int64_t> betti_from_diagram(const PersistenceDiagram& d, const FlagFiltration& f, Year year) {
  std::vector<std::int64_t> betti(static_cast<std::size_t>(f.max_dim()) + 1, 0);
  for (const auto& p : d.pairs)
    if (f.value(p.birth) <= year && f.value(p.death) > year) ++betti[static_cast<std::size_t>(p.dim)];
  for (const auto& e : d.essentials)
    if (f.value(e.birth) <= year) ++betti[static_cast<std::size_t>(e.dim)];
  return betti;
}

std::vector<PaperClassification> classify_store(const CorpusStore& store) {
  auto networks = build_networks(store);
  std::vector<DisciplineGaps> gaps;
  for (const auto& n : networks) gaps.push_back(find_gaps(n));
  return classify_all(store, networks, gaps);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("gapminer-acceptance-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

pipeline::PipelineConfig config_for(const fs::path& corpus, const fs::path& out, std::uint64_t seed) {
  pipeline::PipelineConfig c;
  c.corpus_path = corpus;
  c.output_dir = out;
  c.seed = seed;
  return c;
}

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

}  // namespace

int main() {
  const auto graphs = random_graphs();

  criterion(1, "oracle equivalence", [&] {
    const auto start = Clock::now();
    int agree = 0;
    for (const auto& net : graphs) {
      const auto f = FlagFiltration::build(net);
      const auto d = compute_persistence(f);
      bool ok = true;
      for (const auto& [year, _] : f.steps()) ok = ok && betti_from_diagram(d, f, year)[1] == betti_oracle(f, year)[1];
      agree += ok;
    }
    const double t = seconds_since(start);
    return std::pair{agree == kRandomGraphs && kRandomGraphs >= 200 && t < 30.0,
                     std::to_string(agree) + "/" + std::to_string(kRandomGraphs) + " graphs agree at every year, " +
                         fmt_s(t) + " (limit 30 s)"};
  });

  criterion(2, "planted-cycle detection", [&] {
    const auto start = Clock::now();
    std::string detail;
    bool ok = true;
    for (int n : {4, 5, 8, 20}) {
      const auto store = CorpusStore::from_records(synth::planted_cycle({.n = n}, 0));
      const auto classes = classify_store(store);
      std::size_t openers = 0;
      for (const auto& c : classes) openers += c.category == Category::kGapOpener;
      const bool closing = classes.back().category == Category::kGapOpener;
      ok = ok && openers == 1 && closing;
      detail += "n=" + std::to_string(n) + ":" + std::to_string(openers) + (closing ? "(closing) " : " ");
    }
    for (int k : {3, 4, 5}) {
      const auto store = CorpusStore::from_records(synth::planted_clique({.k = k}));
      std::size_t openers = 0;
      for (const auto& c : classify_store(store)) openers += c.category == Category::kGapOpener;
      ok = ok && openers == 0;
      detail += "K" + std::to_string(k) + ":" + std::to_string(openers) + " ";
    }
    const double t = seconds_since(start);
    return std::pair{ok && t < 1.0, detail + fmt_s(t) + " (limit 1 s)"};
  });

  criterion(3, "union-find positivity shortcut", [&] {
    std::size_t edges = 0, mismatches = 0;
    for (const auto& net : graphs) {
      const auto f = FlagFiltration::build(net);
      const auto full = compute_persistence(f, {.union_find_dim0 = false, .clearing = true});
      std::set<SimplexIndex> births;
      for (const auto& p : full.pairs)
        if (p.dim == 1) births.insert(p.birth);
      for (const auto& e : full.essentials)
        if (e.dim == 1) births.insert(e.birth);
      testing::DisjointSets sets(net.vertex_count());
      for (SimplexIndex s = 0; s < f.size(); ++s) {
        if (f.dim(s) != 1) continue;
        const auto vs = f.vertices(s);
        ++edges;
        mismatches += (!sets.unite(vs[0], vs[1])) != births.contains(s);
      }
    }
    return std::pair{mismatches == 0, std::to_string(edges) + " edges over " + std::to_string(graphs.size()) +
                                          " graphs, " + std::to_string(mismatches) + " mismatches"};
  });

  criterion(4, "boundary of boundary is zero", [&] {
    std::size_t simplices = 0, nonzero = 0;
    auto check = [&](const FlagFiltration& f) {
      for (SimplexIndex s = 0; s < f.size(); ++s) {
        std::map<SimplexIndex, int> chain;
        for (auto face : f.boundary(s))
          for (auto ff : f.boundary(face)) chain[ff] ^= 1;
        bool zero = true;
        for (const auto& [_, bit] : chain) zero = zero && bit == 0;
        ++simplices;
        nonzero += !zero;
      }
    };
    for (const auto& net : graphs) {
      check(FlagFiltration::build(net));
      check(FlagFiltration::build(net, 3));
    }
    for (const auto& net : build_networks(CorpusStore::from_records(synth::planted_clique({.k = 6}))))
      check(FlagFiltration::build(net, 4));
    return std::pair{nonzero == 0, std::to_string(simplices) + " simplices, " + std::to_string(nonzero) + " nonzero"};
  });

  criterion(5, "formula fidelity", [&] {
    constexpr double kTol = 1e-12;
    struct Case {
      std::string name;
      std::optional<double> got;
      double want;
    };
    const std::vector<Case> cases{
        {"cd(3,1,1)", metrics::cd_from_counts({3, 1, 1}), 0.4},
        {"cd(5,0,0)", metrics::cd_from_counts({5, 0, 0}), 1.0},
        {"cd(0,4,0)", metrics::cd_from_counts({0, 4, 0}), -1.0},
        {"B(t_m=0)", metrics::sleeping_beauty(std::vector<std::int64_t>{7, 3, 0, 1}), 0.0},
        {"B(linear)", metrics::sleeping_beauty(std::vector<std::int64_t>{2, 4, 6, 8, 10}), 0.0},
        {"B(0,0,0,9)", metrics::sleeping_beauty(std::vector<std::int64_t>{0, 0, 0, 9}), 9.0},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
      const bool hit = c.got && std::abs(*c.got - c.want) <= kTol;
      ok = ok && hit;
      detail += c.name + (hit ? " ok " : " off ");
    }
    return std::pair{ok, detail + "(tol 1e-12)"};
  });

  criterion(6, "null-model conservation", [&] {
    const auto store = CorpusStore::from_records(synth::random_pairs({.papers = 500, .concepts = 100}, 6));
    auto label_multisets = [](const CorpusStore& s) {
      std::map<std::string, std::multiset<std::string>> out;
      for (PaperIndex p = 0; p < s.size(); ++p)
        for (auto d : s.disciplines_of(p))
          for (auto c : s.concepts_of(p)) out[s.concept_info(d).id].insert(s.concept_info(c).id);
      return out;
    };
    const auto reference = label_multisets(store);
    int conserved = 0;
    for (std::uint64_t r = 0; r < 50; ++r) {
      const auto shuffled = randomize_labels(store, derive_seed(6, r));
      bool ok = shuffled.size() == store.size();
      for (PaperIndex p = 0; ok && p < store.size(); ++p)
        ok = shuffled.paper(p).id == store.paper(p).id &&
             shuffled.concepts_of(p).size() == store.concepts_of(p).size();
      conserved += ok && label_multisets(shuffled) == reference;
    }

    // Rewiring over each year's reference layer, checked after every batch.
    const auto index = CitationIndex::build(store);
    std::size_t batches = 0, broken = 0, accepted = 0;
    for (auto year : store.years()) {
      metrics::ReferenceLayer layer;
      const auto range = store.year_range(year);
      for (auto p = range.begin; p < range.end; ++p) {
        auto refs = index.references(p);
        if (refs.empty()) continue;
        layer.citing.push_back(p);
        layer.cited.emplace_back(refs.begin(), refs.end());
      }
      auto degrees = [](const metrics::ReferenceLayer& l) {
        std::vector<std::size_t> out_deg;
        std::map<PaperIndex, std::size_t> in_deg;
        for (const auto& row : l.cited) {
          out_deg.push_back(row.size());
          for (auto q : row) ++in_deg[q];
        }
        return std::pair{out_deg, in_deg};
      };
      const auto before = degrees(layer);
      Rng rng(derive_seed(6, static_cast<std::uint64_t>(year)));
      for (int b = 0; b < 10; ++b) {
        accepted += metrics::rewire(layer, rng, 50);
        ++batches;
        broken += degrees(layer) != before;
      }
    }
    return std::pair{conserved == 50 && broken == 0,
                     std::to_string(conserved) + "/50 randomizations conserve counts and multisets; " +
                         std::to_string(batches) + " rewiring batches (" + std::to_string(accepted) +
                         " swaps), " + std::to_string(broken) + " degree changes"};
  });

  criterion(7, "determinism", [&] {
    const auto dir = scratch_dir("determinism");
    const auto corpus = dir / "corpus.jsonl";
    write_corpus(corpus, CorpusStore::from_records(synth::random_pairs({.papers = 3000, .concepts = 300}, 7)));
    auto a = config_for(corpus, dir / "a", 99);
    auto b = config_for(corpus, dir / "b", 99);
    a.threads = 4;
    b.threads = 1;
    pipeline::run(a);
    pipeline::run(b);
    std::size_t files = 0, differ = 0;
    for (const auto& entry : fs::directory_iterator(a.output_dir)) {
      const auto name = entry.path().filename();
      ++files;
      differ += pipeline::sha256_file(entry.path()) != pipeline::sha256_file(b.output_dir / name);
    }
    const bool verified = pipeline::verify_manifest(a.output_dir).empty();
    fs::remove_all(dir);
    return std::pair{files > 0 && differ == 0 && verified,
                     std::to_string(files) + " files compared by SHA-256 (4 vs 1 threads), " + std::to_string(differ) +
                         " differ; manifest digests " + (verified ? "verify" : "do not verify")};
  });

  criterion(8, "scale smoke test", [&] {
    const auto dir = scratch_dir("scale");
    const auto corpus = dir / "corpus.jsonl";
    const auto start = Clock::now();
    write_corpus(corpus,
                 CorpusStore::from_records(synth::random_pairs({.papers = 100000, .concepts = 10000}, 8)));
    const double t_gen = seconds_since(start);
    const auto run_start = Clock::now();
    auto config = config_for(corpus, dir / "out", 8);
    pipeline::run(config);
    const double t = seconds_since(run_start);
    const double gb = static_cast<double>(peak_rss_kb()) / (1024.0 * 1024.0);
    fs::remove_all(dir);
    char buf[160];
    std::snprintf(buf, sizeof buf, "1e5 papers / 1e4 concepts: pipeline %.1f s (limit 300 s), peak RSS %.2f GB "
                  "(limit 4 GB), %d threads; corpus generation %.1f s",
                  t, gb, resolve_threads(0), t_gen);
    return std::pair{t < 300.0 && gb < 4.0, std::string(buf)};
  });

  criterion(9, "directional null-model contrast", [&] {
    const auto dir = scratch_dir("planted");
    const auto corpus = dir / "corpus.jsonl";
    write_corpus(corpus, CorpusStore::from_records(
                             synth::planted_cycle({.n = 4, .cycles = 10, .disciplines = 3}, 2024)));
    auto config = config_for(corpus, dir / "out", 2024);
    config.null_replicates = 10;
    pipeline::run(config);
    double real = -1, random = -1;
    std::ifstream shares(config.output_dir / "shares.csv");
    std::string line;
    while (std::getline(shares, line)) {
      if (line.rfind("overall,all,GapOpener,", 0) != 0) continue;
      const auto fields = csv::split_row(line);
      (fields[5] == "real" ? real : random) = std::stod(fields[4]);
    }
    const fs::path golden = GAPMINER_GOLDEN_DIR;
    std::size_t mismatched = 0;
    for (const char* f : {"classification.csv", "evidence.csv", "shares.csv", "metrics.csv"})
      mismatched += slurp(config.output_dir / f) != slurp(golden / f);
    fs::remove_all(dir);
    char buf[160];
    std::snprintf(buf, sizeof buf, "real GapOpener share %.4f vs random mean %.4f over 10 replicates; %zu/4 golden "
                  "files differ", real, random, mismatched);
    return std::pair{real > random && random >= 0 && mismatched == 0, std::string(buf)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
