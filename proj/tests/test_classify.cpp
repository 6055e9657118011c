#include <map>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "gapminer/classify.hpp"
#include "gapminer/synth.hpp"
#include "test_support.hpp"

using namespace gapminer;
using gapminer::testing::paper;
using gapminer::testing::store_of;

namespace {

struct Analysis {
  std::vector<TemporalConceptNetwork> networks;
  std::vector<DisciplineGaps> gaps;
  std::vector<PaperClassification> classes;
};

Analysis analyze(const CorpusStore& store, int min_persistence = kDefaultMinPersistence) {
  Analysis a;
  a.networks = build_networks(store);
  for (const auto& n : a.networks) a.gaps.push_back(find_gaps(n, kDefaultMaxDim, min_persistence));
  a.classes = classify_all(store, a.networks, a.gaps);
  return a;
}

std::map<Category, std::size_t> tally(std::span<const PaperClassification> classes) {
  std::map<Category, std::size_t> out;
  for (const auto& c : classes) ++out[c.category];
  return out;
}

CorpusStore synthetic(std::vector<PaperRecord> records) { return store_of(std::move(records)); }

double overall_fraction(const ShareTable& table, Category category) {
  for (const auto& r : table.rows)
    if (r.grouping == Grouping::kOverall && r.category == category) return r.fraction;
  FAIL("no overall row");
  return 0;
}

}  // namespace

TEST_CASE("classify_all: worked examples") {
  // 4-cycle a-b-c-d closed by P4; P5 adds a tree edge; P6 repeats a pair.
  auto store = store_of({paper("P1", 2000, {"a", "b"}), paper("P2", 2001, {"b", "c"}), paper("P3", 2002, {"c", "d"}),
                         paper("P4", 2003, {"a", "d"}), paper("P5", 2004, {"d", "e"}),
                         paper("P6", 2005, {"a", "b"})});
  auto a = analyze(store);
  auto category = [&](const char* id) { return a.classes[*store.find(id)].category; };
  CHECK(category("P4") == Category::kGapOpener);
  CHECK(category("P1") == Category::kNovelPairNonGap);
  CHECK(category("P5") == Category::kNovelPairNonGap);
  CHECK(category("P6") == Category::kNoNovelPair);
  const auto& p4 = a.classes[*store.find("P4")];
  REQUIRE(p4.evidence.size() == 1);
  CHECK(p4.evidence[0] == Evidence{"D", {"a", "d"}, EvidenceKind::kGap});
  CHECK(p4.gap_count() == 1);
  CHECK(p4.novel_count() == 1);
}

TEST_CASE("classify_all: gap anywhere wins and co-introducers all count") {
  auto cross = paper("X", 2003, {"a", "d"});
  cross.level0.push_back({"E", 0.5});
  auto store = store_of({paper("P1", 2000, {"a", "b"}), paper("P2", 2001, {"b", "c"}), paper("P3", 2002, {"c", "d"}),
                         cross, paper("Y", 2003, {"a", "d"})});
  auto a = analyze(store);
  const auto& x = a.classes[*store.find("X")];
  CHECK(x.category == Category::kGapOpener);
  CHECK(x.gap_count() == 1);
  CHECK(x.novel_count() == 2);  // also the fresh pair in E
  CHECK(a.classes[*store.find("Y")].category == Category::kGapOpener);
}

TEST_CASE("classify_all: missing diagram is an error") {
  auto store = store_of({paper("P1", 2000, {"a", "b"}), paper("Q", 2000, {"a", "b"}, "E")});
  auto networks = build_networks(store);
  std::vector<DisciplineGaps> gaps{find_gaps(networks[0])};
  CHECK_THROWS_AS(classify_all(store, networks, gaps), DataError);
  CHECK_THROWS_AS(classify_all(store, std::span(networks).first(1), gaps), DataError);
}

TEST_CASE("Gap lists from a diagram dump match the direct computation") {
  auto store = synthetic(synth::random_pairs({.papers = 300, .concepts = 60, .disciplines = 2}, 5));
  for (const auto& net : build_networks(store)) {
    auto f = FlagFiltration::build(net);
    auto d = compute_persistence(f);
    std::stringstream buffer;
    write_diagram(buffer, net.discipline(), f, d);
    auto features = read_diagrams(buffer).at(net.discipline());
    for (int mp : {0, 1, 3}) CHECK(find_gaps(net, features, mp).edges == find_gaps(net, kDefaultMaxDim, mp).edges);
  }
}

TEST_CASE("Partition and record-order invariance on random corpora") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto records = synth::random_pairs({.papers = 400, .concepts = 80, .disciplines = 3}, seed);
    auto store = synthetic(records);
    auto a = analyze(store);
    auto t = tally(a.classes);
    CHECK(t[Category::kGapOpener] + t[Category::kNovelPairNonGap] + t[Category::kNoNovelPair] == store.size());
    for (const auto& c : a.classes) CHECK(c.category == categorize(c.evidence));
    std::reverse(records.begin(), records.end());
    auto reversed = synthetic(records);
    CHECK(analyze(reversed).classes == a.classes);
  }
}

TEST_CASE("Adding a gap entry never moves a paper away from GapOpener") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Evidence> ev;
    const auto n = rng.below(4);
    for (std::uint64_t i = 0; i < n; ++i)
      ev.push_back({"D", {"a", "b"}, rng.below(3) ? EvidenceKind::kNovel : EvidenceKind::kGap});
    const auto before = categorize(ev);
    ev.insert(ev.begin() + static_cast<std::ptrdiff_t>(rng.below(ev.size() + 1)),
              Evidence{"E", {"c", "d"}, EvidenceKind::kGap});
    CHECK(categorize(ev) == Category::kGapOpener);
    CHECK(static_cast<int>(categorize(ev)) <= static_cast<int>(before));
  }
}

TEST_CASE("Share tables") {
  SUBCASE("10 papers with one gap opener") {
    std::vector<PaperRecord> records{paper("P1", 2000, {"a", "b"}), paper("P2", 2001, {"b", "c"}),
                                     paper("P3", 2002, {"c", "d"}), paper("P4", 2003, {"a", "d"})};
    for (int i = 0; i < 6; ++i) records.push_back(paper("R" + std::to_string(i), 2004, {"a", "b"}));
    auto store = store_of(records);
    auto table = share_table(analyze(store).classes, store, Grouping::kOverall);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].category == Category::kGapOpener);
    CHECK(table.rows[0].count == 1);
    CHECK(table.rows[0].fraction == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("all NoNovelPair") {
    auto store = store_of({paper("P1", 2000, {"a", "b"}), paper("P2", 2000, {"a", "b"})});
    std::vector<PaperClassification> classes(2);
    classes[0].paper_id = "P1";
    classes[1].paper_id = "P2";
    auto table = share_table(classes, store, Grouping::kOverall);
    CHECK(table.rows[2].fraction == 1.0);
    CHECK(table.rows[0].fraction == 0.0);
    CHECK(table.rows[1].fraction == 0.0);
  }
  SUBCASE("planted cycles: one gap opener per discipline, fractions sum to one") {
    auto store = synthetic(synth::planted_cycle({.n = 5, .cycles = 1, .disciplines = 3, .filler = 50}, 1));
    CHECK(store.size() == 65);
    auto a = analyze(store);
    CHECK(tally(a.classes)[Category::kGapOpener] == 3);
    auto tables = share_tables(a.classes, store);
    std::map<std::pair<Grouping, std::string>, double> sums;
    for (const auto& r : tables.rows) sums[{r.grouping, r.key}] += r.fraction;
    CHECK(sums.size() == 1 + 3 + store.years().size());
    for (const auto& [_, s] : sums) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("multi-discipline papers count once per discipline") {
    auto r = paper("P1", 2000, {"a", "b"});
    r.level0.push_back({"E", 0.5});
    auto store = store_of({r, paper("P2", 2000, {"c", "d"})});
    auto table = share_table(analyze(store).classes, store, Grouping::kDiscipline);
    double total = 0;
    for (const auto& row : table.rows) total += row.count;
    CHECK(total == 3);
  }
}

TEST_CASE("Planted generators") {
  for (int n : {4, 5, 8, 20}) {
    auto store = synthetic(synth::planted_cycle({.n = n}, 0));
    auto a = analyze(store);
    CHECK(tally(a.classes)[Category::kGapOpener] == 1);
    CHECK(a.classes.back().category == Category::kGapOpener);
    auto net = a.networks[0];
    auto f = FlagFiltration::build(net);
    CHECK(betti_oracle(f, 2000 + n - 2)[1] == 0);
    CHECK(betti_oracle(f, 2000 + n - 1)[1] == 1);
  }
  for (int k : {3, 4, 6}) {
    auto store = synthetic(synth::planted_clique({.k = k, .disciplines = 2}));
    CHECK(tally(analyze(store).classes)[Category::kGapOpener] == 0);
    CHECK(tally(analyze(store, 0).classes)[Category::kGapOpener] > 0);
  }
  CHECK_THROWS_AS(synth::planted_cycle({.n = 3}, 0), ConfigError);
  CHECK_THROWS_AS(synth::make_synthetic("spiral", {}, 0), ConfigError);
  CHECK_THROWS_AS(synth::make_synthetic("planted-cycle", {{"m", 3}}, 0), ConfigError);
  CHECK(synth::make_synthetic("random-pairs", {{"papers", 0}}, 0).empty());
  CHECK(synth::make_synthetic("random-pairs", {{"papers", 50}}, 4) ==
        synth::make_synthetic("random-pairs", {{"papers", 50}}, 4));
}

TEST_CASE("null_comparison") {
  SUBCASE("determinism and thread independence") {
    auto store = synthetic(synth::random_pairs({.papers = 200, .concepts = 40, .disciplines = 2}, 3));
    auto a = null_comparison(store, 7, {.replicates = 2, .threads = 1});
    auto b = null_comparison(store, 7, {.replicates = 2, .threads = 2});
    std::ostringstream sa, sb;
    write_shares(sa, a);
    write_shares(sb, b);
    CHECK(sa.str() == sb.str());
    for (const auto& r : a.rows) {
      CHECK(r.source == Source::kRandom);
      CHECK(r.standard_error.has_value());
    }
    CHECK_THROWS_AS(null_comparison(store, 7, {.replicates = 0}), ConfigError);
  }
  SUBCASE("a single paper has nothing to shuffle") {
    auto store = store_of({paper("P", 2000, {"a", "b", "c"})});
    auto real = share_tables(analyze(store).classes, store);
    auto random = null_comparison(store, 1, {.replicates = 3});
    REQUIRE(real.rows.size() == random.rows.size());
    for (std::size_t i = 0; i < real.rows.size(); ++i) {
      CHECK(real.rows[i].fraction == random.rows[i].fraction);
      CHECK(*random.rows[i].standard_error == 0.0);
    }
  }
  SUBCASE("planted cycles beat the shuffled baseline") {
    auto store = synthetic(synth::planted_cycle({.n = 4, .cycles = 10, .disciplines = 3}, 0));
    auto real = overall_fraction(share_tables(analyze(store).classes, store), Category::kGapOpener);
    auto random = overall_fraction(null_comparison(store, 2024, {.replicates = 10, .threads = 4}),
                                   Category::kGapOpener);
    MESSAGE("real " << real << " random " << random);
    CHECK(real == doctest::Approx(0.25));
    CHECK(real > random);
  }
}

TEST_CASE("Output formats") {
  PaperClassification c{"p,1", Category::kGapOpener, {{"D", {"a", "b"}, EvidenceKind::kGap}}};
  std::ostringstream out, ev;
  write_classification(out, std::span(&c, 1));
  CHECK(out.str() == "paper_id,category,n_gap_edges,n_novel_pairs\n\"p,1\",GapOpener,1,1\n");
  write_evidence(ev, std::span(&c, 1));
  CHECK(ev.str() == "paper_id,discipline,concept_a,concept_b,kind\n\"p,1\",D,a,b,gap\n");
}

TEST_CASE("Classification dump round trip") {
  auto store = synthetic(synth::random_pairs({.papers = 300, .concepts = 60, .disciplines = 3}, 2));
  auto classes = analyze(store).classes;
  std::stringstream c, e;
  write_classification(c, classes);
  write_evidence(e, classes);
  CHECK(read_classification(c, e) == classes);
  std::istringstream bad_c("paper_id,category,n_gap_edges,n_novel_pairs\nx,GapOpener,0,0\n"), no_e("h\n");
  CHECK_THROWS_AS(read_classification(bad_c, no_e), DataError);
}
