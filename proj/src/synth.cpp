#include "gapminer/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "gapminer/random.hpp"

namespace gapminer::synth {
namespace {

PaperRecord pair_paper(std::string id, Year year, const std::string& discipline, const std::string& a,
                       const std::string& b) {
  PaperRecord r;
  r.id = std::move(id);
  r.year = year;
  r.level0 = {{discipline, 1.0}};
  r.level3 = {{a, 0.5}, {b, 0.5}};
  std::sort(r.level3.begin(), r.level3.end(),
            [](const ConceptScore& x, const ConceptScore& y) { return x.concept_id < y.concept_id; });
  return r;
}

std::string discipline_name(int d) { return fmt::format("d{:02}", d); }

constexpr const char* kTitleWords[] = {
    "a",        "study",    "of",       "the",     "network", "model",    "we",       "new",
    "method",   "for",      "analysis", "data",    "theory",  "results",  "improve",  "improved",
    "develop",  "develops", "confirm",  "support", "enhance", "leverage", "exploits", "pioneering",
    "generate", "modify",   "update",   "launch",  "extract", "harness",  "promote",  "demonstrate",
};

}  // namespace

std::vector<PaperRecord> planted_cycle(const PlantedCycle& spec, std::uint64_t seed) {
  if (spec.n < 4) throw ConfigError("planted-cycle: n must be at least 4 (a triangle fills itself)");
  if (spec.cycles < 1 || spec.disciplines < 1 || spec.filler < 0)
    throw ConfigError("planted-cycle: cycles and disciplines must be positive, filler non-negative");
  std::vector<PaperRecord> out;
  for (int d = 0; d < spec.disciplines; ++d) {
    const auto disc = discipline_name(d);
    for (int c = 0; c < spec.cycles; ++c) {
      auto vertex = [&](int i) { return fmt::format("{}.c{:03}.v{:02}", disc, c, i % spec.n); };
      for (int i = 0; i < spec.n; ++i)
        out.push_back(pair_paper(fmt::format("{}-c{:03}-e{:02}", disc, c, i), spec.first_year + i, disc, vertex(i),
                                 vertex(i + 1)));
    }
  }
  Rng rng(derive_seed(seed, 0x636963));
  for (int f = 0; f < spec.filler; ++f) {
    const int d = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.disciplines)));
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.cycles)));
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.n)));
    const auto disc = discipline_name(d);
    const Year year = spec.first_year + spec.n + static_cast<Year>(rng.below(5));
    out.push_back(pair_paper(fmt::format("{}-f{:04}", disc, f), year, disc,
                             fmt::format("{}.c{:03}.v{:02}", disc, c, i),
                             fmt::format("{}.c{:03}.v{:02}", disc, c, (i + 1) % spec.n)));
  }
  return out;
}

std::vector<PaperRecord> planted_clique(const PlantedClique& spec) {
  if (spec.k < 2 || spec.disciplines < 1) throw ConfigError("planted-clique: need k >= 2 and disciplines >= 1");
  std::vector<PaperRecord> out;
  for (int d = 0; d < spec.disciplines; ++d) {
    const auto disc = discipline_name(d);
    Year year = spec.first_year;
    for (int a = 0; a < spec.k; ++a)
      for (int b = a + 1; b < spec.k; ++b) {
        out.push_back(pair_paper(fmt::format("{}-e{:02}-{:02}", disc, a, b), year++, disc,
                                 fmt::format("{}.v{:02}", disc, a), fmt::format("{}.v{:02}", disc, b)));
      }
  }
  return out;
}

std::vector<PaperRecord> random_pairs(const RandomPairs& spec, std::uint64_t seed) {
  if (spec.papers < 0 || spec.disciplines < 1 || spec.concepts < 4 * spec.disciplines)
    throw ConfigError("random-pairs: need papers >= 0, disciplines >= 1 and at least 4 concepts per discipline");
  if (spec.last_year < spec.first_year) throw ConfigError("random-pairs: last_year before first_year");
  Rng rng(derive_seed(seed, 0x7061697273));
  const auto span = static_cast<std::uint64_t>(spec.last_year - spec.first_year + 1);
  const int authors = std::max(1, spec.papers / 3);
  const int venues = std::max(2, spec.papers / 200 + 2);

  // Per-author fixed coordinates so team distances are stable across papers.
  std::vector<std::pair<double, double>> coords(static_cast<std::size_t>(authors));
  for (auto& c : coords) c = {rng.unit() * 140.0 - 70.0, rng.unit() * 360.0 - 180.0};

  // Years first, so references can point at earlier papers only.
  std::vector<Year> years(static_cast<std::size_t>(spec.papers));
  for (auto& y : years) {
    // Square-root skew: later years hold more papers.
    const double u = std::sqrt(rng.unit());
    y = spec.first_year + static_cast<Year>(std::min<std::uint64_t>(static_cast<std::uint64_t>(u * span), span - 1));
  }
  std::sort(years.begin(), years.end());

  std::vector<PaperRecord> out;
  out.reserve(years.size());
  const int per_discipline = spec.concepts / spec.disciplines;
  for (std::size_t i = 0; i < years.size(); ++i) {
    PaperRecord r;
    r.id = fmt::format("r{:07}", i);
    r.year = years[i];
    const int d = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.disciplines)));
    r.level0.push_back({discipline_name(d), 0.3 + 0.7 * rng.unit()});
    if (spec.disciplines > 1 && rng.below(10) == 0) {
      const int e = (d + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.disciplines - 1)))) %
                    spec.disciplines;
      r.level0.push_back({discipline_name(e), 0.1 + 0.2 * rng.unit()});
    }
    std::sort(r.level0.begin(), r.level0.end(),
              [](const ConceptScore& x, const ConceptScore& y) { return x.concept_id < y.concept_id; });
    const auto labels = 2 + rng.below(3);
    while (r.level3.size() < labels) {
      const int c = d * per_discipline + static_cast<int>(rng.below(static_cast<std::uint64_t>(per_discipline)));
      auto id = fmt::format("c{:06}", c);
      if (std::none_of(r.level3.begin(), r.level3.end(), [&](const ConceptScore& s) { return s.concept_id == id; }))
        r.level3.push_back({std::move(id), 0.05 + 0.9 * rng.unit()});
    }
    std::sort(r.level3.begin(), r.level3.end(),
              [](const ConceptScore& x, const ConceptScore& y) { return x.concept_id < y.concept_id; });
    if (i > 0) {
      const auto refs = rng.below(11);
      for (std::uint64_t k = 0; k < refs; ++k) r.references.push_back(fmt::format("r{:07}", rng.below(i)));
      if (rng.below(20) == 0) r.references.push_back(fmt::format("ext{:05}", rng.below(1000)));
    }
    if (rng.below(10) != 0) r.venue = fmt::format("j{:03}", rng.below(static_cast<std::uint64_t>(venues)));
    const auto team = 1 + rng.below(6);
    for (std::uint64_t k = 0; k < team; ++k) {
      const auto a = rng.below(static_cast<std::uint64_t>(authors));
      r.authors.push_back(fmt::format("a{:06}", a));
      if (rng.below(4) != 0) r.affiliations.push_back({r.authors.back(), coords[a].first, coords[a].second});
    }
    if (rng.below(8) != 0) {
      std::string title;
      const auto words = 3 + rng.below(8);
      for (std::uint64_t k = 0; k < words; ++k) {
        if (k) title += ' ';
        title += kTitleWords[rng.below(std::size(kTitleWords))];
      }
      r.title = std::move(title);
    }
    out.push_back(std::move(r));
  }
  return out;
}

CorpusStore make_synthetic(const std::string& generator, const std::map<std::string, std::int64_t>& params,
                           std::uint64_t seed) {
  auto take = [&](std::map<std::string, int*> fields) {
    for (const auto& [key, value] : params) {
      auto it = fields.find(key);
      if (it == fields.end()) throw ConfigError("synth " + generator + ": unknown parameter '" + key + "'");
      *it->second = static_cast<int>(value);
    }
  };
  std::vector<PaperRecord> records;
  if (generator == "planted-cycle") {
    PlantedCycle spec;
    take({{"n", &spec.n}, {"cycles", &spec.cycles}, {"disciplines", &spec.disciplines}, {"filler", &spec.filler},
          {"first_year", &spec.first_year}});
    records = planted_cycle(spec, seed);
  } else if (generator == "planted-clique") {
    PlantedClique spec;
    take({{"k", &spec.k}, {"disciplines", &spec.disciplines}, {"first_year", &spec.first_year}});
    records = planted_clique(spec);
  } else if (generator == "random-pairs") {
    RandomPairs spec;
    take({{"papers", &spec.papers}, {"concepts", &spec.concepts}, {"disciplines", &spec.disciplines},
          {"first_year", &spec.first_year}, {"last_year", &spec.last_year}});
    records = random_pairs(spec, seed);
  } else {
    throw ConfigError("unknown generator '" + generator + "' (planted-cycle, planted-clique, random-pairs)");
  }
  std::vector<PaperRecord> accepted;
  accepted.reserve(records.size());
  for (auto& r : records) {
    auto v = validate_record(std::move(r));
    if (auto* ok = std::get_if<PaperRecord>(&v)) accepted.push_back(std::move(*ok));
    else throw ConfigError("synthetic record rejected (check year parameters): " + std::get<Rejection>(v).paper_id);
  }
  return CorpusStore::from_records(std::move(accepted));
}

}  // namespace gapminer::synth
