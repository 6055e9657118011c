#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gapminer/corpus.hpp"

namespace gapminer::synth {

/// `cycles` disjoint chordless n-cycles per discipline. Each paper carries one
/// concept pair; cycle edges arrive one per year and the closing paper is the
/// only gap opener of its cycle. Filler papers repeat existing pairs after
/// every cycle has closed.
struct PlantedCycle {
  int n = 5;
  int cycles = 1;
  int disciplines = 1;
  int filler = 0;  // total across disciplines
  Year first_year = 2000;
};

/// One k-clique per discipline with edges introduced in lexicographic order,
/// one per year. Every cycle is filled in the year it closes.
struct PlantedClique {
  int k = 3;
  int disciplines = 1;
  Year first_year = 2000;
};

/// Random labels, references, authors, venues, coordinates and titles.
struct RandomPairs {
  int papers = 1000;
  int concepts = 200;
  int disciplines = 3;
  Year first_year = 1990;
  Year last_year = 2019;
};

std::vector<PaperRecord> planted_cycle(const PlantedCycle& spec, std::uint64_t seed);
std::vector<PaperRecord> planted_clique(const PlantedClique& spec);
std::vector<PaperRecord> random_pairs(const RandomPairs& spec, std::uint64_t seed);

/// Dispatches on the generator name (planted-cycle, planted-clique,
/// random-pairs) with integer parameters named like the struct fields.
/// Throws ConfigError for an unknown generator or parameter.
CorpusStore make_synthetic(const std::string& generator, const std::map<std::string, std::int64_t>& params,
                           std::uint64_t seed);

}  // namespace gapminer::synth
