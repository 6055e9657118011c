#include <charconv>
#include <istream>
#include <ostream>

#include "gapminer/csv.hpp"
#include "gapminer/topology.hpp"

namespace gapminer {
namespace {

std::vector<std::string> feature_row(const FlagFiltration& f, SimplexIndex birth, int dim,
                                     std::optional<Year> death) {
  const auto vs = f.vertices(birth);
  std::string rest;
  for (std::size_t i = 1; i < vs.size(); ++i) {
    if (i > 1) rest += ' ';
    rest += f.vertex_labels()[vs[i]];
  }
  return {std::to_string(dim), f.vertex_labels()[vs[0]], rest, std::to_string(f.value(birth)),
          death ? std::to_string(*death) : std::string("inf")};
}

Year parse_year(const std::string& text, std::size_t line_no) {
  Year y = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), y);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DataError("diagram dump line " + std::to_string(line_no) + ": bad year '" + text + "'");
  return y;
}

}  // namespace

void write_diagram(std::ostream& out, const std::string& discipline, const FlagFiltration& filtration,
                   const PersistenceDiagram& diagram) {
  csv::write_row(out, {"#discipline", discipline});
  // Merge pairs and essentials into one (dim, birth) ordered listing.
  std::size_t p = 0, e = 0;
  const auto& pairs = diagram.pairs;
  const auto& ess = diagram.essentials;
  while (p < pairs.size() || e < ess.size()) {
    const bool take_pair =
        e == ess.size() ||
        (p < pairs.size() && std::pair(pairs[p].dim, pairs[p].birth) < std::pair(ess[e].dim, ess[e].birth));
    if (take_pair) {
      csv::write_row(out, feature_row(filtration, pairs[p].birth, pairs[p].dim, filtration.value(pairs[p].death)));
      ++p;
    } else {
      csv::write_row(out, feature_row(filtration, ess[e].birth, ess[e].dim, std::nullopt));
      ++e;
    }
  }
}

std::map<std::string, std::vector<DiagramFeature>> read_diagrams(std::istream& in) {
  std::map<std::string, std::vector<DiagramFeature>> result;
  std::vector<DiagramFeature>* current = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = csv::split_row(line);
    if (fields[0] == "#discipline") {
      if (fields.size() != 2) throw DataError("diagram dump line " + std::to_string(line_no) + ": bad header");
      current = &result[fields[1]];
      continue;
    }
    if (!current || fields.size() != 5)
      throw DataError("diagram dump line " + std::to_string(line_no) + ": expected 5 fields");
    DiagramFeature feature;
    feature.dim = static_cast<int>(parse_year(fields[0], line_no));
    feature.birth_vertices.push_back(fields[1]);
    std::string_view rest = fields[2];
    while (!rest.empty()) {
      auto space = rest.find(' ');
      feature.birth_vertices.emplace_back(rest.substr(0, space));
      rest = space == std::string_view::npos ? std::string_view() : rest.substr(space + 1);
    }
    feature.birth_year = parse_year(fields[3], line_no);
    if (fields[4] != "inf") feature.death_year = parse_year(fields[4], line_no);
    current->push_back(std::move(feature));
  }
  return result;
}

}  // namespace gapminer
