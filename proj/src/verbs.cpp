#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "gapminer/metrics.hpp"

namespace gapminer::metrics {

const std::vector<std::string>& default_verb_lexicon() {
  static const std::vector<std::string> verbs = [] {
    // base, third person, past, present participle
    const char* forms[][4] = {
        {"produce", "produces", "produced", "producing"},
        {"generate", "generates", "generated", "generating"},
        {"develop", "develops", "developed", "developing"},
        {"construct", "constructs", "constructed", "constructing"},
        {"invent", "invents", "invented", "inventing"},
        {"embark", "embarks", "embarked", "embarking"},
        {"launch", "launches", "launched", "launching"},
        {"revolutionize", "revolutionizes", "revolutionized", "revolutionizing"},
        {"innovate", "innovates", "innovated", "innovating"},
        {"pioneer", "pioneers", "pioneered", "pioneering"},
        {"endorse", "endorses", "endorsed", "endorsing"},
        {"affirm", "affirms", "affirmed", "affirming"},
        {"confirm", "confirms", "confirmed", "confirming"},
        {"support", "supports", "supported", "supporting"},
        {"demonstrate", "demonstrates", "demonstrated", "demonstrating"},
        {"ameliorate", "ameliorates", "ameliorated", "ameliorating"},
        {"promote", "promotes", "promoted", "promoting"},
        {"enhance", "enhances", "enhanced", "enhancing"},
        {"modify", "modifies", "modified", "modifying"},
        {"improve", "improves", "improved", "improving"},
        {"update", "updates", "updated", "updating"},
        {"exploit", "exploits", "exploited", "exploiting"},
        {"leverage", "leverages", "leveraged", "leveraging"},
        {"extract", "extracts", "extracted", "extracting"},
        {"harness", "harnesses", "harnessed", "harnessing"},
    };
    std::vector<std::string> out;
    for (const auto& row : forms) out.insert(out.end(), std::begin(row), std::end(row));
    return out;
  }();
  return verbs;
}

std::vector<std::string> load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read verb lexicon " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize(line);
    if (line.empty() || line.front() == '#' || tokens.empty()) continue;
    out.push_back(tokens.front());
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalpha(u)) {
      current += static_cast<char>(std::tolower(u));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::map<std::string, double> verb_ratio(std::span<const std::string> titles_a, std::span<const std::string> titles_b,
                                         std::span<const std::string> lexicon) {
  struct Frequencies {
    std::unordered_map<std::string, std::int64_t> counts;
    std::int64_t tokens = 0;
  };
  auto count = [](std::span<const std::string> titles) {
    Frequencies f;
    for (const auto& t : titles)
      for (auto& token : tokenize(t)) {
        ++f.tokens;
        ++f.counts[std::move(token)];
      }
    return f;
  };
  const auto a = count(titles_a);
  const auto b = count(titles_b);
  if (a.tokens == 0 || b.tokens == 0) throw DataError("verb_ratio: a title collection has no words");
  std::map<std::string, double> out;
  for (const auto& verb : lexicon) {
    auto ia = a.counts.find(verb);
    auto ib = b.counts.find(verb);
    const double fa = ia == a.counts.end() ? 0.0 : 1e6 * static_cast<double>(ia->second) / static_cast<double>(a.tokens);
    const double fb = ib == b.counts.end() ? 0.0 : 1e6 * static_cast<double>(ib->second) / static_cast<double>(b.tokens);
    if (fa == 0.0 && fb == 0.0) continue;
    out[verb] = fb == 0.0 ? std::numeric_limits<double>::infinity() : fa / fb;
  }
  return out;
}

}  // namespace gapminer::metrics
