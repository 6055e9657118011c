#include "gapminer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace gapminer::metrics {
namespace {

bool intersects(std::span<const PaperIndex> a, std::span<const PaperIndex> b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return true;
  }
  return false;
}

}  // namespace

std::optional<double> cd_from_counts(const DisruptionCounts& counts) {
  const auto denominator = counts.n_i + counts.n_j + counts.n_k;
  if (denominator <= 0) return std::nullopt;
  return static_cast<double>(counts.n_i - counts.n_j) / static_cast<double>(denominator);
}

DisruptionCounts disruption_counts(PaperIndex p, const CorpusStore& store, const CitationIndex& index,
                                   std::optional<int> window) {
  const Year year = store.paper(p).year;
  auto in_window = [&](PaperIndex q) { return !window || store.paper(q).year <= year + *window; };
  const auto refs = index.references(p);
  const auto citers = index.citers(p);
  DisruptionCounts counts;
  for (auto q : citers) {
    if (!in_window(q)) continue;
    if (intersects(index.references(q), refs)) ++counts.n_j;
    else ++counts.n_i;
  }
  std::vector<PaperIndex> neighbours;
  for (auto r : refs)
    for (auto q : index.citers(r))
      if (q != p && store.paper(q).year >= year && in_window(q)) neighbours.push_back(q);
  std::sort(neighbours.begin(), neighbours.end());
  neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());
  for (auto q : neighbours)
    if (!std::binary_search(citers.begin(), citers.end(), q)) ++counts.n_k;
  return counts;
}

std::optional<double> cd_index(PaperIndex p, const CorpusStore& store, const CitationIndex& index,
                               std::optional<int> window) {
  if (store.paper(p).references.empty()) return std::nullopt;
  return cd_from_counts(disruption_counts(p, store, index, window));
}

std::vector<std::optional<double>> percentile_rank(std::span<const std::optional<double>> values,
                                                   std::span<const std::int64_t> cohorts) {
  GAPMINER_CHECK(values.size() == cohorts.size(), "percentile_rank: values and cohorts differ in length");
  std::map<std::int64_t, std::vector<double>> sorted;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i]) sorted[cohorts[i]].push_back(*values[i]);
  for (auto& [_, v] : sorted) std::sort(v.begin(), v.end());
  std::vector<std::optional<double>> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    const auto& v = sorted[cohorts[i]];
    const auto lo = std::lower_bound(v.begin(), v.end(), *values[i]);
    const auto hi = std::upper_bound(lo, v.end(), *values[i]);
    const double below = static_cast<double>(lo - v.begin());
    const double equal = static_cast<double>(hi - lo);
    out[i] = 100.0 * (below + 0.5 * equal) / static_cast<double>(v.size());
  }
  return out;
}

double quantile_linear(std::span<const double> sorted, double q) {
  GAPMINER_CHECK(!sorted.empty(), "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<std::int64_t> citation_trajectory(PaperIndex p, const CorpusStore& store, const CitationIndex& index,
                                              int horizon) {
  const Year year = store.paper(p).year;
  const auto span = std::min<std::int64_t>(horizon, store.max_year() - year);
  std::vector<std::int64_t> c(static_cast<std::size_t>(std::max<std::int64_t>(span, 0) + 1), 0);
  for (auto q : index.citers(p)) {
    const auto t = static_cast<std::int64_t>(store.paper(q).year) - year;
    if (t >= 0 && t <= span) ++c[static_cast<std::size_t>(t)];
  }
  return c;
}

std::size_t peak_index(std::span<const std::int64_t> c) {
  return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
}

double sleeping_beauty(std::span<const std::int64_t> c) {
  if (c.empty()) return 0.0;
  const auto tm = peak_index(c);
  if (tm == 0) return 0.0;
  const double c0 = static_cast<double>(c[0]);
  const double slope = (static_cast<double>(c[tm]) - c0) / static_cast<double>(tm);
  double b = 0.0;
  for (std::size_t t = 0; t <= tm; ++t) {
    const double ct = static_cast<double>(c[t]);
    const double lt = slope * static_cast<double>(t) + c0;
    b += (lt - ct) / std::max(1.0, ct);
  }
  return b;
}

std::array<std::optional<std::int64_t>, kMaxWindow> citation_windows(PaperIndex p, const CorpusStore& store,
                                                                     const CitationIndex& index, Year horizon) {
  const Year year = store.paper(p).year;
  std::array<std::int64_t, kMaxWindow + 1> per_offset{};
  for (auto q : index.citers(p)) {
    const auto t = store.paper(q).year - year;
    if (t >= 0 && t <= kMaxWindow) ++per_offset[static_cast<std::size_t>(t)];
  }
  std::array<std::optional<std::int64_t>, kMaxWindow> out{};
  std::int64_t running = per_offset[0];
  for (int k = 1; k <= kMaxWindow; ++k) {
    running += per_offset[static_cast<std::size_t>(k)];
    if (year + k <= horizon) out[static_cast<std::size_t>(k - 1)] = running;
  }
  return out;
}

double top_threshold(std::span<const double> sorted, double k_percent) {
  GAPMINER_CHECK(!sorted.empty(), "top-k threshold of an empty cohort");
  const double n = static_cast<double>(sorted.size());
  const double pos = (1.0 - k_percent / 100.0) * (n + 1.0);  // 1-based
  if (pos <= 1.0) return sorted.front();
  if (pos >= n) return sorted.back();
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

std::vector<std::uint8_t> top_k_flags(const CorpusStore& store, std::span<const std::int64_t> citations,
                                      double k_percent) {
  GAPMINER_CHECK(citations.size() == store.size(), "top_k_flags: one citation count per paper expected");
  std::map<std::pair<Year, ConceptIndex>, std::vector<PaperIndex>> cohorts;
  for (PaperIndex p = 0; p < store.size(); ++p)
    for (auto d : store.disciplines_of(p)) cohorts[{store.paper(p).year, d}].push_back(p);
  std::vector<std::uint8_t> flags(store.size(), 0);
  std::vector<double> values;
  for (const auto& [_, members] : cohorts) {
    values.clear();
    for (auto p : members) values.push_back(static_cast<double>(citations[p]));
    std::sort(values.begin(), values.end());
    const double threshold = top_threshold(values, k_percent);
    for (auto p : members)
      if (static_cast<double>(citations[p]) >= threshold) flags[p] = 1;
  }
  return flags;
}

ConceptOccurrences::ConceptOccurrences(const CorpusStore& store) : years_(store.concepts().size()) {
  // Store order is ascending by year, so every list comes out sorted.
  for (PaperIndex p = 0; p < store.size(); ++p)
    for (auto c : store.concepts_of(p)) years_[c].push_back(store.paper(p).year);
}

std::int64_t ConceptOccurrences::before(ConceptIndex c, Year year) const {
  const auto& v = years_[c];
  return std::lower_bound(v.begin(), v.end(), year) - v.begin();
}

ConceptPairStats concept_pair_stats(const PaperRecord& paper, std::span<const ConceptPair> pairs,
                                    const CorpusStore& store, const ConceptOccurrences& occurrences) {
  std::vector<std::pair<ConceptIndex, ConceptIndex>> distinct;
  for (const auto& [a, b] : pairs) {
    auto ca = store.find_concept(a);
    auto cb = store.find_concept(b);
    GAPMINER_CHECK(ca && cb, "concept_pair_stats: pair names an unregistered concept");
    distinct.emplace_back(std::min(*ca, *cb), std::max(*ca, *cb));
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  ConceptPairStats stats;
  if (distinct.empty()) return stats;

  auto mean_over_pairs = [&](auto&& endpoint_value) {
    double total = 0;
    for (const auto& [a, b] : distinct) total += 0.5 * (endpoint_value(a) + endpoint_value(b));
    return total / static_cast<double>(distinct.size());
  };
  stats.age = mean_over_pairs(
      [&](ConceptIndex c) { return static_cast<double>(paper.year - store.concept_info(c).first_year_seen); });
  for (auto [offset, slot] : {std::pair{0, &stats.popularity}, {5, &stats.popularity_5}, {10, &stats.popularity_10}})
    *slot = mean_over_pairs(
        [&](ConceptIndex c) { return static_cast<double>(occurrences.before(c, paper.year + offset)); });
  return stats;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double s1 = std::sin(dlat / 2), s2 = std::sin(dlon / 2);
  const double h = s1 * s1 + std::cos(lat1 * rad) * std::cos(lat2 * rad) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::min(1.0, h)));
}

AuthorHistory::AuthorHistory(const CorpusStore& store) : first_year_(store.author_count(), 0) {
  std::vector<std::uint32_t> counts(store.author_count() + 1, 0);
  for (PaperIndex p = 0; p < store.size(); ++p)
    for (auto a : store.authors_of(p)) ++counts[a + 1];
  for (std::size_t a = 1; a < counts.size(); ++a) counts[a] += counts[a - 1];
  offsets_ = counts;
  papers_.resize(offsets_.back());
  for (PaperIndex p = 0; p < store.size(); ++p)
    for (auto a : store.authors_of(p)) {
      if (counts[a] == offsets_[a]) first_year_[a] = store.paper(p).year;
      papers_[counts[a]++] = p;
    }
}

std::span<const PaperIndex> AuthorHistory::papers(AuthorIndex a) const {
  return {papers_.data() + offsets_[a], offsets_[a + 1] - offsets_[a]};
}

TeamStats team_stats(PaperIndex p, const CorpusStore& store, const AuthorHistory& history) {
  const auto& paper = store.paper(p);
  const auto team = store.authors_of(p);
  TeamStats stats;
  stats.team_size = static_cast<std::int64_t>(team.size());
  if (!team.empty()) {
    double total = 0;
    for (auto a : team) total += static_cast<double>(paper.year - history.first_year(a));
    stats.career_age = total / static_cast<double>(team.size());
  }
  if (team.size() >= 2 && team.size() <= 20) {
    std::size_t fresh = 0;
    for (auto a : team) {
      bool collaborated = false;
      for (auto q : history.papers(a)) {
        if (store.paper(q).year >= paper.year) break;
        for (auto b : store.authors_of(q))
          if (b != a && std::find(team.begin(), team.end(), b) != team.end()) collaborated = true;
        if (collaborated) break;
      }
      if (!collaborated) ++fresh;
    }
    stats.freshness = static_cast<double>(fresh) / static_cast<double>(team.size());
  }
  const auto& affil = paper.affiliations;
  if (affil.size() >= 2) {
    double total = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < affil.size(); ++i)
      for (std::size_t j = i + 1; j < affil.size(); ++j, ++pairs)
        total += haversine_km(affil[i].latitude, affil[i].longitude, affil[j].latitude, affil[j].longitude);
    stats.geo_km = total / static_cast<double>(pairs);
  }
  return stats;
}

}  // namespace gapminer::metrics
