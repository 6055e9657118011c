// Journal-pair atypicality against citation-switched baselines.

#include <algorithm>
#include <unordered_map>

#include "gapminer/metrics.hpp"
#include "gapminer/parallel.hpp"
#include "gapminer/simd.hpp"

namespace gapminer::metrics {
namespace {

using VenueId = std::uint32_t;
constexpr VenueId kNoVenue = UINT32_MAX;

std::uint64_t pair_key(VenueId a, VenueId b) {
  if (b < a) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Distinct journal pairs of one reference list; a journal cited twice pairs
// with itself.
void journal_pairs(std::span<const PaperIndex> cited, std::span<const VenueId> venue_of,
                   std::vector<VenueId>& scratch, std::vector<std::uint64_t>& out) {
  scratch.clear();
  for (auto q : cited) scratch.push_back(venue_of[q]);
  std::sort(scratch.begin(), scratch.end());
  out.clear();
  for (auto i = scratch.begin(); i != scratch.end();) {
    const auto run_end = std::upper_bound(i, scratch.end(), *i);
    if (run_end - i >= 2) out.push_back(pair_key(*i, *i));
    for (auto j = run_end; j != scratch.end(); j = std::upper_bound(j, scratch.end(), *j))
      out.push_back(pair_key(*i, *j));
    i = run_end;
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

std::size_t rewire(ReferenceLayer& layer, Rng& rng, std::size_t attempts) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (row, slot)
  for (std::uint32_t r = 0; r < layer.cited.size(); ++r)
    for (std::uint32_t s = 0; s < layer.cited[r].size(); ++s) edges.emplace_back(r, s);
  if (edges.size() < 2) return 0;
  std::size_t accepted = 0;
  auto holds = [](const std::vector<PaperIndex>& refs, PaperIndex q) {
    return std::find(refs.begin(), refs.end(), q) != refs.end();
  };
  for (std::size_t n = 0; n < attempts; ++n) {
    const auto& [a, i] = edges[rng.below(edges.size())];
    const auto& [b, j] = edges[rng.below(edges.size())];
    if (a == b) continue;
    auto& ra = layer.cited[a];
    auto& rb = layer.cited[b];
    const PaperIndex x = ra[i], y = rb[j];
    if (x == y || y == layer.citing[a] || x == layer.citing[b]) continue;
    if (holds(ra, y) || holds(rb, x)) continue;
    ra[i] = y;
    rb[j] = x;
    ++accepted;
  }
  return accepted;
}

std::vector<std::optional<NoveltyProfile>> novelty(const CorpusStore& store, const CitationIndex& index,
                                                   const NoveltyConfig& config) {
  if (config.n_rand < 1) throw ConfigError("n_rand must be at least 1");
  if (!(config.sd_floor > 0)) throw ConfigError("novelty sd floor must be positive");

  std::vector<std::string_view> names;
  for (const auto& p : store.papers())
    if (p.venue) names.push_back(*p.venue);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<VenueId> venue_of(store.size(), kNoVenue);
  for (PaperIndex p = 0; p < store.size(); ++p)
    if (const auto& v = store.paper(p).venue)
      venue_of[p] = static_cast<VenueId>(std::lower_bound(names.begin(), names.end(), *v) - names.begin());

  std::vector<std::optional<NoveltyProfile>> out(store.size());
  const auto& years = store.years();
  const auto& kernels = simd::active_kernels();

  parallel_for(years.size(), config.threads, [&](std::size_t yi) {
    const Year year = years[yi];
    const auto range = store.year_range(year);
    ReferenceLayer layer;
    std::size_t edge_count = 0;
    for (auto p = range.begin; p < range.end; ++p) {
      std::vector<PaperIndex> cited;
      for (auto q : index.references(p))
        if (venue_of[q] != kNoVenue) cited.push_back(q);
      if (cited.empty()) continue;
      edge_count += cited.size();
      layer.citing.push_back(p);
      layer.cited.push_back(std::move(cited));
    }

    // Observed co-citation counts, one slot per pair seen this year.
    std::unordered_map<std::uint64_t, std::uint32_t> slot;
    std::vector<std::uint32_t> observed;
    std::vector<std::vector<std::uint32_t>> paper_slots(layer.citing.size());
    std::vector<VenueId> scratch;
    std::vector<std::uint64_t> pairs;
    for (std::size_t r = 0; r < layer.citing.size(); ++r) {
      journal_pairs(layer.cited[r], venue_of, scratch, pairs);
      for (auto key : pairs) {
        auto [it, inserted] = slot.try_emplace(key, static_cast<std::uint32_t>(observed.size()));
        if (inserted) observed.push_back(0);
        ++observed[it->second];
        paper_slots[r].push_back(it->second);
      }
    }
    if (observed.empty()) return;

    std::vector<double> sum(observed.size(), 0.0), sum_sq(observed.size(), 0.0);
    std::vector<std::uint32_t> counts(observed.size());
    for (int rep = 0; rep < config.n_rand; ++rep) {
      ReferenceLayer shuffled = layer;
      Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(year), static_cast<std::uint64_t>(rep)));
      rewire(shuffled, rng, static_cast<std::size_t>(config.swaps_per_edge) * edge_count);
      std::fill(counts.begin(), counts.end(), 0u);
      for (const auto& cited : shuffled.cited) {
        journal_pairs(cited, venue_of, scratch, pairs);
        for (auto key : pairs)
          if (auto it = slot.find(key); it != slot.end()) ++counts[it->second];
      }
      kernels.accumulate_moments(counts.data(), sum.data(), sum_sq.data(), counts.size());
    }
    std::vector<double> z(observed.size());
    kernels.z_scores(observed.data(), sum.data(), sum_sq.data(), static_cast<double>(config.n_rand), config.sd_floor,
                     z.data(), z.size());

    for (std::size_t r = 0; r < layer.citing.size(); ++r) {
      const PaperIndex p = layer.citing[r];
      if (venue_of[p] == kNoVenue) continue;
      const auto& cited = layer.cited[r];
      const bool two_venues = std::any_of(cited.begin(), cited.end(),
                                          [&](PaperIndex q) { return venue_of[q] != venue_of[cited.front()]; });
      if (!two_venues) continue;
      NoveltyProfile profile;
      for (auto s : paper_slots[r]) profile.z_scores.push_back(z[s]);
      std::sort(profile.z_scores.begin(), profile.z_scores.end());
      profile.tenth_percentile = quantile_linear(profile.z_scores, 0.1);
      out[p] = std::move(profile);
    }
  });
  return out;
}

}  // namespace gapminer::metrics
