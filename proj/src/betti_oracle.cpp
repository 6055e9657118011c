// Dense reference for Betti numbers. Shares nothing with the sparse reduction
// beyond the simplex list: faces are recomputed from vertex tuples and ranks
// come from plain Gaussian elimination over packed Z/2 rows.

#include <map>

#include "gapminer/simd.hpp"
#include "gapminer/topology.hpp"

namespace gapminer {
namespace {

using BitRow = std::vector<std::uint64_t>;

std::int64_t rank_gf2(std::vector<BitRow> rows, std::size_t columns) {
  std::int64_t rank = 0;
  std::size_t top = 0;
  for (std::size_t col = 0; col < columns && top < rows.size(); ++col) {
    const std::size_t word = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t pivot = top;
    while (pivot < rows.size() && !(rows[pivot][word] & bit)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[top], rows[pivot]);
    for (std::size_t r = top + 1; r < rows.size(); ++r)
      if (rows[r][word] & bit) simd::xor_into(rows[r], rows[top]);
    ++top;
    ++rank;
  }
  return rank;
}

}  // namespace

std::vector<std::int64_t> betti_oracle(const FlagFiltration& filtration, Year year) {
  const auto max_dim = static_cast<std::size_t>(filtration.max_dim());
  std::vector<std::vector<std::vector<VertexId>>> simplices(max_dim + 1);
  std::size_t total = 0;
  for (SimplexIndex s = 0; s < filtration.size(); ++s) {
    if (filtration.value(s) > year) continue;
    auto vs = filtration.vertices(s);
    simplices[vs.size() - 1].emplace_back(vs.begin(), vs.end());
    if (++total > kBettiOracleLimit)
      throw ConfigError("betti_oracle: more than " + std::to_string(kBettiOracleLimit) + " simplices");
  }

  std::vector<std::map<std::vector<VertexId>, std::size_t>> position(max_dim + 1);
  for (std::size_t k = 0; k <= max_dim; ++k)
    for (std::size_t i = 0; i < simplices[k].size(); ++i) position[k].emplace(simplices[k][i], i);

  // rank_of_boundary[k] = rank of the boundary map from k-chains to (k-1)-chains.
  std::vector<std::int64_t> rank_of_boundary(max_dim + 2, 0);
  for (std::size_t k = 1; k <= max_dim; ++k) {
    const std::size_t columns = simplices[k - 1].size();
    const std::size_t words = (columns + 63) / 64;
    std::vector<BitRow> rows;
    rows.reserve(simplices[k].size());
    for (const auto& simplex : simplices[k]) {
      BitRow row(words, 0);
      for (std::size_t skip = 0; skip < simplex.size(); ++skip) {
        std::vector<VertexId> face;
        for (std::size_t i = 0; i < simplex.size(); ++i)
          if (i != skip) face.push_back(simplex[i]);
        auto it = position[k - 1].find(face);
        GAPMINER_CHECK(it != position[k - 1].end(), "betti_oracle: complex not closed under faces");
        row[it->second / 64] ^= std::uint64_t{1} << (it->second % 64);
      }
      rows.push_back(std::move(row));
    }
    rank_of_boundary[k] = rank_gf2(std::move(rows), columns);
  }

  std::vector<std::int64_t> betti(max_dim + 1);
  for (std::size_t k = 0; k <= max_dim; ++k)
    betti[k] = static_cast<std::int64_t>(simplices[k].size()) - rank_of_boundary[k] - rank_of_boundary[k + 1];
  return betti;
}

}  // namespace gapminer
