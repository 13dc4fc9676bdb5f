#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankwalk/dominance.hpp"

namespace rankwalk {

// A total order consistent with the poset: player indices from best
// (position 0) to worst. Two different ways to read a player's standing:
// order[p] is the player at position p; the rank of player i is
// 1 + its position.
struct LinearExtension {
  std::vector<int> order;
};

struct LinextOptions {
  // -1 resolves to n^3 * ceil(ln(max(n, 2))) burn-in and n^2 thinning,
  // conservative for the known mixing regime of this chain family.
  std::int64_t burn_in_steps = -1;
  std::int64_t thin_steps = -1;
  // full: audit every sample against every relation edge; spot: 1 in 1000.
  enum class Audit { spot, full };
  Audit audit = Audit::spot;
};

std::int64_t default_linext_burn_in(int n);
std::int64_t default_linext_thinning(int n);

// Deterministic starting point: depth-first topological order following
// relation edges, visiting candidates in ascending index order.
LinearExtension initial_extension(const DominancePoset& poset);

// Draws T extensions approaching the uniform distribution over all linear
// extensions: a lazy chain that repeatedly picks an adjacent position pair
// uniformly and swaps it with probability 1/2 when the two players are
// incomparable. Deterministic given (poset, T, seed, options).
std::vector<LinearExtension> sample_extensions(const DominancePoset& poset, std::int64_t T,
                                               std::uint64_t seed,
                                               const LinextOptions& options = {});

// Exhaustive lexicographic backtracking over topological orders. Refuses to
// produce more than `guard` extensions (counting aborts the search).
std::vector<LinearExtension> enumerate_extensions(const DominancePoset& poset,
                                                  std::int64_t guard = 1'000'000);

struct AvgRankReport {
  std::vector<double> avg_rank;  // mean 1-based position per player
  std::int64_t extensions_sampled = 0;
};

AvgRankReport average_ranks(const std::vector<LinearExtension>& extensions);

// Pools reports from independent sampler chains by weighted average.
AvgRankReport merge_reports(std::span<const AvgRankReport> reports);

}  // namespace rankwalk
