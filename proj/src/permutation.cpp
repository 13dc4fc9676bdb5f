#include "rankwalk/permutation.hpp"

#include <numeric>
#include <string>

#include "rankwalk/errors.hpp"

namespace rankwalk {

Permutation::Permutation(int n) {
  if (n < 1) throw StructuralError("permutation size must be at least 1");
  rank_of_.resize(n);
  player_at_.resize(n);
  std::iota(rank_of_.begin(), rank_of_.end(), 1);
  std::iota(player_at_.begin(), player_at_.end(), 0);
}

Permutation Permutation::from_ranks(std::vector<int> rank_of) {
  const int n = static_cast<int>(rank_of.size());
  if (n < 1) throw StructuralError("permutation size must be at least 1");
  Permutation p;
  p.player_at_.assign(n, -1);
  for (int player = 0; player < n; ++player) {
    const int r = rank_of[player];
    if (r < 1 || r > n || p.player_at_[r - 1] != -1) {
      throw StructuralError("rank assignment is not a bijection onto 1.." +
                            std::to_string(n));
    }
    p.player_at_[r - 1] = player;
  }
  p.rank_of_ = std::move(rank_of);
  return p;
}

void Permutation::swap_ranks(int i, int j) {
  const int ri = rank_of_[i];
  const int rj = rank_of_[j];
  rank_of_[i] = rj;
  rank_of_[j] = ri;
  player_at_[ri - 1] = j;
  player_at_[rj - 1] = i;
}

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw StructuralError("factorial argument out of range");
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

std::uint64_t permutation_index(const Permutation& p) {
  const int n = p.size();
  std::uint64_t index = 0;
  for (int a = 0; a < n; ++a) {
    // Count later entries smaller than this one (the Lehmer digit), then
    // weight by the number of arrangements of the remaining positions.
    int digit = 0;
    for (int b = a + 1; b < n; ++b) {
      if (p.rank_of(b) < p.rank_of(a)) ++digit;
    }
    index += static_cast<std::uint64_t>(digit) * factorial(n - 1 - a);
  }
  return index;
}

Permutation permutation_from_index(int n, std::uint64_t index) {
  if (index >= factorial(n)) throw StructuralError("permutation index out of range");
  std::vector<int> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 1);
  std::vector<int> rank_of(n);
  for (int a = 0; a < n; ++a) {
    const std::uint64_t block = factorial(n - 1 - a);
    const auto digit = static_cast<int>(index / block);
    index %= block;
    rank_of[a] = remaining[digit];
    remaining.erase(remaining.begin() + digit);
  }
  return Permutation::from_ranks(std::move(rank_of));
}

}  // namespace rankwalk
