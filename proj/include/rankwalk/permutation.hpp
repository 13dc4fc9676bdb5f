#pragma once

#include <cstdint>
#include <vector>

namespace rankwalk {

// A full ranking of n players. Ranks are 1-based: rank 1 is best. Both the
// player->rank map and its inverse are kept so lookups in either direction
// are O(1); the two arrays are maintained together as an invariant.
class Permutation {
 public:
  // Identity: player p gets rank p+1.
  explicit Permutation(int n);

  // Builds from a player->rank map (1-based). Throws StructuralError if the
  // ranks are not a bijection onto {1..n}.
  static Permutation from_ranks(std::vector<int> rank_of);

  int size() const { return static_cast<int>(rank_of_.size()); }

  // Rank of player p, in 1..n.
  int rank_of(int p) const { return rank_of_[p]; }

  // Player holding rank r (1-based).
  int player_at(int r) const { return player_at_[r - 1]; }

  // Exchanges the ranks of players i and j; everyone else keeps theirs.
  void swap_ranks(int i, int j);

  const std::vector<int>& ranks() const { return rank_of_; }

  bool operator==(const Permutation&) const = default;

 private:
  Permutation() = default;
  std::vector<int> rank_of_;    // player -> rank (1-based)
  std::vector<int> player_at_;  // rank-1  -> player
};

// n! for n <= 20 (fits in 64 bits). Throws StructuralError beyond that.
std::uint64_t factorial(int n);

// Lexicographic index of the rank word (rank_of(0)-1, ..., rank_of(n-1)-1)
// among all n! words; a bijection onto [0, n!). Used to address state vectors
// when the full chain is materialized for small n.
std::uint64_t permutation_index(const Permutation& p);
Permutation permutation_from_index(int n, std::uint64_t index);

}  // namespace rankwalk
