#pragma once

#include <vector>

#include "rankwalk/ingest.hpp"
#include "rankwalk/permutation.hpp"

namespace rankwalk {

// Pairwise move weights. Off-diagonal entries are always >= 1, the diagonal
// is 0. w(i, j) grows with the number of snapshots where i outranked j,
// rescaled by how often each side was observed at all.
struct WeightMatrix {
  int n = 0;
  std::vector<double> w;  // n*n row-major

  double at(int i, int j) const { return w[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return w[static_cast<std::size_t>(i) * n + j]; }
};

// w(i, j) = 1 + (appearances[i] / appearances[j]) * beats(i, j) for i != j.
// Every roster player must have at least one appearance — the ratio is
// undefined otherwise — so a zero count raises StructuralError.
WeightMatrix build_weights(const PairIncidence& incidence);

// Weight of proposing to swap players i and j out of ranking `pi`: the
// historical support for the order the swap would create. If i currently
// outranks j, the swap promotes j over i and the support is w(j, i);
// otherwise it is w(i, j). Symmetric in the pair; i == j is an error.
// Inline because the walk evaluates it for every pair at every step.
double oriented_weight(const WeightMatrix& w, const Permutation& pi, int i, int j);

inline double oriented_weight_unchecked(const WeightMatrix& w, const Permutation& pi,
                                        int i, int j) {
  return pi.rank_of(i) < pi.rank_of(j) ? w.at(j, i) : w.at(i, j);
}

}  // namespace rankwalk
