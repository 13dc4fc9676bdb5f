#include "rankwalk/weights.hpp"

#include <string>

#include "rankwalk/errors.hpp"

namespace rankwalk {

WeightMatrix build_weights(const PairIncidence& incidence) {
  const int n = incidence.n;
  for (int i = 0; i < n; ++i) {
    if (incidence.appearances[i] < 1)
      throw StructuralError("player index " + std::to_string(i) +
                            " has no appearances; weight ratio undefined");
  }
  WeightMatrix m;
  m.n = n;
  m.w.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double ratio = static_cast<double>(incidence.appearances[i]) /
                           static_cast<double>(incidence.appearances[j]);
      m.at(i, j) = 1.0 + ratio * static_cast<double>(incidence.beats(i, j));
    }
  }
  return m;
}

double oriented_weight(const WeightMatrix& w, const Permutation& pi, int i, int j) {
  if (i == j) throw StructuralError("oriented_weight needs two distinct players");
  // Swapping demotes whichever player currently ranks better, so the move is
  // supported by the evidence for the order it creates.
  return oriented_weight_unchecked(w, pi, i, j);
}

}  // namespace rankwalk
