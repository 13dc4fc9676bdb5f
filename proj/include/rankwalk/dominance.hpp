#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rankwalk/walk.hpp"

namespace rankwalk {

// Per-player rank CDFs. cdf[i][k-1] is the probability (empirical or exact)
// that player i holds rank k or better. Rows are nondecreasing and end at
// exactly 1; summing a column over players gives k, because every ranking
// places exactly k players at rank <= k.
struct EmpiricalRankDistribution {
  int n = 0;
  std::int64_t sample_count = 0;  // 0 marks an exact, non-sampled distribution
  std::vector<double> cdf;        // n*n row-major

  double at(int i, int k) const {  // k is 1-based
    return cdf[static_cast<std::size_t>(i) * n + (k - 1)];
  }
  double& at(int i, int k) {
    return cdf[static_cast<std::size_t>(i) * n + (k - 1)];
  }
};

EmpiricalRankDistribution empirical_cdfs(const SampleSet& samples);

// Exact CDFs induced by a distribution over all n! states (as produced by
// exact_stationary); n <= 7.
EmpiricalRankDistribution cdfs_from_stationary(const std::vector<double>& mu, int n);

// First-order stochastic dominance with slack: i dominates j when i's CDF is
// everywhere >= j's minus epsilon and exceeds it by more than epsilon at
// least once. At epsilon = 0 this is weak dominance made strict at a point.
bool dominates(const EmpiricalRankDistribution& dist, int i, int j, double epsilon);

// Strict partial order of conclusive superiority, with its transitive
// reduction and maximal elements.
struct DominancePoset {
  int n = 0;
  std::vector<char> relation;  // n*n; relation[i*n+j] != 0 means i is conclusively better than j
  std::vector<std::pair<int, int>> cover_edges;  // (better, worse), lexicographic
  std::vector<int> maximal;                      // ascending player indices
  double epsilon = 0.0;
  std::int64_t sample_count = 0;

  bool rel(int i, int j) const { return relation[static_cast<std::size_t>(i) * n + j] != 0; }
  bool incomparable(int i, int j) const { return i != j && !rel(i, j) && !rel(j, i); }
};

// Applies the dominance rule to every ordered pair, resolves any mutual
// dominance to incomparable, closes the relation transitively, and fails if
// the closure breaks antisymmetry (the slack was too large). On success
// computes the unique transitive reduction and the maximal set, and audits
// the order axioms before returning.
DominancePoset build_poset(const EmpiricalRankDistribution& dist, double epsilon);

// Rebuilds a poset from its cover edges (as when loading a stored artifact):
// transitive closure, reduction, maximal set, audit.
DominancePoset poset_from_covers(int n, const std::vector<std::pair<int, int>>& covers,
                                 double epsilon, std::int64_t sample_count);

// Explicit axioms audit: irreflexive, antisymmetric, transitive; cover_edges
// re-close to exactly the relation; maximal matches the relation. Throws
// StructuralError on any violation.
void audit_poset(const DominancePoset& poset);

}  // namespace rankwalk
