#include "rankwalk/dominance.hpp"

#include <algorithm>
#include <string>

#include "rankwalk/errors.hpp"

namespace rankwalk {

namespace {

// Per-row prefix sums turned into CDFs; the final column is pinned to
// exactly 1.0 (it is exact mathematically; accumulation would leave it a
// few ulps off and poison downstream comparisons).
void finalize_cdfs(EmpiricalRankDistribution& dist) {
  const int n = dist.n;
  for (int i = 0; i < n; ++i) {
    for (int k = 2; k <= n; ++k) dist.at(i, k) += dist.at(i, k - 1);
    dist.at(i, n) = 1.0;
  }
}

std::vector<char> transitive_closure(int n, std::vector<char> rel) {
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (!rel[static_cast<std::size_t>(i) * n + k]) continue;
      const std::size_t krow = static_cast<std::size_t>(k) * n;
      const std::size_t irow = static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j)
        if (rel[krow + j]) rel[irow + j] = 1;
    }
  }
  return rel;
}

// Fills cover_edges and maximal from a closed relation.
void derive_structure(DominancePoset& poset) {
  const int n = poset.n;
  poset.cover_edges.clear();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!poset.rel(i, j)) continue;
      bool has_intermediate = false;
      for (int k = 0; k < n && !has_intermediate; ++k)
        has_intermediate = poset.rel(i, k) && poset.rel(k, j);
      if (!has_intermediate) poset.cover_edges.emplace_back(i, j);
    }
  }
  std::sort(poset.cover_edges.begin(), poset.cover_edges.end());

  poset.maximal.clear();
  for (int j = 0; j < n; ++j) {
    bool has_superior = false;
    for (int i = 0; i < n && !has_superior; ++i) has_superior = poset.rel(i, j);
    if (!has_superior) poset.maximal.push_back(j);
  }
}

DominancePoset finish_poset(int n, std::vector<char> rel, double epsilon,
                            std::int64_t sample_count) {
  rel = transitive_closure(n, std::move(rel));
  for (int i = 0; i < n; ++i) {
    if (rel[static_cast<std::size_t>(i) * n + i])
      throw StructuralError(
          "dominance relation became cyclic after transitive closure; "
          "choose a smaller epsilon (got " + std::to_string(epsilon) + ")");
    for (int j = i + 1; j < n; ++j) {
      if (rel[static_cast<std::size_t>(i) * n + j] &&
          rel[static_cast<std::size_t>(j) * n + i])
        throw StructuralError(
            "dominance relation lost antisymmetry after transitive closure; "
            "choose a smaller epsilon (got " + std::to_string(epsilon) + ")");
    }
  }
  DominancePoset poset;
  poset.n = n;
  poset.relation = std::move(rel);
  poset.epsilon = epsilon;
  poset.sample_count = sample_count;
  derive_structure(poset);
  audit_poset(poset);
  return poset;
}

}  // namespace

EmpiricalRankDistribution empirical_cdfs(const SampleSet& samples) {
  if (samples.samples.empty())
    throw StructuralError("empirical_cdfs needs a nonempty sample set");
  const int n = samples.n;
  EmpiricalRankDistribution dist;
  dist.n = n;
  dist.sample_count = static_cast<std::int64_t>(samples.samples.size());
  dist.cdf.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double unit = 1.0 / static_cast<double>(dist.sample_count);
  for (const Permutation& pi : samples.samples)
    for (int i = 0; i < n; ++i) dist.at(i, pi.rank_of(i)) += unit;
  finalize_cdfs(dist);
  return dist;
}

EmpiricalRankDistribution cdfs_from_stationary(const std::vector<double>& mu, int n) {
  if (mu.size() != factorial(n))
    throw StructuralError("stationary vector length does not match n!");
  EmpiricalRankDistribution dist;
  dist.n = n;
  dist.sample_count = 0;  // exact
  dist.cdf.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (std::uint64_t s = 0; s < mu.size(); ++s) {
    const Permutation pi = permutation_from_index(n, s);
    for (int i = 0; i < n; ++i) dist.at(i, pi.rank_of(i)) += mu[s];
  }
  finalize_cdfs(dist);
  return dist;
}

bool dominates(const EmpiricalRankDistribution& dist, int i, int j, double epsilon) {
  if (i == j) throw StructuralError("dominates needs two distinct players");
  if (epsilon < 0) throw StructuralError("epsilon must be nonnegative");
  bool strict_somewhere = false;
  for (int k = 1; k <= dist.n; ++k) {
    const double ci = dist.at(i, k);
    const double cj = dist.at(j, k);
    if (ci < cj - epsilon) return false;
    if (ci > cj + epsilon) strict_somewhere = true;
  }
  return strict_somewhere;
}

DominancePoset build_poset(const EmpiricalRankDistribution& dist, double epsilon) {
  const int n = dist.n;
  if (n < 1) throw StructuralError("build_poset needs a nonempty distribution");
  std::vector<char> rel(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && dominates(dist, i, j, epsilon))
        rel[static_cast<std::size_t>(i) * n + j] = 1;

  // A pair claiming dominance both ways carries no usable order information;
  // keep the output an honest strict order by dropping both claims.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rel[static_cast<std::size_t>(i) * n + j] &&
          rel[static_cast<std::size_t>(j) * n + i]) {
        rel[static_cast<std::size_t>(i) * n + j] = 0;
        rel[static_cast<std::size_t>(j) * n + i] = 0;
      }
    }
  }
  return finish_poset(n, std::move(rel), epsilon, dist.sample_count);
}

DominancePoset poset_from_covers(int n, const std::vector<std::pair<int, int>>& covers,
                                 double epsilon, std::int64_t sample_count) {
  if (n < 1) throw StructuralError("poset_from_covers needs n >= 1");
  std::vector<char> rel(static_cast<std::size_t>(n) * n, 0);
  for (const auto& [better, worse] : covers) {
    if (better < 0 || better >= n || worse < 0 || worse >= n || better == worse)
      throw StructuralError("cover edge references an invalid player index");
    rel[static_cast<std::size_t>(better) * n + worse] = 1;
  }
  return finish_poset(n, std::move(rel), epsilon, sample_count);
}

void audit_poset(const DominancePoset& poset) {
  const int n = poset.n;
  if (n < 1 || poset.relation.size() != static_cast<std::size_t>(n) * n)
    throw StructuralError("poset audit: malformed relation matrix");

  for (int i = 0; i < n; ++i) {
    if (poset.rel(i, i)) throw StructuralError("poset audit: relation is not irreflexive");
    for (int j = 0; j < n; ++j) {
      if (i != j && poset.rel(i, j) && poset.rel(j, i))
        throw StructuralError("poset audit: relation is not antisymmetric");
      if (!poset.rel(i, j)) continue;
      for (int k = 0; k < n; ++k)
        if (poset.rel(j, k) && !poset.rel(i, k))
          throw StructuralError("poset audit: relation is not transitive");
    }
  }

  // The covers must re-close to exactly the relation.
  std::vector<char> reclosed(static_cast<std::size_t>(n) * n, 0);
  for (const auto& [better, worse] : poset.cover_edges)
    reclosed[static_cast<std::size_t>(better) * n + worse] = 1;
  reclosed = transitive_closure(n, std::move(reclosed));
  if (reclosed != poset.relation)
    throw StructuralError("poset audit: cover edges do not regenerate the relation");

  std::vector<int> expected_maximal;
  for (int j = 0; j < n; ++j) {
    bool has_superior = false;
    for (int i = 0; i < n && !has_superior; ++i) has_superior = poset.rel(i, j);
    if (!has_superior) expected_maximal.push_back(j);
  }
  if (expected_maximal != poset.maximal)
    throw StructuralError("poset audit: maximal set does not match the relation");
}

}  // namespace rankwalk
