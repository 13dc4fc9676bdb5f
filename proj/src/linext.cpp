#include "rankwalk/linext.hpp"

#include <cmath>
#include <string>

#include "rankwalk/errors.hpp"
#include "rankwalk/rng.hpp"

namespace rankwalk {

namespace {

// Throws unless the extension places every related pair in order.
void check_respects_edges(const DominancePoset& poset, const LinearExtension& ext) {
  const int n = poset.n;
  std::vector<int> position(n, -1);
  for (int p = 0; p < n; ++p) position[ext.order[p]] = p;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (poset.rel(i, j) && position[i] > position[j])
        throw StructuralError("sampled extension violates a dominance edge");
}

void enumerate_recursive(const DominancePoset& poset, std::vector<int>& order,
                         std::vector<char>& placed, std::vector<int>& blockers,
                         std::int64_t guard, std::vector<LinearExtension>& out) {
  const int n = poset.n;
  if (static_cast<int>(order.size()) == n) {
    if (static_cast<std::int64_t>(out.size()) >= guard)
      throw StructuralError("poset has more than " + std::to_string(guard) +
                            " linear extensions; enumeration refused");
    out.push_back({order});
    return;
  }
  for (int v = 0; v < n; ++v) {
    if (placed[v] || blockers[v] != 0) continue;
    placed[v] = 1;
    order.push_back(v);
    for (int u = 0; u < n; ++u)
      if (poset.rel(v, u)) --blockers[u];
    enumerate_recursive(poset, order, placed, blockers, guard, out);
    for (int u = 0; u < n; ++u)
      if (poset.rel(v, u)) ++blockers[u];
    order.pop_back();
    placed[v] = 0;
  }
}

}  // namespace

std::int64_t default_linext_burn_in(int n) {
  const double log_term = std::ceil(std::log(static_cast<double>(std::max(n, 2))));
  return static_cast<std::int64_t>(static_cast<double>(n) * n * n * log_term);
}

std::int64_t default_linext_thinning(int n) { return static_cast<std::int64_t>(n) * n; }

LinearExtension initial_extension(const DominancePoset& poset) {
  const int n = poset.n;
  if (n < 1) throw StructuralError("cannot extend an empty poset");
  std::vector<char> visited(n, 0);
  std::vector<int> postorder;
  postorder.reserve(n);
  // Iterative DFS over relation edges, children in ascending index order;
  // the reversed postorder is a topological order.
  for (int root = 0; root < n; ++root) {
    if (visited[root]) continue;
    std::vector<std::pair<int, int>> stack{{root, 0}};  // (node, next child index)
    visited[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      bool descended = false;
      while (next < n) {
        const int u = next++;
        if (poset.rel(v, u) && !visited[u]) {
          visited[u] = 1;
          stack.emplace_back(u, 0);
          descended = true;
          break;
        }
      }
      if (!descended && next >= n) {
        postorder.push_back(v);
        stack.pop_back();
      }
    }
  }
  LinearExtension ext;
  ext.order.assign(postorder.rbegin(), postorder.rend());
  return ext;
}

std::vector<LinearExtension> sample_extensions(const DominancePoset& poset, std::int64_t T,
                                               std::uint64_t seed,
                                               const LinextOptions& options) {
  const int n = poset.n;
  if (n < 1) throw StructuralError("cannot sample extensions of an empty poset");
  if (T < 1) throw StructuralError("need at least one extension");
  audit_poset(poset);

  LinextOptions resolved = options;
  if (resolved.burn_in_steps < 0) resolved.burn_in_steps = default_linext_burn_in(n);
  if (resolved.thin_steps < 0) resolved.thin_steps = default_linext_thinning(n);
  if (resolved.thin_steps < 1) throw StructuralError("thinning interval must be >= 1");

  std::vector<LinearExtension> out;
  out.reserve(static_cast<std::size_t>(T));

  LinearExtension current = initial_extension(poset);
  if (n == 1) {  // single state; the chain has no moves
    for (std::int64_t t = 0; t < T; ++t) out.push_back(current);
    return out;
  }

  Rng rng(seed);
  const auto chain_step = [&] {
    // Both draws happen unconditionally so the stream position depends only
    // on the schedule, never on the poset structure.
    const auto p = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n) - 1));
    const bool move = rng.uniform() < 0.5;
    const int a = current.order[p];
    const int b = current.order[p + 1];
    if (move && poset.incomparable(a, b)) {
      current.order[p] = b;
      current.order[p + 1] = a;
    }
  };

  for (std::int64_t t = 0; t < resolved.burn_in_steps; ++t) chain_step();
  for (std::int64_t s = 0; s < T; ++s) {
    for (std::int64_t t = 0; t < resolved.thin_steps; ++t) chain_step();
    const bool audit_this = resolved.audit == LinextOptions::Audit::full || s % 1000 == 0;
    if (audit_this) check_respects_edges(poset, current);
    out.push_back(current);
  }
  return out;
}

std::vector<LinearExtension> enumerate_extensions(const DominancePoset& poset,
                                                  std::int64_t guard) {
  const int n = poset.n;
  if (n < 1) throw StructuralError("cannot enumerate extensions of an empty poset");
  if (guard < 1) throw StructuralError("enumeration guard must be positive");

  // blockers[v] counts unplaced players that must precede v.
  std::vector<int> blockers(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (poset.rel(i, j)) ++blockers[j];

  std::vector<LinearExtension> out;
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> placed(n, 0);
  enumerate_recursive(poset, order, placed, blockers, guard, out);
  return out;
}

AvgRankReport average_ranks(const std::vector<LinearExtension>& extensions) {
  if (extensions.empty()) throw StructuralError("average_ranks needs extensions");
  const int n = static_cast<int>(extensions.front().order.size());
  AvgRankReport report;
  report.avg_rank.assign(n, 0.0);
  report.extensions_sampled = static_cast<std::int64_t>(extensions.size());
  for (const LinearExtension& ext : extensions)
    for (int p = 0; p < n; ++p) report.avg_rank[ext.order[p]] += static_cast<double>(p + 1);
  for (double& r : report.avg_rank) r /= static_cast<double>(report.extensions_sampled);
  return report;
}

AvgRankReport merge_reports(std::span<const AvgRankReport> reports) {
  if (reports.empty()) throw StructuralError("merge_reports needs at least one report");
  const std::size_t n = reports.front().avg_rank.size();
  AvgRankReport merged;
  merged.avg_rank.assign(n, 0.0);
  for (const AvgRankReport& r : reports) {
    if (r.avg_rank.size() != n)
      throw StructuralError("merge_reports: reports cover different rosters");
    for (std::size_t i = 0; i < n; ++i)
      merged.avg_rank[i] += r.avg_rank[i] * static_cast<double>(r.extensions_sampled);
    merged.extensions_sampled += r.extensions_sampled;
  }
  if (merged.extensions_sampled < 1)
    throw StructuralError("merge_reports: no extensions in any report");
  for (double& v : merged.avg_rank) v /= static_cast<double>(merged.extensions_sampled);
  return merged;
}

}  // namespace rankwalk
