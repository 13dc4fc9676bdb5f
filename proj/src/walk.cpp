#include "rankwalk/walk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <queue>
#include <sstream>

#include "rankwalk/errors.hpp"
#include "rankwalk/util.hpp"

namespace rankwalk {

namespace {

constexpr int kMaxExactN = 7;  // 7! = 5040 states is the largest we materialize

void require_small_n(int n, const char* what) {
  if (n > kMaxExactN)
    throw StructuralError(std::string(what) + " refuses n > " +
                          std::to_string(kMaxExactN) + " (state space n! too large)");
}

// Sum of oriented weights over all unordered pairs; the normalizer of the
// move distribution.
double pair_weight_total(const WeightMatrix& w, const Permutation& pi) {
  const int n = w.n;
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) total += oriented_weight_unchecked(w, pi, i, j);
  return total;
}

}  // namespace

std::string_view to_string(InitialState s) {
  return s == InitialState::prevalence_sorted ? "prevalence_sorted" : "seeded_random";
}

InitialState initial_state_from_string(std::string_view s) {
  if (s == "prevalence_sorted") return InitialState::prevalence_sorted;
  if (s == "seeded_random") return InitialState::seeded_random;
  throw DataError("unknown initial state '" + std::string(s) + "'");
}

std::int64_t default_burn_in(int n) { return 50ll * n * (n - 1); }

std::int64_t default_thinning(int n) { return 2ll * (n - 1); }

void step(Permutation& pi, const WeightMatrix& w, Rng& rng) {
  if (rng.uniform() < 0.5) return;  // lazy half

  const int n = pi.size();
  const double total = pair_weight_total(w, pi);
  // Inverse-transform on the running sum of pair weights. Exact and
  // allocation-free; an alias table would be stale after one swap anyway.
  const double target = rng.uniform() * total;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      acc += oriented_weight_unchecked(w, pi, i, j);
      if (acc > target) {
        pi.swap_ranks(i, j);
        return;
      }
    }
  }
  pi.swap_ranks(n - 2, n - 1);  // rounding left target == acc; take the last pair
}

Permutation initial_permutation(const WeightMatrix& w, const WalkConfig& cfg, Rng& rng,
                                std::span<const std::int64_t> appearances) {
  const int n = w.n;
  if (cfg.initial_state == InitialState::seeded_random) {
    // Fisher-Yates over the rank word, fed by the chain's own stream.
    std::vector<int> rank_of(n);
    std::iota(rank_of.begin(), rank_of.end(), 1);
    for (int k = n - 1; k > 0; --k) {
      const auto r = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k) + 1));
      std::swap(rank_of[k], rank_of[r]);
    }
    return Permutation::from_ranks(std::move(rank_of));
  }

  // prevalence_sorted: most frequently seen player gets rank 1; ties go to
  // the lower index. With no counts available everyone ties -> identity.
  if (!appearances.empty() && static_cast<int>(appearances.size()) != n)
    throw StructuralError("appearance counts do not match the roster size");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (!appearances.empty()) {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return appearances[a] > appearances[b]; });
  }
  std::vector<int> rank_of(n);
  for (int r = 0; r < n; ++r) rank_of[order[r]] = r + 1;
  return Permutation::from_ranks(std::move(rank_of));
}

SampleSet run_chain(const WeightMatrix& w, const WalkConfig& cfg,
                    std::span<const std::int64_t> appearances,
                    std::string_view dataset_fingerprint) {
  const int n = w.n;
  if (n < 2)
    throw StructuralError("the walk needs at least 2 players; no transpositions exist");

  WalkConfig resolved = cfg;
  if (resolved.burn_in_steps < 0) resolved.burn_in_steps = default_burn_in(n);
  if (resolved.thin_steps < 0) resolved.thin_steps = default_thinning(n);
  if (resolved.thin_steps < 1) throw StructuralError("thinning interval must be >= 1");
  if (resolved.num_samples < 1) throw StructuralError("need at least one sample");

  Rng rng(resolved.seed);
  Permutation pi = initial_permutation(w, resolved, rng, appearances);
  for (std::int64_t t = 0; t < resolved.burn_in_steps; ++t) step(pi, w, rng);

  SampleSet out;
  out.n = n;
  out.config = resolved;
  out.chains = 1;
  out.rng_algorithm = std::string(kRngAlgorithm);
  out.dataset_fingerprint = std::string(dataset_fingerprint);
  out.samples.reserve(static_cast<std::size_t>(resolved.num_samples));
  for (std::int64_t s = 0; s < resolved.num_samples; ++s) {
    for (std::int64_t t = 0; t < resolved.thin_steps; ++t) step(pi, w, rng);
    out.samples.push_back(pi);
  }
  out.total_steps = resolved.burn_in_steps + resolved.thin_steps * resolved.num_samples;
  return out;
}

SampleSet run_chains(const WeightMatrix& w, const WalkConfig& cfg, int chains,
                     std::span<const std::int64_t> appearances,
                     std::string_view dataset_fingerprint) {
  if (chains < 1) throw StructuralError("need at least one chain");
  if (chains == 1) return run_chain(w, cfg, appearances, dataset_fingerprint);

  std::vector<std::future<SampleSet>> futures;
  futures.reserve(static_cast<std::size_t>(chains));
  for (int c = 0; c < chains; ++c) {
    WalkConfig chain_cfg = cfg;
    chain_cfg.seed = cfg.seed + static_cast<std::uint64_t>(c);
    futures.push_back(std::async(std::launch::async, [&w, chain_cfg, appearances,
                                                      dataset_fingerprint] {
      return run_chain(w, chain_cfg, appearances, dataset_fingerprint);
    }));
  }

  SampleSet merged = futures.front().get();
  for (std::size_t c = 1; c < futures.size(); ++c) {
    SampleSet part = futures[c].get();
    merged.samples.insert(merged.samples.end(),
                          std::make_move_iterator(part.samples.begin()),
                          std::make_move_iterator(part.samples.end()));
    merged.total_steps += part.total_steps;
  }
  merged.config.seed = cfg.seed;  // base seed; chain c used seed + c
  merged.chains = chains;
  return merged;
}

std::vector<double> kernel_row(const WeightMatrix& w, std::uint64_t state_index) {
  const int n = w.n;
  require_small_n(n, "kernel_row");
  if (n < 2) throw StructuralError("kernel_row needs at least 2 players");
  const std::uint64_t num_states = factorial(n);
  if (state_index >= num_states)
    throw StructuralError("state index out of range");

  Permutation pi = permutation_from_index(n, state_index);
  std::vector<double> row(num_states, 0.0);
  row[state_index] = 0.5;
  const double total = pair_weight_total(w, pi);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double mass = 0.5 * oriented_weight_unchecked(w, pi, i, j) / total;
      pi.swap_ranks(i, j);
      row[permutation_index(pi)] += mass;
      pi.swap_ranks(i, j);
    }
  }
  return row;
}

std::vector<double> exact_stationary(const WeightMatrix& w) {
  const int n = w.n;
  require_small_n(n, "exact_stationary");
  if (n < 1) throw StructuralError("exact_stationary needs at least 1 player");
  const std::uint64_t num_states = factorial(n);
  if (n < 2) return std::vector<double>(num_states, 1.0);

  // Materialize the kernel sparsely: each state has n(n-1)/2 swap targets
  // plus the lazy self-loop.
  const int num_pairs = n * (n - 1) / 2;
  std::vector<std::uint32_t> targets(num_states * num_pairs);
  std::vector<double> masses(num_states * num_pairs);
  for (std::uint64_t s = 0; s < num_states; ++s) {
    Permutation pi = permutation_from_index(n, s);
    const double total = pair_weight_total(w, pi);
    double row_sum = 0.5;
    int p = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j, ++p) {
        const double mass = 0.5 * oriented_weight_unchecked(w, pi, i, j) / total;
        pi.swap_ranks(i, j);
        targets[s * num_pairs + p] = static_cast<std::uint32_t>(permutation_index(pi));
        pi.swap_ranks(i, j);
        masses[s * num_pairs + p] = mass;
        row_sum += mass;
      }
    }
    if (std::fabs(row_sum - 1.0) > 1e-12)
      throw StructuralError("kernel row does not sum to 1 within 1e-12");
  }

  // Power iteration from uniform. The chain is lazy and fully supported, so
  // it converges to the unique stationary vector; iterate a little past the
  // advertised residual for slack.
  std::vector<double> mu(num_states, 1.0 / static_cast<double>(num_states));
  std::vector<double> next(num_states);
  constexpr double kResidual = 1e-13;
  constexpr int kMaxIterations = 500000;
  for (int it = 0; it < kMaxIterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint64_t s = 0; s < num_states; ++s) {
      const double m = mu[s];
      next[s] += 0.5 * m;
      const std::size_t base = s * num_pairs;
      for (int p = 0; p < num_pairs; ++p)
        next[targets[base + p]] += masses[base + p] * m;
    }
    double residual = 0.0;
    for (std::uint64_t s = 0; s < num_states; ++s) residual += std::fabs(next[s] - mu[s]);
    mu.swap(next);
    if (residual < kResidual) {
      // Clean accumulated drift so the vector sums to 1 exactly as possible.
      const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
      for (double& v : mu) v /= total;
      return mu;
    }
  }
  throw StructuralError("stationary power iteration did not converge");
}

SupportDiagnostics support_graph_check(const WeightMatrix& w) {
  const int n = w.n;
  require_small_n(n, "support_graph_check");
  if (n < 1) throw StructuralError("support_graph_check needs at least 1 player");

  const std::uint64_t num_states = factorial(n);
  std::vector<int> dist(num_states, -1);
  std::queue<std::uint64_t> frontier;
  dist[0] = 0;
  frontier.push(0);
  std::uint64_t visited = 1;
  int eccentricity = 0;
  while (!frontier.empty()) {
    const std::uint64_t s = frontier.front();
    frontier.pop();
    Permutation pi = permutation_from_index(n, s);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        // Off-diagonal weights are >= 1, so every transposition edge is in
        // the support; swaps are involutions, making the graph symmetric.
        pi.swap_ranks(i, j);
        const std::uint64_t t = permutation_index(pi);
        pi.swap_ranks(i, j);
        if (dist[t] == -1) {
          dist[t] = dist[s] + 1;
          eccentricity = std::max(eccentricity, dist[t]);
          frontier.push(t);
          ++visited;
        }
      }
    }
  }

  SupportDiagnostics diag;
  diag.strongly_connected = (visited == num_states);
  // The support graph is a Cayley graph of S_n, hence vertex-transitive: the
  // eccentricity of any one state equals the diameter.
  diag.diameter = eccentricity;
  diag.has_self_loops = true;  // lazy mass 1/2 at every state
  return diag;
}

std::vector<double> empirical_state_distribution(const SampleSet& samples) {
  const int n = samples.n;
  require_small_n(n, "empirical_state_distribution");
  if (samples.samples.empty())
    throw StructuralError("empirical_state_distribution needs samples");
  std::vector<double> freq(factorial(n), 0.0);
  for (const Permutation& pi : samples.samples) freq[permutation_index(pi)] += 1.0;
  const auto total = static_cast<double>(samples.samples.size());
  for (double& f : freq) f /= total;
  return freq;
}

void save_samples(const SampleSet& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write sample file " + path.string());
  out << "n=" << samples.n << "\n";
  out << "seed=" << samples.config.seed << "\n";
  out << "burn_in=" << samples.config.burn_in_steps << "\n";
  out << "thin=" << samples.config.thin_steps << "\n";
  out << "num_samples=" << samples.samples.size() << "\n";
  out << "chains=" << samples.chains << "\n";
  out << "total_steps=" << samples.total_steps << "\n";
  out << "initial=" << to_string(samples.config.initial_state) << "\n";
  out << "rng=" << samples.rng_algorithm << "\n";
  out << "fingerprint=" << samples.dataset_fingerprint << "\n";
  out << "samples\n";
  for (const Permutation& pi : samples.samples) {
    const auto& ranks = pi.ranks();
    for (std::size_t k = 0; k < ranks.size(); ++k)
      out << (k ? " " : "") << ranks[k];
    out << "\n";
  }
  if (!out) throw DataError("failed writing sample file " + path.string());
}

SampleSet load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sample file " + path.string());

  SampleSet set;
  std::int64_t declared = 0;
  std::string line;
  bool in_header = true;
  while (in_header && std::getline(in, line)) {
    const std::string_view stripped = trim(line);
    if (stripped == "samples") {
      in_header = false;
      break;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string_view::npos)
      throw DataError("malformed sample file header line '" + std::string(stripped) + "'");
    const std::string_view key = stripped.substr(0, eq);
    const std::string value{stripped.substr(eq + 1)};
    if (key == "n") set.n = std::stoi(value);
    else if (key == "seed") set.config.seed = std::stoull(value);
    else if (key == "burn_in") set.config.burn_in_steps = std::stoll(value);
    else if (key == "thin") set.config.thin_steps = std::stoll(value);
    else if (key == "num_samples") declared = std::stoll(value);
    else if (key == "chains") set.chains = std::stoi(value);
    else if (key == "total_steps") set.total_steps = std::stoll(value);
    else if (key == "initial") set.config.initial_state = initial_state_from_string(value);
    else if (key == "rng") set.rng_algorithm = value;
    else if (key == "fingerprint") set.dataset_fingerprint = value;
    else throw DataError("unknown sample file header key '" + std::string(key) + "'");
  }
  if (in_header) throw DataError("sample file " + path.string() + " has no samples section");
  if (set.n < 1) throw DataError("sample file missing roster size");

  while (std::getline(in, line)) {
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    std::vector<int> ranks;
    ranks.reserve(static_cast<std::size_t>(set.n));
    std::istringstream fields{std::string(stripped)};
    int r = 0;
    while (fields >> r) ranks.push_back(r);
    if (static_cast<int>(ranks.size()) != set.n)
      throw DataError("sample row length does not match n in " + path.string());
    set.samples.push_back(Permutation::from_ranks(std::move(ranks)));
  }
  if (static_cast<std::int64_t>(set.samples.size()) != declared)
    throw DataError("sample file declares " + std::to_string(declared) + " samples but contains " +
                    std::to_string(set.samples.size()));
  set.config.num_samples = declared;
  return set;
}

}  // namespace rankwalk
