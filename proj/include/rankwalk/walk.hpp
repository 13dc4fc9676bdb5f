#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rankwalk/permutation.hpp"
#include "rankwalk/rng.hpp"
#include "rankwalk/weights.hpp"

namespace rankwalk {

enum class InitialState { prevalence_sorted, seeded_random };

std::string_view to_string(InitialState s);
InitialState initial_state_from_string(std::string_view s);

// Auto-resolved defaults: burn-in of 50*n*(n-1) steps (25n thinning windows)
// and thinning of 2*(n-1) steps between recorded samples.
std::int64_t default_burn_in(int n);
std::int64_t default_thinning(int n);

struct WalkConfig {
  std::uint64_t seed = 1;
  std::int64_t burn_in_steps = -1;  // -1: use default_burn_in(n)
  std::int64_t thin_steps = -1;     // -1: use default_thinning(n)
  std::int64_t num_samples = 100000;
  InitialState initial_state = InitialState::prevalence_sorted;
};

struct SampleSet {
  int n = 0;
  std::vector<Permutation> samples;
  WalkConfig config;  // echoed back with the -1 sentinels resolved
  int chains = 1;
  std::int64_t total_steps = 0;  // chain steps consumed, burn-in included
  std::string rng_algorithm;    // identifies the generator + derivations
  std::string dataset_fingerprint;
};

// One transition of the lazy walk: stay with probability 1/2, otherwise swap
// the ranks of a pair {i, j} chosen with probability proportional to its
// oriented weight. Mutates pi in place.
void step(Permutation& pi, const WeightMatrix& w, Rng& rng);

// Starting state per the config: players ordered by descending appearance
// count, ties by lower index (so with no counts supplied the identity), or a
// uniformly random permutation drawn from the chain's own seeded stream.
Permutation initial_permutation(const WeightMatrix& w, const WalkConfig& cfg, Rng& rng,
                                std::span<const std::int64_t> appearances);

// Runs one chain: initialize, burn in, then record a sample every thin_steps
// steps until num_samples are collected. Deterministic given (w, cfg).
SampleSet run_chain(const WeightMatrix& w, const WalkConfig& cfg,
                    std::span<const std::int64_t> appearances = {},
                    std::string_view dataset_fingerprint = {});

// Runs `chains` independent chains in parallel (seeds cfg.seed + c for chain
// c) and concatenates their samples in chain order. run_chains(w, cfg, 1)
// equals run_chain(w, cfg).
SampleSet run_chains(const WeightMatrix& w, const WalkConfig& cfg, int chains,
                     std::span<const std::int64_t> appearances = {},
                     std::string_view dataset_fingerprint = {});

// One fully materialized kernel row: probability of moving from the state
// with the given index to every state, indexed by permutation_index. Small-n
// oracle machinery; n <= 7.
std::vector<double> kernel_row(const WeightMatrix& w, std::uint64_t state_index);

// Stationary distribution of the materialized kernel via power iteration,
// indexed by permutation_index. Refuses n > 7. Verifies that every kernel
// row sums to 1 within 1e-12 and that the iteration converged.
std::vector<double> exact_stationary(const WeightMatrix& w);

struct SupportDiagnostics {
  bool strongly_connected = false;
  int diameter = 0;
  bool has_self_loops = false;
};

// Explores the transition support over all n! states by breadth-first
// search. Refuses n > 7. Off-diagonal weights >= 1 mean every transposition
// is always available, so a valid W yields a connected graph of diameter
// n-1 with a self-loop at every state.
SupportDiagnostics support_graph_check(const WeightMatrix& w);

// Empirical distribution of a SampleSet over all n! states (n <= 7),
// indexed by permutation_index.
std::vector<double> empirical_state_distribution(const SampleSet& samples);

// Line-oriented persistence: a key=value metadata header followed by one
// sample per line (space-separated rank values).
void save_samples(const SampleSet& samples, const std::filesystem::path& path);
SampleSet load_samples(const std::filesystem::path& path);

}  // namespace rankwalk
