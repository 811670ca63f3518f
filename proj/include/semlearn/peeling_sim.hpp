// Successive cancellation of novel skills on sampled graphs, plus the
// Monte Carlo wrappers that compare empirical learned fractions and testing
// errors against density evolution.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "semlearn/graph_model.hpp"
#include "semlearn/learners.hpp"

namespace semlearn {

struct ScnsOptions {
  // Count distinct novel skills per text (phi(t) is a set). Off: parallel
  // edges count with multiplicity.
  bool dedup = true;
  bool record_trace = false;
  // Only consulted when a psi designates a strict subset of a text's novel
  // skills (never happens for the built-in psi kinds); the subset is then
  // drawn uniformly from this seed so the run stays reproducible.
  std::uint64_t subset_seed = 0;
};

struct ScnsRound {
  int round = 0;
  std::uint64_t learned_total = 0;
  std::uint64_t newly_learned = 0;
};

struct ScnsOutcome {
  std::vector<std::uint8_t> learned;  // per skill node
  int rounds = 0;                     // includes the final empty round
  double learned_fraction = 0.0;
  std::vector<double> learned_fraction_by_class;
  std::vector<ScnsRound> trace;       // only when record_trace
};

// Synchronous rounds: every text evaluates psi on its pre-round novel
// counts; all designated skills become learned simultaneously; stops when a
// round learns nothing. Deterministic.
ScnsOutcome run_scns(const BipartiteGraph& graph, const PsiFunction& psi,
                     const ScnsOptions& options = {});

// Sequential peeling in the given text order (each text sees the current
// state immediately); sweeps repeat until one full sweep learns nothing.
// For the 1-skill learner this matches run_scns (peeling confluence).
ScnsOutcome run_scns_sequential(const BipartiteGraph& graph,
                                const PsiFunction& psi,
                                std::span<const std::uint32_t> order,
                                const ScnsOptions& options = {});

// Per-round trace CSV: round,learned_count,newly_learned
void write_trace_csv(const ScnsOutcome& outcome, std::ostream& out);

struct MonteCarloStat {
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
};

// Mean learned fraction over independently seeded graphs (trial t uses
// cfg.seed + t).
MonteCarloStat empirical_learned_fraction(const SingleClassConfig& cfg,
                                          const PsiFunction& psi, int trials,
                                          const ScnsOptions& options = {},
                                          int num_threads = 0);

// Fraction of fresh test texts containing at least one unlearned skill,
// averaged over trials. Test texts are sampled per (A1)/(A2) from a stream
// disjoint from training.
MonteCarloStat empirical_testing_error(const SingleClassConfig& cfg,
                                       const PsiFunction& psi, int trials,
                                       std::uint32_t test_texts,
                                       const ScnsOptions& options = {},
                                       int num_threads = 0);

}  // namespace semlearn
