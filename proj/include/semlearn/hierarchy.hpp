// Foundation-plus-fine-tuning pipeline: learnability of domain skills and
// texts from the basic model's zeta, the fine-tune fixed point, the combined
// domain testing error, and the two-stage simulation.
#pragma once

#include <cstdint>

#include "semlearn/density_evolution.hpp"
#include "semlearn/graph_model.hpp"
#include "semlearn/learners.hpp"
#include "semlearn/peeling_sim.hpp"

namespace semlearn {

struct HierarchyResult {
  double zeta_basic = 0.0;
  double lambda_f_at_zeta = 0.0;     // P(domain skill learnable)
  double learnable_text_prob = 0.0;  // exp(-c_f (1 - Lambda_f(zeta)))
  double p_f = 0.0;
  double zeta_f = 0.0;  // P(learnable domain skill learned after fine-tuning)
  double epsilon_f = 0.0;
  double case_i = 0.0;   // text not learnable
  double case_ii = 0.0;  // learnable but contains an unlearned skill
  int iterations_used = 0;
  bool converged = false;
};

// (Lambda_f(zeta), exp(-c_f (1 - Lambda_f(zeta)))).
std::pair<double, double> learnable_probs(double zeta,
                                          const HierarchyConfig& cfg);

// Solves the basic model for zeta, then the fine-tune fixed point obtained
// by substituting c -> c_f Lambda_f(zeta) and
// R -> R_f exp(-c_f(1-Lambda_f(zeta))) / Lambda_f(zeta) into the
// single-class recursion with the same profile.
HierarchyResult fine_tune_solve(const HierarchyConfig& cfg,
                                const SuccessProfile& profile,
                                const DESettings& settings = {});

struct HierarchySimResult {
  MonteCarloStat zeta_f;     // learned fraction among learnable domain skills
  MonteCarloStat epsilon_f;  // fresh-domain-text testing error
  MonteCarloStat learnable_skill_fraction;
  MonteCarloStat learnable_text_fraction;
};

// Full two-stage simulation: sample + peel the basic graph, flag each domain
// skill learnable when all its sampled basic prerequisites (drawn from the
// pgf, selected uniformly with replacement, deduplicated) were learned,
// drop non-learnable domain texts, peel the learnable domain graph, and
// measure epsilon_f on fresh domain texts.
HierarchySimResult simulate_hierarchy(const HierarchyConfig& cfg,
                                      const PsiFunction& psi, int trials,
                                      std::uint32_t test_texts = 10000,
                                      int num_threads = 0);

}  // namespace semlearn
