// Skill-text bipartite graph types and random samplers.
//
// A graph has |S| skill nodes and |D| text nodes, both carrying class labels,
// and a multigraph edge set: text degrees are Poisson, endpoints land
// uniformly inside the target skill class, and parallel edges are kept as
// multiplicities. Graphs are immutable once built and safe to share across
// threads.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace semlearn {

class Rng;

struct SingleClassConfig {
  std::uint32_t num_skills = 0;        // |S|
  double ratio_R = 0.0;                // R = |D|/|S|
  double mean_skills_per_text = 0.0;   // c
  std::uint64_t seed = 0;

  std::uint32_t num_texts() const;     // |D| = round(R*|S|)
  void validate() const;               // throws std::invalid_argument
};

struct MultiClassConfig {
  std::uint32_t num_skills = 0;
  double ratio_R = 0.0;
  std::vector<double> text_class_fractions;   // alpha_j, sums to 1
  std::vector<double> skill_class_fractions;  // beta_k, sums to 1
  // mean_matrix[k][j] = mean number of class-k skills in a class-j text.
  std::vector<std::vector<double>> mean_matrix;
  std::uint64_t seed = 0;

  std::size_t num_text_classes() const { return text_class_fractions.size(); }
  std::size_t num_skill_classes() const { return skill_class_fractions.size(); }
  std::uint32_t num_texts() const;
  void validate() const;
};

// Generating function of the number of basic prerequisites of a
// domain-specific skill: either Poisson(mean) or an explicit coefficient
// list delta_0, delta_1, ...
struct PrereqPgf {
  enum class Kind { Poisson, Explicit };
  Kind kind = Kind::Poisson;
  double poisson_mean = 0.0;
  std::vector<double> coeffs;

  static PrereqPgf poisson(double mean);
  static PrereqPgf explicit_coeffs(std::vector<double> delta);

  double eval(double x) const;          // Lambda_f(x)
  std::uint32_t sample(Rng& rng) const; // draw a prerequisite count
  void validate() const;
};

struct HierarchyConfig {
  SingleClassConfig basic;
  std::uint32_t num_domain_skills = 0;       // |S_f|
  double ratio_Rf = 0.0;                     // R_f = |D_f|/|S_f|
  double mean_domain_skills_per_text = 0.0;  // c_f
  PrereqPgf prereq;
  std::uint64_t seed = 0;

  std::uint32_t num_domain_texts() const;
  void validate() const;
};

// Immutable bipartite multigraph with CSR adjacency on both sides.
// Distinct (skill, text) pairs carry a multiplicity; degree caches count
// edges with multiplicity.
struct BipartiteGraph {
  std::uint32_t num_skills = 0;
  std::uint32_t num_texts = 0;
  std::uint32_t num_skill_classes = 1;  // K
  std::uint32_t num_text_classes = 1;   // J

  std::vector<std::uint32_t> skill_class;  // size num_skills
  std::vector<std::uint32_t> text_class;   // size num_texts

  // text -> incident distinct skills (sorted) with multiplicities
  std::vector<std::size_t> text_offsets;
  std::vector<std::uint32_t> text_skills;
  std::vector<std::uint32_t> text_mult;
  // skill -> incident distinct texts with multiplicities
  std::vector<std::size_t> skill_offsets;
  std::vector<std::uint32_t> skill_texts;
  std::vector<std::uint32_t> skill_mult;

  std::vector<std::uint32_t> text_degree;   // with multiplicity
  std::vector<std::uint32_t> skill_degree;  // with multiplicity

  std::span<const std::uint32_t> skills_of(std::uint32_t t) const {
    return {text_skills.data() + text_offsets[t],
            text_offsets[t + 1] - text_offsets[t]};
  }
  std::span<const std::uint32_t> skill_mult_of(std::uint32_t t) const {
    return {text_mult.data() + text_offsets[t],
            text_offsets[t + 1] - text_offsets[t]};
  }
  std::span<const std::uint32_t> texts_of(std::uint32_t s) const {
    return {skill_texts.data() + skill_offsets[s],
            skill_offsets[s + 1] - skill_offsets[s]};
  }

  std::size_t num_edge_pairs() const { return text_skills.size(); }
  std::uint64_t num_edges_with_multiplicity() const;

  // Consistency of CSR structure, degree caches and class labels;
  // throws std::logic_error on violation.
  void check_invariants() const;

  // Plain-text dump, LF line endings, bit-exact round trip:
  //   skills=<n> texts=<m> K=<k> J=<j>
  //   <s_idx> <t_idx> <multiplicity>      (one line per distinct pair)
  //   skill_classes
  //   <n labels>
  //   text_classes
  //   <m labels>
  void dump(std::ostream& out) const;
  static BipartiteGraph load(std::istream& in);
};

// Builds a graph from per-text edge endpoint lists (endpoints may repeat;
// repeats become multiplicities). Class labels are taken as-is.
BipartiteGraph build_graph(std::uint32_t num_skills,
                           std::vector<std::vector<std::uint32_t>> text_edges,
                           std::vector<std::uint32_t> skill_class,
                           std::vector<std::uint32_t> text_class,
                           std::uint32_t num_skill_classes,
                           std::uint32_t num_text_classes);

// Single-class sampler: text t draws Poisson(c) endpoints, each uniform
// over skills. Deterministic per (seed, t).
BipartiteGraph sample_single_class(const SingleClassConfig& cfg);

// Multi-class sampler: class sizes are largest-remainder roundings of the
// fraction vectors (contiguous blocks); a class-j text draws independent
// Poisson(c[k][j]) endpoint counts per skill class k, each endpoint uniform
// in class k.
BipartiteGraph sample_multi_class(const MultiClassConfig& cfg);

struct DomainSample {
  BipartiteGraph graph;                      // domain texts x domain skills
  std::vector<std::uint8_t> skill_learnable; // iid Bernoulli(Lambda_f(zeta))
  double learnable_skill_fraction = 0.0;
};

// Domain-specific sampler under the hierarchy assumptions: Poisson(c_f)
// text degrees over |S_f| domain skills, plus an independent learnability
// flag per domain skill with probability Lambda_f(learned_basic_prob).
DomainSample sample_domain_specific(const HierarchyConfig& cfg,
                                    double learned_basic_prob);

// Fresh test text per the sampling assumptions: distinct skills (sorted)
// drawn as Poisson(c) uniform endpoints. Streamed by (seed, index) so test
// sets never collide with training streams.
std::vector<std::uint32_t> sample_test_text(std::uint32_t num_skills, double c,
                                            std::uint64_t seed,
                                            std::uint64_t index);

}  // namespace semlearn
