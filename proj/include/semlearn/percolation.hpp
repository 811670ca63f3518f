// Learned-skill association graph and its giant component, both empirically
// (union-find over co-occurrence cliques) and analytically (the mu_s/mu_t
// fixed point and the c^2 R zeta > 1 condition).
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semlearn/density_evolution.hpp"
#include "semlearn/graph_model.hpp"
#include "semlearn/learners.hpp"
#include "semlearn/peeling_sim.hpp"

namespace semlearn {

// Simple graph over learned skills; two skills are adjacent when they
// co-occur in at least one training text.
struct AssociationGraph {
  std::vector<std::uint32_t> nodes;                       // learned skill ids
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // a < b, unique
  std::vector<std::uint32_t> component;  // per node, dense component ids
  std::uint32_t num_components = 0;
  std::uint32_t largest_component_size = 0;
};

AssociationGraph build_association_graph(const BipartiteGraph& graph,
                                         std::span<const std::uint8_t> learned);

class UnionFind {
 public:
  explicit UnionFind(std::uint32_t n);
  std::uint32_t find(std::uint32_t x);
  void unite(std::uint32_t a, std::uint32_t b);
  std::uint32_t component_size(std::uint32_t x);
  std::uint32_t largest() const { return largest_; }

 private:
  std::vector<std::uint32_t> parent_, size_;
  std::uint32_t largest_ = 0;
};

// Largest association-graph component as a fraction of all |S| skills,
// without materializing edges.
double largest_component_fraction(const BipartiteGraph& graph,
                                  std::span<const std::uint8_t> learned);

struct MuResult {
  double mu_s = 1.0;
  double mu_t = 1.0;
  int iterations_used = 0;
  bool converged = false;
  bool monotone = true;  // both sequences nondecreasing from (0,0)
};

// Iterates mu_s <- exp(-c(1-mu_t)), mu_t <- (1-zeta) + zeta exp(-Rc(1-mu_s))
// from (0,0); the sequence is monotone and converges in [0,1]^2.
MuResult mu_fixed_point(double c, double R, double zeta,
                        int max_iter = 2000000, double tol = 1e-13);

struct PercolationResult {
  double zeta = 0.0;
  double mu_s = 1.0;
  double mu_t = 1.0;
  double p_G = 0.0;              // zeta (1 - exp(-Rc(1-mu_s)))
  double condition_value = 0.0;  // c^2 R zeta
  bool giant_exists = false;     // condition_value > 1
  int iterations_used = 0;
};

PercolationResult p_giant_theory(double c, double R,
                                 const SuccessProfile& profile,
                                 const DESettings& settings = {});

enum class GiantSimMode {
  ActualLearned,  // learned set from a real SCNS run
  IidZeta,        // skills learned iid with the DE zeta (theory's assumption)
};

MonteCarloStat giant_component_sim(const SingleClassConfig& cfg,
                                   const PsiFunction& psi,
                                   const SuccessProfile& profile, int trials,
                                   GiantSimMode mode, int num_threads = 0);

struct RegionCell {
  double c = 0.0;
  double R = 0.0;
  double condition_value = 0.0;
  bool giant_exists = false;
};

struct RegionScan {
  std::vector<RegionCell> cells;  // row-major, c outer, R inner
  // Per c column: smallest R with a giant component (bisected to 1e-3).
  std::vector<std::pair<double, std::optional<double>>> threshold_by_c;
  std::optional<double> min_R;  // argmin over columns
  std::optional<double> min_c;
};

RegionScan region_scan(double c_lo, double c_hi, double R_lo, double R_hi,
                       double step, const SuccessProfile& profile,
                       const DESettings& settings = {}, int num_threads = 0);

}  // namespace semlearn
