// Density evolution for the peeling process on skill-text bipartite graphs.
//
// Single class: iterate p <- 1 - P_suc(c * exp(-cR(1-p))) from p = 1;
// then zeta = 1 - exp(-cR(1-p)) and epsilon = 1 - exp(-c(1-zeta)).
// Multi class: the coupled per-class recursion over reduced loads
// q (.) c_j with skill-side pgf Lambda_k(x) = exp(-d_k(1-x)).
#pragma once

#include <optional>
#include <vector>

#include "semlearn/learners.hpp"

namespace semlearn {

struct MultiClassConfig;

struct DESettings {
  int max_iter = 10000;   // iteration budget
  double tol = 1e-12;     // stop when max_k |p_k step| < tol
  bool record_trace = false;
};

struct DEState {
  int iteration = 0;
  std::vector<double> p;  // one entry per skill class
  std::vector<double> q;
};

struct DEResult {
  std::vector<double> p;      // converged text-end erasure probabilities
  std::vector<double> q;      // converged skill-end erasure probabilities
  std::vector<double> zeta;   // learned-skill probability per skill class
  // Probability that a fresh class-j text is not understood.
  std::vector<double> epsilon_by_text_class;
  // Probability that a fresh text has an unlearned class-k skill,
  // marginalized over text classes.
  std::vector<double> epsilon_by_skill_class;
  double epsilon = 0.0;       // alpha-weighted testing error
  int iterations_used = 0;
  double residual = 0.0;      // |p - F(p)| at the returned point
  bool converged = false;
  bool monotone = true;       // p never increased along the iteration
  std::vector<DEState> trace;  // per-iteration states when recorded

  double p1() const { return p[0]; }
  double zeta1() const { return zeta[0]; }
};

DEResult de_solve_single(double c, double R, const SuccessProfile& profile,
                         const DESettings& settings = {});

// Mean parameters of a multi-class ensemble; what de_solve_multi consumes.
// Skill-side means follow d_{k,j} = c[k][j] * alpha_j * R / beta_k.
struct MultiClassMeans {
  double ratio_R = 0.0;
  std::vector<double> alpha;              // text class fractions
  std::vector<double> beta;               // skill class fractions
  std::vector<std::vector<double>> c;     // c[k][j]

  static MultiClassMeans from_config(const MultiClassConfig& cfg);
  void validate() const;
  std::size_t num_skill_classes() const { return beta.size(); }
  std::size_t num_text_classes() const { return alpha.size(); }
};

DEResult de_solve_multi(const MultiClassMeans& means,
                        const SuccessProfile& profile,
                        const DESettings& settings = {});

// Location of the testing-error threshold: the smallest R in [R_lo, R_hi]
// at which epsilon has fallen by at least epsilon_drop below its value at
// R_lo (the sudden-change locator), grid-scanned and then bisected to 1e-3.
// Returns nullopt when epsilon never falls that far.
std::optional<double> find_threshold(double c, const SuccessProfile& profile,
                                     double epsilon_drop, double R_lo,
                                     double R_hi, int grid,
                                     const DESettings& settings = {});

// Two-class near-far recursion with skill-side means
// d_k = (c1 + c2) R / beta_k, the published form for the coupled-threshold
// figure. Note this is NOT the d_{k,j} rule sampled graphs obey (see
// de_solve_multi); the two coincide only when c1 == c2.
struct NearFarResult {
  double p1 = 0.0, p2 = 0.0;
  double zeta1 = 0.0, zeta2 = 0.0;
  double epsilon1 = 0.0, epsilon2 = 0.0;  // per-skill-class testing errors
  int iterations_used = 0;
  bool converged = false;
  bool monotone = true;
};

NearFarResult de_solve_near_far_coupled(double c1, double c2, double beta,
                                        double R,
                                        const DESettings& settings = {});

}  // namespace semlearn
