// Abstract learners: closed-form success-probability profiles, deterministic
// psi functions on exact novel-skill counts, and the Monte Carlo bridge that
// induces a success profile from a psi function.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace semlearn {

// P_suc for a learner that handles up to one novel skill per text.
double psuc_one_skill(double rho);

// P_suc for a learner that handles up to D novel skills per text:
// sum_{t=0}^{D-1} e^-rho rho^t / t!.
double psuc_d_skill(int capacity, double rho);

// Two-class near-far learner success probabilities.
std::pair<double, double> psuc_near_far(double rho1, double rho2);

// Multilinear interpolation table over a rectangular rho grid, clamped
// outside the grid. Density evolution only queries bounded loads, so the
// clamp is benign as long as the grid covers [0, c].
struct ProfileTable {
  std::vector<std::vector<double>> axes;  // per-class sorted rho values
  std::vector<double> values;             // row-major, K outputs per cell
  std::size_t num_classes() const { return axes.size(); }
};

class SuccessProfile {
 public:
  enum class Kind { OneSkill, DSkill, NearFar, Tabulated };

  static SuccessProfile one_skill(int num_classes = 1);
  // Class-blind capacity learner: succeeds when the total novel load is at
  // most `capacity`; reduces to the scalar formula for one class.
  static SuccessProfile d_skill(int capacity, int num_classes = 1);
  static SuccessProfile near_far();
  static SuccessProfile tabulated(ProfileTable table);

  // CSV rows: rho_1,...,rho_K,psuc_1,...,psuc_K forming a complete
  // rectangular grid (any row order). Header row optional.
  static SuccessProfile from_csv(std::istream& in, int num_classes);

  int num_classes() const { return num_classes_; }
  Kind kind() const { return kind_; }
  int capacity() const { return capacity_; }

  void eval(std::span<const double> rho, std::span<double> out) const;
  double eval1(double rho) const;  // single-class convenience

 private:
  SuccessProfile(Kind kind, int num_classes) : kind_(kind), num_classes_(num_classes) {}
  Kind kind_;
  int num_classes_;
  int capacity_ = 1;
  ProfileTable table_;
};

class PsiFunction {
 public:
  enum class Kind { DSkill, NearFar, Custom };

  // psi(n) = n when sum_k n_k <= capacity, else 0.
  static PsiFunction d_skill(int capacity, int num_classes = 1);
  // psi(n1,n2) = (n1,n2) when (n1,n2) <= (1,1), else (0,0).
  static PsiFunction near_far();
  // Arbitrary deterministic map; must satisfy psi_k(n) <= n_k.
  static PsiFunction custom(
      int num_classes,
      std::function<void(std::span<const std::uint32_t>,
                         std::span<std::uint32_t>)> fn);

  int num_classes() const { return num_classes_; }
  Kind kind() const { return kind_; }
  int capacity() const { return capacity_; }

  void eval(std::span<const std::uint32_t> n, std::span<std::uint32_t> out) const;

  // The closed-form profile of the induced Poisson learner, for the built-in
  // kinds (throws for Custom).
  SuccessProfile induced_profile() const;

 private:
  PsiFunction(Kind kind, int num_classes) : kind_(kind), num_classes_(num_classes) {}
  Kind kind_;
  int num_classes_;
  int capacity_ = 1;
  std::function<void(std::span<const std::uint32_t>, std::span<std::uint32_t>)> fn_;
};

struct InducedEstimate {
  std::vector<double> success;  // estimate of Theta_k / rho_k per class
  std::vector<double> stderr_;  // Monte Carlo standard errors
  std::uint64_t num_samples = 0;
};

// Monte Carlo estimate of the induced Poisson learner's success
// probabilities at offered load rho: Theta_k = E[psi_k(N)], N_k ~
// Poisson(rho_k) independent. Classes with rho_k = 0 use the one-tagged-skill
// convention (N_k forced to 1), which is the rho_k -> 0 limit of
// Theta_k/rho_k. Parallel over sample blocks; reduction order is fixed.
InducedEstimate induce_poisson_from_psi(const PsiFunction& psi,
                                        std::span<const double> rho,
                                        std::uint64_t num_samples,
                                        std::uint64_t seed = 1,
                                        int num_threads = 0);

}  // namespace semlearn
