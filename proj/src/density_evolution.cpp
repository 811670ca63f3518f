#include "semlearn/density_evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "semlearn/graph_model.hpp"

namespace semlearn {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

DEResult de_solve_single(double c, double R, const SuccessProfile& profile,
                         const DESettings& settings) {
  require(std::isfinite(c) && c >= 0.0, "c must be finite and >= 0");
  require(std::isfinite(R) && R >= 0.0, "R must be finite and >= 0");
  require(profile.num_classes() == 1, "single-class solve needs a K=1 profile");
  require(settings.max_iter >= 1, "max_iter must be >= 1");
  require(settings.tol > 0.0, "tol must be > 0");

  auto step = [&](double p) {
    return 1.0 - profile.eval1(c * std::exp(-c * R * (1.0 - p)));
  };

  DEResult res;
  double p = 1.0;
  for (int i = 0; i < settings.max_iter; ++i) {
    double next = step(p);
    res.iterations_used = i + 1;
    if (next > p + 1e-15) res.monotone = false;
    if (settings.record_trace)
      res.trace.push_back(
          {i + 1, {next}, {std::exp(-c * R * (1.0 - next))}});
    if (std::abs(next - p) < settings.tol) {
      p = next;
      res.converged = true;
      break;
    }
    p = next;
  }
  res.residual = std::abs(p - step(p));

  double q = std::exp(-c * R * (1.0 - p));
  double zeta = 1.0 - q;
  res.p = {p};
  res.q = {q};
  res.zeta = {zeta};
  res.epsilon = 1.0 - std::exp(-c * (1.0 - zeta));
  res.epsilon_by_text_class = {res.epsilon};
  res.epsilon_by_skill_class = {res.epsilon};
  return res;
}

MultiClassMeans MultiClassMeans::from_config(const MultiClassConfig& cfg) {
  MultiClassMeans m;
  m.ratio_R = cfg.ratio_R;
  m.alpha = cfg.text_class_fractions;
  m.beta = cfg.skill_class_fractions;
  m.c = cfg.mean_matrix;
  m.validate();
  return m;
}

void MultiClassMeans::validate() const {
  require(std::isfinite(ratio_R) && ratio_R >= 0.0, "R must be >= 0");
  require(!alpha.empty() && !beta.empty(), "class fraction vectors are empty");
  double sa = 0.0, sb = 0.0;
  for (double a : alpha) {
    require(std::isfinite(a) && a >= 0.0, "alpha entries must be >= 0");
    sa += a;
  }
  for (double b : beta) {
    require(std::isfinite(b) && b >= 0.0, "beta entries must be >= 0");
    sb += b;
  }
  require(std::abs(sa - 1.0) <= 1e-12, "alpha must sum to 1");
  require(std::abs(sb - 1.0) <= 1e-12, "beta must sum to 1");
  require(c.size() == beta.size(), "mean matrix must have K rows");
  for (const auto& row : c) {
    require(row.size() == alpha.size(), "mean matrix must have J columns");
    for (double v : row)
      require(std::isfinite(v) && v >= 0.0, "mean matrix entries must be >= 0");
  }
}

DEResult de_solve_multi(const MultiClassMeans& means,
                        const SuccessProfile& profile,
                        const DESettings& settings) {
  means.validate();
  const std::size_t K = means.num_skill_classes();
  const std::size_t J = means.num_text_classes();
  require(profile.num_classes() == static_cast<int>(K),
          "profile class count must match the skill class count");
  require(settings.max_iter >= 1, "max_iter must be >= 1");
  require(settings.tol > 0.0, "tol must be > 0");

  // d_k = sum_j c_{k,j} alpha_j R / beta_k; r_{k,j} = edge-class split.
  std::vector<double> d(K, 0.0);
  std::vector<std::vector<double>> r(K, std::vector<double>(J, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    double weighted = 0.0;
    for (std::size_t j = 0; j < J; ++j) weighted += means.c[k][j] * means.alpha[j];
    if (means.beta[k] > 0.0) d[k] = weighted * means.ratio_R / means.beta[k];
    require(std::isfinite(d[k]), "d_k must be finite");
    for (std::size_t j = 0; j < J; ++j) {
      // With no class-k edges at all the split is immaterial; alpha keeps
      // the weights normalized so p_k = 1 - P_suc,k(0) as it should.
      r[k][j] = weighted > 0.0 ? means.c[k][j] * means.alpha[j] / weighted
                               : means.alpha[j];
    }
  }

  DEResult res;
  std::vector<double> p(K, 1.0), q(K, 1.0), pn(K), load(K), suc(K);
  auto iterate = [&](const std::vector<double>& qin, std::vector<double>& pout) {
    std::fill(pout.begin(), pout.end(), 1.0);
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t k = 0; k < K; ++k) load[k] = qin[k] * means.c[k][j];
      profile.eval(load, suc);
      for (std::size_t k = 0; k < K; ++k) pout[k] -= r[k][j] * suc[k];
    }
  };

  for (int i = 0; i < settings.max_iter; ++i) {
    iterate(q, pn);
    res.iterations_used = i + 1;
    double delta = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (pn[k] > p[k] + 1e-15) res.monotone = false;
      delta = std::max(delta, std::abs(pn[k] - p[k]));
      p[k] = pn[k];
      q[k] = std::exp(-d[k] * (1.0 - p[k]));
    }
    if (settings.record_trace) res.trace.push_back({i + 1, p, q});
    if (delta < settings.tol) {
      res.converged = true;
      break;
    }
  }
  iterate(q, pn);
  double resid = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    resid = std::max(resid, std::abs(pn[k] - p[k]));
  res.residual = resid;

  res.p = p;
  res.q = q;
  res.zeta.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    res.zeta[k] = 1.0 - std::exp(-d[k] * (1.0 - p[k]));

  res.epsilon_by_text_class.assign(J, 0.0);
  res.epsilon = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    double understood = 1.0;
    for (std::size_t k = 0; k < K; ++k)
      understood *= std::exp(-means.c[k][j] * (1.0 - res.zeta[k]));
    res.epsilon_by_text_class[j] = 1.0 - understood;
    res.epsilon += means.alpha[j] * res.epsilon_by_text_class[j];
  }
  res.epsilon_by_skill_class.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double understood_k = 0.0;
    for (std::size_t j = 0; j < J; ++j)
      understood_k +=
          means.alpha[j] * std::exp(-means.c[k][j] * (1.0 - res.zeta[k]));
    res.epsilon_by_skill_class[k] = 1.0 - understood_k;
  }
  return res;
}

std::optional<double> find_threshold(double c, const SuccessProfile& profile,
                                     double epsilon_drop, double R_lo,
                                     double R_hi, int grid,
                                     const DESettings& settings) {
  require(grid >= 3, "grid must be >= 3");
  require(R_lo < R_hi, "R range must be ordered");
  require(epsilon_drop > 0.0, "epsilon_drop must be > 0");

  auto eps = [&](double R) {
    return de_solve_single(c, R, profile, settings).epsilon;
  };
  const double level = eps(R_lo) - epsilon_drop;
  if (level < 0.0) return std::nullopt;

  double prev = R_lo;
  for (int i = 1; i < grid; ++i) {
    double R = R_lo + (R_hi - R_lo) * i / (grid - 1);
    if (eps(R) < level) {
      double lo = prev, hi = R;
      while (hi - lo > 1e-3) {
        double mid = 0.5 * (lo + hi);
        (eps(mid) < level ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = R;
  }
  return std::nullopt;
}

NearFarResult de_solve_near_far_coupled(double c1, double c2, double beta,
                                        double R, const DESettings& settings) {
  require(std::isfinite(c1) && c1 >= 0 && std::isfinite(c2) && c2 >= 0,
          "c must be >= 0");
  require(beta > 0.0 && beta < 1.0, "beta must be in (0,1)");
  require(std::isfinite(R) && R >= 0.0, "R must be >= 0");

  const double d1 = (c1 + c2) * R / beta;
  const double d2 = (c1 + c2) * R / (1.0 - beta);

  NearFarResult res;
  double p1 = 1.0, p2 = 1.0;
  for (int i = 0; i < settings.max_iter; ++i) {
    double rho1 = c1 * std::exp(-d1 * (1.0 - p1));
    double rho2 = c2 * std::exp(-d2 * (1.0 - p2));
    auto [s1, s2] = psuc_near_far(rho1, rho2);
    double n1 = 1.0 - s1, n2 = 1.0 - s2;
    res.iterations_used = i + 1;
    if (n1 > p1 + 1e-15 || n2 > p2 + 1e-15) res.monotone = false;
    bool done = std::abs(n1 - p1) < settings.tol &&
                std::abs(n2 - p2) < settings.tol;
    p1 = n1;
    p2 = n2;
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.p1 = p1;
  res.p2 = p2;
  res.zeta1 = 1.0 - std::exp(-d1 * (1.0 - p1));
  res.zeta2 = 1.0 - std::exp(-d2 * (1.0 - p2));
  res.epsilon1 = 1.0 - std::exp(-c1 * (1.0 - res.zeta1));
  res.epsilon2 = 1.0 - std::exp(-c2 * (1.0 - res.zeta2));
  return res;
}

}  // namespace semlearn
