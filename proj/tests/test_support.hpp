// Test-only oracles and statistics helpers. Everything here is deliberately
// independent of the library's implementation paths: the closure oracle
// recomputes novel counts from scratch each round, the DE oracle solves the
// fixed point by bisection instead of iteration.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "semlearn/graph_model.hpp"
#include "semlearn/learners.hpp"

namespace semlearn::testing {

// Regularized upper incomplete gamma Q(a, x), series + continued fraction.
inline double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  auto gammln = [](double v) { return std::lgamma(v); };
  if (x < a + 1.0) {
    // P(a,x) by series, return 1 - P
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - gammln(a));
    return std::max(0.0, 1.0 - p);
  }
  // Q(a,x) by Lentz continued fraction
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gammln(a)) * h;
}

// Chi-square goodness-of-fit p-value of integer samples against
// Poisson(lambda). Bins with expected count < 5 are merged into the tail.
inline double chi_square_poisson_pvalue(const std::vector<std::uint64_t>& hist,
                                        double lambda, std::uint64_t n) {
  std::vector<double> expected;
  double pk = std::exp(-lambda);
  double cum = 0.0;
  std::size_t kmax = hist.size();
  for (std::size_t k = 0; k + 1 < kmax; ++k) {
    expected.push_back(pk * n);
    cum += pk;
    pk *= lambda / (k + 1);
  }
  expected.push_back(std::max(0.0, 1.0 - cum) * n);  // tail bucket

  // merge low-expectation bins rightward into the tail
  std::vector<double> e;
  std::vector<double> o;
  double e_acc = 0.0, o_acc = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    e_acc += expected[k];
    o_acc += static_cast<double>(k < hist.size() ? hist[k] : 0);
    if (e_acc >= 5.0) {
      e.push_back(e_acc);
      o.push_back(o_acc);
      e_acc = o_acc = 0.0;
    }
  }
  if (e_acc > 0.0 && !e.empty()) {
    e.back() += e_acc;
    o.back() += o_acc;
  }
  if (e.size() < 2) return 1.0;
  double x2 = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    x2 += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  double df = static_cast<double>(e.size() - 1);
  return regularized_gamma_q(df / 2.0, x2 / 2.0);
}

// Fixed point of p = 1 - exp(-c exp(-cR(1-p))) reached from p = 1: the
// largest root of g(p) = p - f(p), found by scanning down from 1 for a sign
// change and bisecting. Only valid for the 1-skill learner.
inline double de_one_skill_bisection_oracle(double c, double R) {
  auto g = [&](double p) {
    return p - 1.0 + std::exp(-c * std::exp(-c * R * (1.0 - p)));
  };
  double hi = 1.0;
  double lo = 1.0;
  const double step = 1e-3;
  while (lo > 0.0 && g(lo) > 0.0) {
    hi = lo;
    lo -= step;
  }
  if (lo <= 0.0 && g(0.0) > 0.0) return 0.0;
  lo = std::max(lo, 0.0);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

// Subset-closure oracle for SCNS: iterate "learnable given the current
// learned set" to a fixed point, recomputing everything from scratch each
// round. All-or-nothing psi only (which covers the built-ins).
inline std::vector<std::uint8_t> scns_closure_oracle(const BipartiteGraph& g,
                                                     const PsiFunction& psi,
                                                     bool dedup = true) {
  const auto K = static_cast<std::size_t>(psi.num_classes());
  std::vector<std::uint8_t> learned(g.num_skills, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::uint32_t> designated;
    for (std::uint32_t t = 0; t < g.num_texts; ++t) {
      std::vector<std::uint32_t> counts(K, 0);
      auto sk = g.skills_of(t);
      auto mu = g.skill_mult_of(t);
      for (std::size_t i = 0; i < sk.size(); ++i)
        if (!learned[sk[i]])
          counts[g.skill_class[sk[i]]] += dedup ? 1u : mu[i];
      std::vector<std::uint32_t> out(K);
      psi.eval(counts, out);
      for (std::size_t k = 0; k < K; ++k) {
        if (out[k] == 0) continue;
        if (out[k] != counts[k])
          throw std::logic_error("closure oracle needs all-or-nothing psi");
        for (auto s : sk)
          if (!learned[s] && g.skill_class[s] == k) designated.push_back(s);
      }
    }
    for (auto s : designated) {
      if (!learned[s]) {
        learned[s] = 1;
        changed = true;
      }
    }
  }
  return learned;
}

// Component sizes by BFS over an explicit adjacency list.
inline std::vector<std::uint32_t> bfs_component_sizes(
    std::uint32_t n,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::uint32_t> sizes;
  std::vector<std::uint8_t> seen(n, 0);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::uint32_t size = 0;
    std::queue<std::uint32_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      ++size;
      for (auto v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
      }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

// Small random bipartite graph for oracle comparisons.
inline BipartiteGraph random_small_graph(std::mt19937& rng,
                                         std::uint32_t max_skills,
                                         std::uint32_t max_texts,
                                         std::uint32_t num_skill_classes = 1) {
  std::uniform_int_distribution<std::uint32_t> sdist(1, max_skills);
  std::uniform_int_distribution<std::uint32_t> tdist(0, max_texts);
  const std::uint32_t S = sdist(rng), T = tdist(rng);
  std::uniform_int_distribution<std::uint32_t> deg(0, 4);
  std::vector<std::vector<std::uint32_t>> edges(T);
  for (auto& e : edges) {
    e.resize(deg(rng));
    for (auto& s : e)
      s = std::uniform_int_distribution<std::uint32_t>(0, S - 1)(rng);
  }
  std::vector<std::uint32_t> sclass(S, 0);
  if (num_skill_classes > 1)
    for (auto& k : sclass)
      k = std::uniform_int_distribution<std::uint32_t>(
          0, num_skill_classes - 1)(rng);
  return build_graph(S, std::move(edges), std::move(sclass), {},
                     num_skill_classes, 1);
}

}  // namespace semlearn::testing
