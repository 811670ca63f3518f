#include "semlearn/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semlearn/density_evolution.hpp"
#include "semlearn/parallel.hpp"
#include "semlearn/rng.hpp"

namespace semlearn {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
constexpr std::uint64_t kIidLearnSalt = 0x44;
}  // namespace

UnionFind::UnionFind(std::uint32_t n) : parent_(n), size_(n, 1) {
  for (std::uint32_t i = 0; i < n; ++i) parent_[i] = i;
  largest_ = n > 0 ? 1 : 0;
}

std::uint32_t UnionFind::find(std::uint32_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void UnionFind::unite(std::uint32_t a, std::uint32_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  largest_ = std::max(largest_, size_[a]);
}

std::uint32_t UnionFind::component_size(std::uint32_t x) {
  return size_[find(x)];
}

AssociationGraph build_association_graph(
    const BipartiteGraph& graph, std::span<const std::uint8_t> learned) {
  require(learned.size() == graph.num_skills, "learned flag size mismatch");
  AssociationGraph ag;
  std::vector<std::uint32_t> dense(graph.num_skills, 0);
  for (std::uint32_t s = 0; s < graph.num_skills; ++s) {
    if (learned[s]) {
      dense[s] = static_cast<std::uint32_t>(ag.nodes.size());
      ag.nodes.push_back(s);
    }
  }
  // per-text cliques over learned members, deduplicated via sorted pairs
  std::vector<std::uint32_t> members;
  for (std::uint32_t t = 0; t < graph.num_texts; ++t) {
    members.clear();
    for (auto s : graph.skills_of(t))
      if (learned[s]) members.push_back(s);
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        ag.edges.emplace_back(members[i], members[j]);
  }
  std::sort(ag.edges.begin(), ag.edges.end());
  ag.edges.erase(std::unique(ag.edges.begin(), ag.edges.end()),
                 ag.edges.end());

  UnionFind uf(static_cast<std::uint32_t>(ag.nodes.size()));
  for (auto& [a, b] : ag.edges) uf.unite(dense[a], dense[b]);
  ag.component.assign(ag.nodes.size(), 0);
  std::vector<std::uint32_t> root_to_id(ag.nodes.size(),
                                        std::uint32_t(-1));
  for (std::uint32_t i = 0; i < ag.nodes.size(); ++i) {
    std::uint32_t r = uf.find(i);
    if (root_to_id[r] == std::uint32_t(-1)) root_to_id[r] = ag.num_components++;
    ag.component[i] = root_to_id[r];
  }
  ag.largest_component_size = uf.largest();
  return ag;
}

double largest_component_fraction(const BipartiteGraph& graph,
                                  std::span<const std::uint8_t> learned) {
  require(learned.size() == graph.num_skills, "learned flag size mismatch");
  if (graph.num_skills == 0) return 0.0;
  UnionFind uf(graph.num_skills);
  bool any = false;
  std::uint32_t first = 0;
  for (std::uint32_t t = 0; t < graph.num_texts; ++t) {
    bool have = false;
    for (auto s : graph.skills_of(t)) {
      if (!learned[s]) continue;
      if (!have) {
        first = s;
        have = true;
        any = true;
      } else {
        uf.unite(first, s);
      }
    }
  }
  if (!any) return 0.0;
  return static_cast<double>(uf.largest()) / graph.num_skills;
}

MuResult mu_fixed_point(double c, double R, double zeta, int max_iter,
                        double tol) {
  require(std::isfinite(c) && c >= 0 && std::isfinite(R) && R >= 0,
          "c and R must be >= 0");
  require(zeta >= 0.0 && zeta <= 1.0, "zeta must be a probability");
  MuResult res;
  double mus = 0.0, mut = 0.0;
  for (int i = 0; i < max_iter; ++i) {
    double mus2 = std::exp(-c * (1.0 - mut));
    double mut2 = (1.0 - zeta) + zeta * std::exp(-R * c * (1.0 - mus));
    res.iterations_used = i + 1;
    if (mus2 < mus - 1e-15 || mut2 < mut - 1e-15) res.monotone = false;
    bool done = std::abs(mus2 - mus) < tol && std::abs(mut2 - mut) < tol;
    mus = mus2;
    mut = mut2;
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.mu_s = mus;
  res.mu_t = mut;
  return res;
}

PercolationResult p_giant_theory(double c, double R,
                                 const SuccessProfile& profile,
                                 const DESettings& settings) {
  PercolationResult out;
  DEResult de = de_solve_single(c, R, profile, settings);
  out.zeta = de.zeta1();
  MuResult mu = mu_fixed_point(c, R, out.zeta);
  out.mu_s = mu.mu_s;
  out.mu_t = mu.mu_t;
  out.iterations_used = mu.iterations_used;
  out.p_G = out.zeta * (1.0 - std::exp(-R * c * (1.0 - mu.mu_s)));
  out.condition_value = c * c * R * out.zeta;
  out.giant_exists = out.condition_value > 1.0;
  return out;
}

MonteCarloStat giant_component_sim(const SingleClassConfig& cfg,
                                   const PsiFunction& psi,
                                   const SuccessProfile& profile, int trials,
                                   GiantSimMode mode, int num_threads) {
  require(trials >= 1, "trials must be >= 1");
  double zeta = 0.0;
  if (mode == GiantSimMode::IidZeta) {
    zeta = de_solve_single(cfg.mean_skills_per_text, cfg.ratio_R, profile)
               .zeta1();
  }
  std::vector<double> vals(trials);
  parallel_for(trials, num_threads, [&](std::size_t i) {
    SingleClassConfig c = cfg;
    c.seed = cfg.seed + i;
    BipartiteGraph g = sample_single_class(c);
    std::vector<std::uint8_t> learned;
    if (mode == GiantSimMode::ActualLearned) {
      learned = run_scns(g, psi).learned;
    } else {
      learned.assign(g.num_skills, 0);
      for (std::uint32_t s = 0; s < g.num_skills; ++s) {
        Rng rng = Rng::stream(c.seed, s, kIidLearnSalt);
        learned[s] = rng.bernoulli(zeta) ? 1 : 0;
      }
    }
    vals[i] = largest_component_fraction(g, learned);
  });
  MonteCarloStat stat;
  stat.trials = trials;
  for (double v : vals) stat.mean += v;
  stat.mean /= trials;
  double ss = 0.0;
  for (double v : vals) ss += (v - stat.mean) * (v - stat.mean);
  if (trials > 1) stat.stderr_ = std::sqrt(ss / (trials - 1) / trials);
  return stat;
}

RegionScan region_scan(double c_lo, double c_hi, double R_lo, double R_hi,
                       double step, const SuccessProfile& profile,
                       const DESettings& settings, int num_threads) {
  require(step > 0.0, "step must be > 0");
  require(c_lo <= c_hi && R_lo <= R_hi, "ranges must be ordered");
  const int nc = static_cast<int>(std::floor((c_hi - c_lo) / step + 1e-9)) + 1;
  const int nR = static_cast<int>(std::floor((R_hi - R_lo) / step + 1e-9)) + 1;
  require(nc >= 2 && nR >= 2, "grids must have at least 2 points");

  RegionScan scan;
  scan.cells.resize(static_cast<std::size_t>(nc) * nR);
  scan.threshold_by_c.resize(nc);

  auto condition = [&](double c, double R) {
    return c * c * R *
           de_solve_single(c, R, profile, settings).zeta1();
  };

  parallel_for(nc, num_threads, [&](std::size_t ci) {
    const double c = c_lo + step * static_cast<double>(ci);
    for (int ri = 0; ri < nR; ++ri) {
      const double R = R_lo + step * ri;
      double v = condition(c, R);
      scan.cells[ci * nR + ri] = {c, R, v, v > 1.0};
    }
    // smallest R with a giant component, refined by bisection; the
    // condition is nondecreasing in R (zeta is), so bisection is sound
    std::optional<double> threshold;
    if (condition(c, R_hi) > 1.0) {
      double lo = R_lo, hi = R_hi;
      if (condition(c, lo) > 1.0) {
        threshold = lo;
      } else {
        while (hi - lo > 1e-3) {
          double mid = 0.5 * (lo + hi);
          (condition(c, mid) > 1.0 ? hi : lo) = mid;
        }
        threshold = 0.5 * (lo + hi);
      }
    }
    scan.threshold_by_c[ci] = {c, threshold};
  });

  for (const auto& [c, thr] : scan.threshold_by_c) {
    if (thr && (!scan.min_R || *thr < *scan.min_R)) {
      scan.min_R = *thr;
      scan.min_c = c;
    }
  }
  return scan;
}

}  // namespace semlearn
