#include "semlearn/peeling_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "semlearn/parallel.hpp"
#include "semlearn/rng.hpp"

namespace semlearn {

namespace {

// Shared state of one peeling run.
struct PeelState {
  const BipartiteGraph& g;
  const PsiFunction& psi;
  const ScnsOptions& opt;
  std::size_t K;
  std::vector<std::uint32_t> novel;   // per text, K counts
  std::vector<std::uint8_t> learned;  // per skill
  std::uint64_t learned_count = 0;

  PeelState(const BipartiteGraph& graph, const PsiFunction& p,
            const ScnsOptions& o)
      : g(graph), psi(p), opt(o), K(static_cast<std::size_t>(p.num_classes())) {
    if (g.num_skill_classes != K)
      throw std::invalid_argument("psi class count does not match the graph");
    novel.assign(static_cast<std::size_t>(g.num_texts) * K, 0);
    learned.assign(g.num_skills, 0);
    for (std::uint32_t t = 0; t < g.num_texts; ++t) {
      auto sk = g.skills_of(t);
      auto mu = g.skill_mult_of(t);
      for (std::size_t i = 0; i < sk.size(); ++i)
        novel[t * K + g.skill_class[sk[i]]] += opt.dedup ? 1u : mu[i];
    }
  }

  // Evaluate psi for text t and append designated still-novel skills.
  // Returns true if anything was designated.
  bool designate(std::uint32_t t, std::vector<std::uint32_t>& out,
                 std::vector<std::uint32_t>& count_buf,
                 std::vector<std::uint32_t>& psi_buf, int round) {
    const std::uint32_t* n = &novel[static_cast<std::size_t>(t) * K];
    bool any = false;
    for (std::size_t k = 0; k < K; ++k) any = any || n[k] > 0;
    if (!any) return false;
    count_buf.assign(n, n + K);
    psi.eval(count_buf, psi_buf);
    bool designated = false;
    for (std::size_t k = 0; k < K; ++k) {
      if (psi_buf[k] == 0) continue;
      designated = true;
      if (psi_buf[k] >= count_buf[k]) {
        for (auto s : g.skills_of(t))
          if (!learned[s] && g.skill_class[s] == k) out.push_back(s);
      } else {
        // strict subset: uniform reservoir pick of psi_k(n) novel skills
        Rng rng = Rng::stream(opt.subset_seed,
                              (static_cast<std::uint64_t>(round) << 32) | t,
                              0x7a + k);
        std::vector<std::uint32_t> pool;
        for (auto s : g.skills_of(t))
          if (!learned[s] && g.skill_class[s] == k) pool.push_back(s);
        // counts may include multiplicities, the pool never does
        std::uint32_t picks = std::min<std::uint32_t>(
            psi_buf[k], static_cast<std::uint32_t>(pool.size()));
        for (std::uint32_t pick = 0; pick < picks; ++pick) {
          std::uint32_t j =
              pick + rng.next_below(static_cast<std::uint32_t>(pool.size()) - pick);
          std::swap(pool[pick], pool[j]);
          out.push_back(pool[pick]);
        }
      }
    }
    return designated;
  }

  // Mark s learned and decrement the novel counts of its texts; collects
  // affected texts when a worklist is supplied.
  void learn(std::uint32_t s, std::vector<std::uint32_t>* touched) {
    learned[s] = 1;
    ++learned_count;
    const std::uint32_t k = g.skill_class[s];
    auto tx = g.texts_of(s);
    auto span_start = g.skill_offsets[s];
    for (std::size_t i = 0; i < tx.size(); ++i) {
      std::uint32_t dec = opt.dedup ? 1u : g.skill_mult[span_start + i];
      novel[static_cast<std::size_t>(tx[i]) * K + k] -= dec;
      if (touched) touched->push_back(tx[i]);
    }
  }

  ScnsOutcome finish(int rounds, std::vector<ScnsRound> trace) const {
    ScnsOutcome out;
    out.learned = learned;
    out.rounds = rounds;
    out.learned_fraction =
        g.num_skills == 0
            ? 0.0
            : static_cast<double>(learned_count) / g.num_skills;
    out.learned_fraction_by_class.assign(g.num_skill_classes, 0.0);
    std::vector<std::uint64_t> class_size(g.num_skill_classes, 0);
    for (std::uint32_t s = 0; s < g.num_skills; ++s) {
      ++class_size[g.skill_class[s]];
      if (learned[s]) out.learned_fraction_by_class[g.skill_class[s]] += 1.0;
    }
    for (std::uint32_t k = 0; k < g.num_skill_classes; ++k)
      if (class_size[k] > 0) out.learned_fraction_by_class[k] /= class_size[k];
    out.trace = std::move(trace);
    return out;
  }
};

}  // namespace

ScnsOutcome run_scns(const BipartiteGraph& graph, const PsiFunction& psi,
                     const ScnsOptions& options) {
  PeelState st(graph, psi, options);
  std::vector<ScnsRound> trace;

  std::vector<std::uint32_t> candidates(graph.num_texts);
  std::iota(candidates.begin(), candidates.end(), 0u);
  std::vector<std::uint8_t> queued(graph.num_texts, 0);
  std::vector<std::uint32_t> designated, touched, cbuf, pbuf;
  cbuf.resize(st.K);
  pbuf.resize(st.K);

  int rounds = 0;
  while (true) {
    ++rounds;
    designated.clear();
    for (auto t : candidates) {
      queued[t] = 0;
      st.designate(t, designated, cbuf, pbuf, rounds);
    }
    std::sort(designated.begin(), designated.end());
    designated.erase(std::unique(designated.begin(), designated.end()),
                     designated.end());
    if (options.record_trace)
      trace.push_back({rounds, st.learned_count + designated.size(),
                       designated.size()});
    if (designated.empty()) break;

    touched.clear();
    for (auto s : designated) st.learn(s, &touched);
    candidates.clear();
    for (auto t : touched) {
      if (!queued[t]) {
        queued[t] = 1;
        candidates.push_back(t);
      }
    }
  }
  return st.finish(rounds, std::move(trace));
}

ScnsOutcome run_scns_sequential(const BipartiteGraph& graph,
                                const PsiFunction& psi,
                                std::span<const std::uint32_t> order,
                                const ScnsOptions& options) {
  PeelState st(graph, psi, options);
  std::vector<std::uint32_t> designated, cbuf, pbuf;
  cbuf.resize(st.K);
  pbuf.resize(st.K);
  int sweeps = 0;
  bool progress = true;
  while (progress) {
    ++sweeps;
    progress = false;
    for (auto t : order) {
      if (t >= graph.num_texts)
        throw std::invalid_argument("text order index out of range");
      designated.clear();
      st.designate(t, designated, cbuf, pbuf, sweeps);
      for (auto s : designated) {
        if (!st.learned[s]) {
          st.learn(s, nullptr);
          progress = true;
        }
      }
    }
  }
  return st.finish(sweeps, {});
}

void write_trace_csv(const ScnsOutcome& outcome, std::ostream& out) {
  out << "round,learned_count,newly_learned\n";
  for (const auto& r : outcome.trace)
    out << r.round << ',' << r.learned_total << ',' << r.newly_learned << "\n";
}

MonteCarloStat empirical_learned_fraction(const SingleClassConfig& cfg,
                                          const PsiFunction& psi, int trials,
                                          const ScnsOptions& options,
                                          int num_threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<double> vals(trials);
  parallel_for(trials, num_threads, [&](std::size_t i) {
    SingleClassConfig c = cfg;
    c.seed = cfg.seed + i;
    vals[i] = run_scns(sample_single_class(c), psi, options).learned_fraction;
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

MonteCarloStat empirical_testing_error(const SingleClassConfig& cfg,
                                       const PsiFunction& psi, int trials,
                                       std::uint32_t test_texts,
                                       const ScnsOptions& options,
                                       int num_threads) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (test_texts < 1) throw std::invalid_argument("test_texts must be >= 1");
  std::vector<double> vals(trials);
  parallel_for(trials, num_threads, [&](std::size_t i) {
    SingleClassConfig c = cfg;
    c.seed = cfg.seed + i;
    auto outcome = run_scns(sample_single_class(c), psi, options);
    std::uint64_t misses = 0;
    for (std::uint32_t j = 0; j < test_texts; ++j) {
      auto text = sample_test_text(c.num_skills, c.mean_skills_per_text,
                                   c.seed, j);
      bool understood = true;
      for (auto s : text) understood = understood && outcome.learned[s];
      if (!understood) ++misses;
    }
    vals[i] = static_cast<double>(misses) / test_texts;
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

}  // namespace semlearn
