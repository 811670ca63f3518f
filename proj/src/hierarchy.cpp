#include "semlearn/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semlearn/parallel.hpp"
#include "semlearn/rng.hpp"

namespace semlearn {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
constexpr std::uint64_t kPrereqSalt = 0x55;
constexpr std::uint64_t kDomainTestSalt = 0x66;

MonteCarloStat summarize(const std::vector<double>& vals) {
  MonteCarloStat s;
  s.trials = static_cast<int>(vals.size());
  for (double v : vals) s.mean += v;
  s.mean /= s.trials;
  double ss = 0.0;
  for (double v : vals) ss += (v - s.mean) * (v - s.mean);
  if (s.trials > 1) s.stderr_ = std::sqrt(ss / (s.trials - 1) / s.trials);
  return s;
}
}  // namespace

std::pair<double, double> learnable_probs(double zeta,
                                          const HierarchyConfig& cfg) {
  require(std::isfinite(zeta) && zeta >= 0.0 && zeta <= 1.0,
          "zeta must be a probability");
  cfg.prereq.validate();
  double lam = cfg.prereq.eval(zeta);
  double text = std::exp(-cfg.mean_domain_skills_per_text * (1.0 - lam));
  return {lam, text};
}

HierarchyResult fine_tune_solve(const HierarchyConfig& cfg,
                                const SuccessProfile& profile,
                                const DESettings& settings) {
  cfg.validate();
  HierarchyResult out;

  DEResult basic = de_solve_single(cfg.basic.mean_skills_per_text,
                                   cfg.basic.ratio_R, profile, settings);
  out.zeta_basic = basic.zeta1();
  auto [lam, ltp] = learnable_probs(out.zeta_basic, cfg);
  out.lambda_f_at_zeta = lam;
  out.learnable_text_prob = ltp;

  const double cf = cfg.mean_domain_skills_per_text;
  const double c_eff = cf * lam;                 // |S_f|-side degree shrink
  const double cR_eff = cf * cfg.ratio_Rf * ltp; // c_eff * R_eff

  if (c_eff <= 0.0) {
    // no learnable skills (or c_f = 0): fine-tuning is a no-op
    out.p_f = 0.0;
    out.zeta_f = 1.0 - std::exp(-cR_eff);
    out.converged = true;
  } else {
    DEResult ft =
        de_solve_single(c_eff, cR_eff / c_eff, profile, settings);
    out.p_f = ft.p1();
    out.zeta_f = ft.zeta1();
    out.iterations_used = ft.iterations_used;
    out.converged = ft.converged;
  }

  out.case_i = 1.0 - ltp;
  out.case_ii = (1.0 - std::exp(-cf * lam * (1.0 - out.zeta_f))) * ltp;
  out.epsilon_f = out.case_i + out.case_ii;
  return out;
}

HierarchySimResult simulate_hierarchy(const HierarchyConfig& cfg,
                                      const PsiFunction& psi, int trials,
                                      std::uint32_t test_texts,
                                      int num_threads) {
  cfg.validate();
  require(trials >= 1, "trials must be >= 1");
  require(psi.num_classes() == 1, "hierarchy simulation uses K=1 learners");

  std::vector<double> zf(trials), ef(trials), lsf(trials), ltf(trials);
  parallel_for(trials, num_threads, [&](std::size_t i) {
    HierarchyConfig c = cfg;
    c.basic.seed = cfg.basic.seed + i;
    c.seed = cfg.seed + 0x10000 * i;

    // stage 1: basic model
    BipartiteGraph basic = sample_single_class(c.basic);
    auto basic_out = run_scns(basic, psi);

    // prerequisite draw per domain skill: count from the pgf, basic skills
    // uniform with replacement, duplicates collapse
    const std::uint32_t Sf = c.num_domain_skills;
    std::vector<std::uint8_t> learnable(Sf, 0);
    std::uint64_t learnable_count = 0;
    for (std::uint32_t s = 0; s < Sf; ++s) {
      Rng rng = Rng::stream(c.seed, s, kPrereqSalt);
      std::uint32_t need = c.prereq.sample(rng);
      bool ok = true;
      for (std::uint32_t e = 0; e < need && ok; ++e)
        ok = basic_out.learned[rng.next_below(c.basic.num_skills)];
      learnable[s] = ok ? 1 : 0;
      learnable_count += learnable[s];
    }
    lsf[i] = static_cast<double>(learnable_count) / Sf;

    // stage 2: domain graph, keep only learnable texts
    SingleClassConfig dom;
    dom.num_skills = Sf;
    dom.ratio_R = c.ratio_Rf;
    dom.mean_skills_per_text = c.mean_domain_skills_per_text;
    dom.seed = c.seed;
    BipartiteGraph domain = sample_single_class(dom);

    std::vector<std::vector<std::uint32_t>> kept;
    kept.reserve(domain.num_texts);
    for (std::uint32_t t = 0; t < domain.num_texts; ++t) {
      bool text_learnable = true;
      for (auto s : domain.skills_of(t))
        text_learnable = text_learnable && learnable[s];
      if (!text_learnable) continue;
      auto sk = domain.skills_of(t);
      auto mu = domain.skill_mult_of(t);
      std::vector<std::uint32_t> edges;
      for (std::size_t e = 0; e < sk.size(); ++e)
        for (std::uint32_t m = 0; m < mu[e]; ++m) edges.push_back(sk[e]);
      kept.push_back(std::move(edges));
    }
    ltf[i] = domain.num_texts == 0
                 ? 1.0
                 : static_cast<double>(kept.size()) / domain.num_texts;
    BipartiteGraph learnable_graph =
        build_graph(Sf, std::move(kept), {}, {}, 1, 1);
    auto ft_out = run_scns(learnable_graph, psi);

    std::uint64_t learned_learnable = 0;
    for (std::uint32_t s = 0; s < Sf; ++s)
      if (learnable[s] && ft_out.learned[s]) ++learned_learnable;
    zf[i] = learnable_count == 0
                ? 0.0
                : static_cast<double>(learned_learnable) / learnable_count;

    // fresh domain test texts over all |S_f| skills
    std::uint64_t misses = 0;
    for (std::uint32_t j = 0; j < test_texts; ++j) {
      Rng rng = Rng::stream(c.seed, j, kDomainTestSalt);
      std::uint32_t deg = rng.poisson(c.mean_domain_skills_per_text);
      bool understood = true;
      for (std::uint32_t e = 0; e < deg && understood; ++e) {
        std::uint32_t s = rng.next_below(Sf);
        understood = learnable[s] && ft_out.learned[s];
      }
      if (!understood) ++misses;
    }
    ef[i] = static_cast<double>(misses) / test_texts;
  });

  HierarchySimResult out;
  out.zeta_f = summarize(zf);
  out.epsilon_f = summarize(ef);
  out.learnable_skill_fraction = summarize(lsf);
  out.learnable_text_fraction = summarize(ltf);
  return out;
}

}  // namespace semlearn
