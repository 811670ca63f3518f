#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "semlearn/graph_model.hpp"
#include "semlearn/rng.hpp"
#include "test_support.hpp"

using namespace semlearn;

TEST_CASE("config validation") {
  SingleClassConfig cfg{0, 1.0, 3.0, 1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.num_skills = 10;
  cfg.ratio_R = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.ratio_R = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sample_single_class(cfg), std::invalid_argument);
  cfg.ratio_R = 1.5;
  cfg.mean_skills_per_text = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  MultiClassConfig m;
  m.num_skills = 10;
  m.ratio_R = 1.0;
  m.text_class_fractions = {0.5, 0.4};  // does not sum to 1
  m.skill_class_fractions = {1.0};
  m.mean_matrix = {{1.0, 1.0}};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.text_class_fractions = {0.5, 0.5};
  CHECK_NOTHROW(m.validate());
  m.mean_matrix = {{1.0}};  // wrong arity
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("R=0 gives isolated skills and no texts") {
  SingleClassConfig cfg{4, 0.0, 3.0, 9};
  auto g = sample_single_class(cfg);
  CHECK(g.num_texts == 0);
  CHECK(g.num_skills == 4);
  CHECK(g.num_edge_pairs() == 0);
  g.check_invariants();
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  SingleClassConfig cfg{10000, 2.0, 3.0, 1234};
  auto a = sample_single_class(cfg);
  auto b = sample_single_class(cfg);
  CHECK(a.text_skills == b.text_skills);
  CHECK(a.text_mult == b.text_mult);
  CHECK(a.text_offsets == b.text_offsets);
  cfg.seed = 1235;
  auto c = sample_single_class(cfg);
  CHECK(a.text_skills != c.text_skills);
}

TEST_CASE("single-class degree statistics match (A1)/(A2)") {
  // mean text degree ~ c and mean skill degree ~ cR, within 3 standard errors
  const double c = 3.0, R = 1.0;
  double text_sum = 0, skill_sum = 0;
  std::uint64_t texts = 0, skills = 0;
  std::vector<std::uint64_t> hist;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SingleClassConfig cfg{10000, R, c, seed};
    auto g = sample_single_class(cfg);
    g.check_invariants();
    for (auto d : g.text_degree) {
      text_sum += d;
      if (hist.size() <= d) hist.resize(d + 1, 0);
      ++hist[d];
    }
    for (auto d : g.skill_degree) skill_sum += d;
    texts += g.num_texts;
    skills += g.num_skills;
  }
  double text_mean = text_sum / texts;
  double skill_mean = skill_sum / skills;
  CHECK(text_mean == doctest::Approx(c).epsilon(0.01));
  double se = std::sqrt(c * R / static_cast<double>(skills));
  CHECK(std::abs(skill_mean - c * R) < 3 * se);
  // chi-square goodness of fit of the text degree histogram
  double pval = testing::chi_square_poisson_pvalue(hist, c, texts);
  CHECK(pval > 0.01);
}

TEST_CASE("multi-class sampling: class means and marginals") {
  MultiClassConfig cfg;
  cfg.num_skills = 20000;
  cfg.ratio_R = 1.0;
  cfg.text_class_fractions = {0.5, 0.5};
  cfg.skill_class_fractions = {0.25, 0.25, 0.25, 0.25};
  cfg.mean_matrix = {{2, 2}, {2, 2}, {2, 2}, {2, 2}};
  cfg.seed = 7;
  auto g = sample_multi_class(cfg);
  g.check_invariants();

  // class-(k,j) mean degree of a class-k skill ~ c alpha_j / beta_k R = 4
  std::vector<std::vector<double>> class_edges(4, std::vector<double>(2, 0.0));
  std::vector<std::uint64_t> skill_count(4, 0);
  for (std::uint32_t s = 0; s < g.num_skills; ++s)
    ++skill_count[g.skill_class[s]];
  for (std::uint32_t t = 0; t < g.num_texts; ++t) {
    auto sk = g.skills_of(t);
    auto mu = g.skill_mult_of(t);
    for (std::size_t i = 0; i < sk.size(); ++i)
      class_edges[g.skill_class[sk[i]]][g.text_class[t]] += mu[i];
  }
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t j = 0; j < 2; ++j) {
      double d = class_edges[k][j] / skill_count[k];
      double se = std::sqrt(4.0 / skill_count[k]);
      CHECK(std::abs(d - 4.0) < 4 * se);
    }
  }

  // restricting to class-(k,j) edges: text degrees fit Poisson(c_{k,j})
  std::vector<std::uint64_t> hist;
  std::uint64_t texts = 0;
  for (std::uint32_t t = 0; t < g.num_texts; ++t) {
    if (g.text_class[t] != 0) continue;
    std::uint64_t deg = 0;
    auto sk = g.skills_of(t);
    auto mu = g.skill_mult_of(t);
    for (std::size_t i = 0; i < sk.size(); ++i)
      if (g.skill_class[sk[i]] == 2) deg += mu[i];
    if (hist.size() <= deg) hist.resize(deg + 1, 0);
    ++hist[deg];
    ++texts;
  }
  CHECK(testing::chi_square_poisson_pvalue(hist, 2.0, texts) > 0.01);
}

TEST_CASE("multi-class zero mean produces zero edges for that pair") {
  MultiClassConfig cfg;
  cfg.num_skills = 1000;
  cfg.ratio_R = 1.0;
  cfg.text_class_fractions = {1.0};
  cfg.skill_class_fractions = {0.5, 0.5};
  cfg.mean_matrix = {{2.0}, {0.0}};
  cfg.seed = 3;
  auto g = sample_multi_class(cfg);
  for (std::uint32_t t = 0; t < g.num_texts; ++t)
    for (auto s : g.skills_of(t)) CHECK(g.skill_class[s] == 0);
}

TEST_CASE("single-class reduction of the multi-class sampler") {
  // J = K = 1 multi-class sampling is distributionally the single-class
  // sampler; compare degree means over a few seeds
  double multi_sum = 0, single_sum = 0;
  std::uint64_t n = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MultiClassConfig m;
    m.num_skills = 5000;
    m.ratio_R = 1.0;
    m.text_class_fractions = {1.0};
    m.skill_class_fractions = {1.0};
    m.mean_matrix = {{3.0}};
    m.seed = seed;
    auto g1 = sample_multi_class(m);
    SingleClassConfig s{5000, 1.0, 3.0, seed + 100};
    auto g2 = sample_single_class(s);
    for (auto d : g1.text_degree) multi_sum += d;
    for (auto d : g2.text_degree) single_sum += d;
    n += g1.num_texts;
  }
  CHECK(multi_sum / n == doctest::Approx(3.0).epsilon(0.02));
  CHECK(single_sum / n == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("domain-specific sampling: learnability flags") {
  HierarchyConfig cfg;
  cfg.basic = {1000, 1.0, 3.0, 1};
  cfg.num_domain_skills = 50000;
  cfg.ratio_Rf = 0.2;
  cfg.mean_domain_skills_per_text = 2.0;
  cfg.prereq = PrereqPgf::poisson(3.0);
  cfg.seed = 11;

  auto all = sample_domain_specific(cfg, 1.0);
  CHECK(all.learnable_skill_fraction == 1.0);  // Lambda_f(1) = 1

  auto none = sample_domain_specific(cfg, 0.0);
  // Lambda_f(0) = e^-3
  CHECK(none.learnable_skill_fraction ==
        doctest::Approx(std::exp(-3.0)).epsilon(0.05));

  CHECK_THROWS_AS(sample_domain_specific(cfg, 1.5), std::invalid_argument);

  cfg.mean_domain_skills_per_text = 0.0;
  auto iso = sample_domain_specific(cfg, 0.5);
  CHECK(iso.graph.num_edge_pairs() == 0);
}

TEST_CASE("explicit prerequisite pgf") {
  auto pgf = PrereqPgf::explicit_coeffs({1.0});
  CHECK(pgf.eval(0.0) == 1.0);  // delta_0 = 1: no prerequisites
  auto pgf2 = PrereqPgf::explicit_coeffs({0.25, 0.5, 0.25});
  CHECK(pgf2.eval(1.0) == doctest::Approx(1.0));
  CHECK(pgf2.eval(0.5) == doctest::Approx(0.25 + 0.5 * 0.5 + 0.25 * 0.25));
  CHECK_THROWS_AS(PrereqPgf::explicit_coeffs({0.5, 0.4}),
                  std::invalid_argument);
  Rng rng(1);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) ++counts[pgf2.sample(rng)];
  CHECK(counts[1] / 30000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("graph dump round-trips bit-exactly") {
  MultiClassConfig cfg;
  cfg.num_skills = 200;
  cfg.ratio_R = 1.5;
  cfg.text_class_fractions = {0.3, 0.7};
  cfg.skill_class_fractions = {0.6, 0.4};
  cfg.mean_matrix = {{1.0, 2.0}, {0.5, 1.5}};
  cfg.seed = 21;
  auto g = sample_multi_class(cfg);

  std::ostringstream first;
  g.dump(first);
  std::istringstream in(first.str());
  auto g2 = BipartiteGraph::load(in);
  g2.check_invariants();
  std::ostringstream second;
  g2.dump(second);
  CHECK(first.str() == second.str());

  std::istringstream bad("skills=2 texts=1\n");
  CHECK_THROWS_AS(BipartiteGraph::load(bad), std::invalid_argument);
}

TEST_CASE("parallel edges are kept as multiplicities") {
  std::vector<std::vector<std::uint32_t>> edges = {{0, 0, 1}};
  auto g = build_graph(2, std::move(edges), {}, {}, 1, 1);
  CHECK(g.num_edge_pairs() == 2);
  CHECK(g.num_edges_with_multiplicity() == 3);
  CHECK(g.text_degree[0] == 3);
  CHECK(g.skill_degree[0] == 2);
  g.check_invariants();
}
