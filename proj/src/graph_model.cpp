#include "semlearn/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "semlearn/rng.hpp"

namespace semlearn {

namespace {

constexpr std::uint64_t kTextStreamSalt = 0x11;
constexpr std::uint64_t kSkillFlagSalt = 0x22;
constexpr std::uint64_t kTestTextSalt = 0x33;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::uint32_t rounded_count(double ratio, std::uint32_t base, const char* msg) {
  double v = std::round(ratio * static_cast<double>(base));
  require(v >= 0.0 && v <= 4e9, msg);
  return static_cast<std::uint32_t>(v);
}

// Largest-remainder apportionment of n into fractions (sums to n exactly).
std::vector<std::uint32_t> apportion(std::uint32_t n,
                                     const std::vector<double>& fractions) {
  std::vector<std::uint32_t> sizes(fractions.size());
  std::vector<std::pair<double, std::size_t>> rem(fractions.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    double exact = fractions[i] * n;
    sizes[i] = static_cast<std::uint32_t>(std::floor(exact));
    assigned += sizes[i];
    rem[i] = {exact - std::floor(exact), i};
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    sizes[rem[i % rem.size()].second] += 1;
  }
  return sizes;
}

void check_fractions(const std::vector<double>& f, const char* what) {
  require(!f.empty(), "class fraction vector is empty");
  double sum = 0.0;
  for (double v : f) {
    require(std::isfinite(v) && v >= 0.0, "class fractions must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(what) +
                                " fractions must sum to 1");
  }
}

}  // namespace

std::uint32_t SingleClassConfig::num_texts() const {
  return rounded_count(ratio_R, num_skills, "derived |D| out of range");
}

void SingleClassConfig::validate() const {
  require(num_skills >= 1, "num_skills must be >= 1");
  require(std::isfinite(ratio_R) && ratio_R >= 0.0,
          "ratio_R must be finite and >= 0");
  require(std::isfinite(mean_skills_per_text) && mean_skills_per_text >= 0.0,
          "mean_skills_per_text must be finite and >= 0");
}

std::uint32_t MultiClassConfig::num_texts() const {
  return rounded_count(ratio_R, num_skills, "derived |D| out of range");
}

void MultiClassConfig::validate() const {
  require(num_skills >= 1, "num_skills must be >= 1");
  require(std::isfinite(ratio_R) && ratio_R >= 0.0,
          "ratio_R must be finite and >= 0");
  check_fractions(text_class_fractions, "text class");
  check_fractions(skill_class_fractions, "skill class");
  require(mean_matrix.size() == num_skill_classes(),
          "mean_matrix must have one row per skill class");
  for (const auto& row : mean_matrix) {
    require(row.size() == num_text_classes(),
            "mean_matrix row must have one column per text class");
    for (double v : row) {
      require(std::isfinite(v) && v >= 0.0, "mean_matrix entries must be >= 0");
    }
  }
}

PrereqPgf PrereqPgf::poisson(double mean) {
  PrereqPgf p;
  p.kind = Kind::Poisson;
  p.poisson_mean = mean;
  p.validate();
  return p;
}

PrereqPgf PrereqPgf::explicit_coeffs(std::vector<double> delta) {
  PrereqPgf p;
  p.kind = Kind::Explicit;
  p.coeffs = std::move(delta);
  p.validate();
  return p;
}

void PrereqPgf::validate() const {
  if (kind == Kind::Poisson) {
    require(std::isfinite(poisson_mean) && poisson_mean >= 0.0,
            "prerequisite Poisson mean must be >= 0");
    return;
  }
  require(!coeffs.empty(), "explicit pgf needs at least one coefficient");
  double sum = 0.0;
  for (double d : coeffs) {
    require(std::isfinite(d) && d >= 0.0, "pgf coefficients must be >= 0");
    sum += d;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "pgf coefficients must sum to 1");
}

double PrereqPgf::eval(double x) const {
  if (kind == Kind::Poisson) return std::exp(-poisson_mean * (1.0 - x));
  double acc = 0.0, xp = 1.0;
  for (double d : coeffs) {
    acc += d * xp;
    xp *= x;
  }
  return acc;
}

std::uint32_t PrereqPgf::sample(Rng& rng) const {
  if (kind == Kind::Poisson) return rng.poisson(poisson_mean);
  double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    acc += coeffs[i];
    if (u < acc) return static_cast<std::uint32_t>(i);
  }
  return static_cast<std::uint32_t>(coeffs.size() - 1);
}

std::uint32_t HierarchyConfig::num_domain_texts() const {
  return rounded_count(ratio_Rf, num_domain_skills, "derived |D_f| out of range");
}

void HierarchyConfig::validate() const {
  basic.validate();
  require(num_domain_skills >= 1, "num_domain_skills must be >= 1");
  require(std::isfinite(ratio_Rf) && ratio_Rf >= 0.0,
          "ratio_Rf must be finite and >= 0");
  require(std::isfinite(mean_domain_skills_per_text) &&
              mean_domain_skills_per_text >= 0.0,
          "mean_domain_skills_per_text must be finite and >= 0");
  prereq.validate();
}

std::uint64_t BipartiteGraph::num_edges_with_multiplicity() const {
  std::uint64_t n = 0;
  for (auto m : text_mult) n += m;
  return n;
}

void BipartiteGraph::check_invariants() const {
  auto fail = [](const char* msg) { throw std::logic_error(msg); };
  if (skill_class.size() != num_skills || text_class.size() != num_texts)
    fail("class label size mismatch");
  for (auto c : skill_class)
    if (c >= num_skill_classes) fail("skill class out of range");
  for (auto c : text_class)
    if (c >= num_text_classes) fail("text class out of range");
  if (text_offsets.size() != num_texts + 1u ||
      skill_offsets.size() != num_skills + 1u)
    fail("CSR offset size mismatch");
  std::vector<std::uint64_t> sdeg(num_skills, 0), tdeg(num_texts, 0);
  for (std::uint32_t t = 0; t < num_texts; ++t) {
    auto sk = skills_of(t);
    auto mu = skill_mult_of(t);
    for (std::size_t i = 0; i < sk.size(); ++i) {
      if (sk[i] >= num_skills) fail("edge skill endpoint out of range");
      if (i > 0 && sk[i] <= sk[i - 1]) fail("text adjacency not sorted/unique");
      if (mu[i] == 0) fail("zero multiplicity");
      sdeg[sk[i]] += mu[i];
      tdeg[t] += mu[i];
    }
  }
  for (std::uint32_t s = 0; s < num_skills; ++s)
    if (sdeg[s] != skill_degree[s]) fail("skill degree cache mismatch");
  for (std::uint32_t t = 0; t < num_texts; ++t)
    if (tdeg[t] != text_degree[t]) fail("text degree cache mismatch");
  // mirror side
  std::uint64_t pairs = 0;
  for (std::uint32_t s = 0; s < num_skills; ++s) {
    auto tx = texts_of(s);
    for (std::size_t i = 0; i < tx.size(); ++i) {
      if (tx[i] >= num_texts) fail("edge text endpoint out of range");
      if (i > 0 && tx[i] <= tx[i - 1]) fail("skill adjacency not sorted/unique");
    }
    pairs += tx.size();
  }
  if (pairs != text_skills.size()) fail("adjacency mirror size mismatch");
}

BipartiteGraph build_graph(std::uint32_t num_skills,
                           std::vector<std::vector<std::uint32_t>> text_edges,
                           std::vector<std::uint32_t> skill_class,
                           std::vector<std::uint32_t> text_class,
                           std::uint32_t num_skill_classes,
                           std::uint32_t num_text_classes) {
  BipartiteGraph g;
  g.num_skills = num_skills;
  g.num_texts = static_cast<std::uint32_t>(text_edges.size());
  g.num_skill_classes = num_skill_classes;
  g.num_text_classes = num_text_classes;
  g.skill_class = std::move(skill_class);
  g.text_class = std::move(text_class);
  if (g.skill_class.empty()) g.skill_class.assign(num_skills, 0);
  if (g.text_class.empty()) g.text_class.assign(g.num_texts, 0);

  g.text_offsets.assign(g.num_texts + 1, 0);
  g.text_degree.assign(g.num_texts, 0);
  g.skill_degree.assign(num_skills, 0);

  // collapse repeats into multiplicities, text side first
  for (std::uint32_t t = 0; t < g.num_texts; ++t) {
    auto& e = text_edges[t];
    std::sort(e.begin(), e.end());
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < e.size();) {
      std::size_t j = i;
      while (j < e.size() && e[j] == e[i]) ++j;
      auto mult = static_cast<std::uint32_t>(j - i);
      g.text_skills.push_back(e[i]);
      g.text_mult.push_back(mult);
      g.text_degree[t] += mult;
      g.skill_degree[e[i]] += mult;
      ++distinct;
      i = j;
    }
    g.text_offsets[t + 1] = g.text_offsets[t] + distinct;
  }

  // mirror to the skill side (counting sort by skill keeps texts ordered)
  std::vector<std::size_t> counts(num_skills + 1, 0);
  for (auto s : g.text_skills) counts[s + 1]++;
  for (std::uint32_t s = 0; s < num_skills; ++s) counts[s + 1] += counts[s];
  g.skill_offsets = counts;
  g.skill_texts.resize(g.text_skills.size());
  g.skill_mult.resize(g.text_skills.size());
  for (std::uint32_t t = 0; t < g.num_texts; ++t) {
    for (std::size_t i = g.text_offsets[t]; i < g.text_offsets[t + 1]; ++i) {
      std::size_t pos = counts[g.text_skills[i]]++;
      g.skill_texts[pos] = t;
      g.skill_mult[pos] = g.text_mult[i];
    }
  }
  return g;
}

BipartiteGraph sample_single_class(const SingleClassConfig& cfg) {
  cfg.validate();
  const std::uint32_t num_texts = cfg.num_texts();
  std::vector<std::vector<std::uint32_t>> edges(num_texts);
  for (std::uint32_t t = 0; t < num_texts; ++t) {
    Rng rng = Rng::stream(cfg.seed, t, kTextStreamSalt);
    std::uint32_t deg = rng.poisson(cfg.mean_skills_per_text);
    edges[t].resize(deg);
    for (auto& s : edges[t]) s = rng.next_below(cfg.num_skills);
  }
  return build_graph(cfg.num_skills, std::move(edges), {}, {}, 1, 1);
}

BipartiteGraph sample_multi_class(const MultiClassConfig& cfg) {
  cfg.validate();
  const auto K = static_cast<std::uint32_t>(cfg.num_skill_classes());
  const auto J = static_cast<std::uint32_t>(cfg.num_text_classes());
  const std::uint32_t num_texts = cfg.num_texts();

  auto skill_sizes = apportion(cfg.num_skills, cfg.skill_class_fractions);
  auto text_sizes = apportion(num_texts, cfg.text_class_fractions);

  std::vector<std::uint32_t> skill_class(cfg.num_skills);
  std::vector<std::uint32_t> skill_base(K + 1, 0);
  for (std::uint32_t k = 0; k < K; ++k) {
    skill_base[k + 1] = skill_base[k] + skill_sizes[k];
    std::fill(skill_class.begin() + skill_base[k],
              skill_class.begin() + skill_base[k + 1], k);
  }
  std::vector<std::uint32_t> text_class(num_texts);
  {
    std::uint32_t base = 0;
    for (std::uint32_t j = 0; j < J; ++j) {
      std::fill(text_class.begin() + base,
                text_class.begin() + base + text_sizes[j], j);
      base += text_sizes[j];
    }
  }

  std::vector<std::vector<std::uint32_t>> edges(num_texts);
  for (std::uint32_t t = 0; t < num_texts; ++t) {
    Rng rng = Rng::stream(cfg.seed, t, kTextStreamSalt);
    const std::uint32_t j = text_class[t];
    for (std::uint32_t k = 0; k < K; ++k) {
      std::uint32_t deg = rng.poisson(cfg.mean_matrix[k][j]);
      if (skill_sizes[k] == 0 && deg > 0)
        throw std::invalid_argument(
            "nonzero mean for an empty skill class");
      for (std::uint32_t e = 0; e < deg; ++e)
        edges[t].push_back(skill_base[k] + rng.next_below(skill_sizes[k]));
    }
  }
  return build_graph(cfg.num_skills, std::move(edges), std::move(skill_class),
                     std::move(text_class), K, J);
}

DomainSample sample_domain_specific(const HierarchyConfig& cfg,
                                    double learned_basic_prob) {
  cfg.validate();
  require(std::isfinite(learned_basic_prob) && learned_basic_prob >= 0.0 &&
              learned_basic_prob <= 1.0,
          "learned_basic_prob must be a probability");
  SingleClassConfig domain;
  domain.num_skills = cfg.num_domain_skills;
  domain.ratio_R = cfg.ratio_Rf;
  domain.mean_skills_per_text = cfg.mean_domain_skills_per_text;
  domain.seed = cfg.seed;

  DomainSample out;
  out.graph = sample_single_class(domain);
  const double lam = cfg.prereq.eval(learned_basic_prob);
  out.skill_learnable.assign(cfg.num_domain_skills, 0);
  std::uint64_t learnable = 0;
  for (std::uint32_t s = 0; s < cfg.num_domain_skills; ++s) {
    Rng rng = Rng::stream(cfg.seed, s, kSkillFlagSalt);
    out.skill_learnable[s] = rng.bernoulli(lam) ? 1 : 0;
    learnable += out.skill_learnable[s];
  }
  out.learnable_skill_fraction =
      static_cast<double>(learnable) / cfg.num_domain_skills;
  return out;
}

std::vector<std::uint32_t> sample_test_text(std::uint32_t num_skills, double c,
                                            std::uint64_t seed,
                                            std::uint64_t index) {
  Rng rng = Rng::stream(seed, index, kTestTextSalt);
  std::uint32_t deg = rng.poisson(c);
  std::vector<std::uint32_t> skills(deg);
  for (auto& s : skills) s = rng.next_below(num_skills);
  std::sort(skills.begin(), skills.end());
  skills.erase(std::unique(skills.begin(), skills.end()), skills.end());
  return skills;
}

void BipartiteGraph::dump(std::ostream& out) const {
  out << "skills=" << num_skills << " texts=" << num_texts
      << " K=" << num_skill_classes << " J=" << num_text_classes << "\n";
  for (std::uint32_t t = 0; t < num_texts; ++t) {
    auto sk = skills_of(t);
    auto mu = skill_mult_of(t);
    for (std::size_t i = 0; i < sk.size(); ++i)
      out << sk[i] << ' ' << t << ' ' << mu[i] << "\n";
  }
  out << "skill_classes\n";
  for (std::uint32_t s = 0; s < num_skills; ++s)
    out << skill_class[s] << (s + 1 == num_skills ? "" : " ");
  out << "\n";
  out << "text_classes\n";
  for (std::uint32_t t = 0; t < num_texts; ++t)
    out << text_class[t] << (t + 1 == num_texts ? "" : " ");
  out << "\n";
}

BipartiteGraph load_graph_impl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("graph dump: missing header");
  std::uint32_t n = 0, m = 0, K = 0, J = 0;
  if (std::sscanf(line.c_str(), "skills=%u texts=%u K=%u J=%u", &n, &m, &K,
                  &J) != 4)
    throw std::invalid_argument("graph dump: malformed header");
  std::vector<std::vector<std::uint32_t>> edges(m);
  std::vector<std::uint32_t> sclass, tclass;
  while (std::getline(in, line)) {
    if (line == "skill_classes") break;
    std::uint32_t s = 0, t = 0, mult = 0;
    if (std::sscanf(line.c_str(), "%u %u %u", &s, &t, &mult) != 3)
      throw std::invalid_argument("graph dump: malformed edge line");
    if (s >= n || t >= m || mult == 0)
      throw std::invalid_argument("graph dump: edge out of range");
    for (std::uint32_t i = 0; i < mult; ++i) edges[t].push_back(s);
  }
  auto read_labels = [&](std::uint32_t count, std::uint32_t bound) {
    std::vector<std::uint32_t> labels;
    if (count > 0) {
      if (!std::getline(in, line))
        throw std::invalid_argument("graph dump: missing labels");
      std::istringstream ls(line);
      std::uint32_t v;
      while (ls >> v) {
        if (v >= bound)
          throw std::invalid_argument("graph dump: class label out of range");
        labels.push_back(v);
      }
    } else {
      std::getline(in, line);
    }
    if (labels.size() != count)
      throw std::invalid_argument("graph dump: label count mismatch");
    return labels;
  };
  sclass = read_labels(n, K);
  if (!std::getline(in, line) || line != "text_classes")
    throw std::invalid_argument("graph dump: missing text_classes block");
  tclass = read_labels(m, J);
  return build_graph(n, std::move(edges), std::move(sclass), std::move(tclass),
                     K, J);
}

BipartiteGraph BipartiteGraph::load(std::istream& in) {
  return load_graph_impl(in);
}

}  // namespace semlearn
