#include "semlearn/learners.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "semlearn/parallel.hpp"
#include "semlearn/rng.hpp"

namespace semlearn {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
void require_finite(double v) {
  require(std::isfinite(v), "non-finite load");
}
}  // namespace

double psuc_one_skill(double rho) {
  require_finite(rho);
  require(rho >= 0.0, "rho must be >= 0");
  return std::exp(-rho);
}

double psuc_d_skill(int capacity, double rho) {
  require(capacity >= 1, "capacity must be >= 1");
  require_finite(rho);
  require(rho >= 0.0, "rho must be >= 0");
  // Poisson cdf at capacity-1, evaluated by running the terms up
  double term = std::exp(-rho);
  double sum = term;
  for (int t = 1; t < capacity; ++t) {
    term *= rho / t;
    sum += term;
  }
  return std::min(sum, 1.0);
}

std::pair<double, double> psuc_near_far(double rho1, double rho2) {
  require_finite(rho1);
  require_finite(rho2);
  require(rho1 >= 0.0 && rho2 >= 0.0, "rho must be >= 0");
  double a = std::exp(-rho1), b = std::exp(-rho2);
  return {a * (b + rho2 * b), b * (a + rho1 * a)};
}

SuccessProfile SuccessProfile::one_skill(int num_classes) {
  return d_skill(1, num_classes);
}

SuccessProfile SuccessProfile::d_skill(int capacity, int num_classes) {
  require(capacity >= 1, "capacity must be >= 1");
  require(num_classes >= 1, "num_classes must be >= 1");
  SuccessProfile p(Kind::DSkill, num_classes);
  p.capacity_ = capacity;
  if (capacity == 1) p.kind_ = Kind::OneSkill;
  return p;
}

SuccessProfile SuccessProfile::near_far() {
  return SuccessProfile(Kind::NearFar, 2);
}

SuccessProfile SuccessProfile::tabulated(ProfileTable table) {
  require(!table.axes.empty(), "tabulated profile needs at least one axis");
  std::size_t cells = 1;
  for (auto& ax : table.axes) {
    require(!ax.empty(), "tabulated profile axis is empty");
    require(std::is_sorted(ax.begin(), ax.end()), "axis values must be sorted");
    cells *= ax.size();
  }
  require(table.values.size() == cells * table.axes.size(),
          "tabulated profile value count mismatch");
  for (double v : table.values)
    require(v >= 0.0 && v <= 1.0, "profile values must be probabilities");
  SuccessProfile p(Kind::Tabulated, static_cast<int>(table.axes.size()));
  p.table_ = std::move(table);
  return p;
}

void SuccessProfile::eval(std::span<const double> rho,
                          std::span<double> out) const {
  require(rho.size() == static_cast<std::size_t>(num_classes_) &&
              out.size() == rho.size(),
          "profile arity mismatch");
  for (double r : rho) {
    require_finite(r);
    require(r >= 0.0, "rho must be >= 0");
  }
  switch (kind_) {
    case Kind::OneSkill:
    case Kind::DSkill: {
      double total = 0.0;
      for (double r : rho) total += r;
      double v = psuc_d_skill(capacity_, total);
      for (auto& o : out) o = v;
      return;
    }
    case Kind::NearFar: {
      auto [a, b] = psuc_near_far(rho[0], rho[1]);
      out[0] = a;
      out[1] = b;
      return;
    }
    case Kind::Tabulated: {
      // clamped multilinear interpolation
      const std::size_t K = table_.axes.size();
      std::vector<std::size_t> lo(K);
      std::vector<double> frac(K);
      for (std::size_t k = 0; k < K; ++k) {
        const auto& ax = table_.axes[k];
        double r = std::clamp(rho[k], ax.front(), ax.back());
        auto it = std::upper_bound(ax.begin(), ax.end(), r);
        std::size_t hi = std::min<std::size_t>(it - ax.begin(), ax.size() - 1);
        std::size_t l = hi == 0 ? 0 : hi - 1;
        lo[k] = l;
        frac[k] = (ax[hi] == ax[l]) ? 0.0 : (r - ax[l]) / (ax[hi] - ax[l]);
      }
      std::fill(out.begin(), out.end(), 0.0);
      const std::size_t corners = std::size_t{1} << K;
      for (std::size_t mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        std::size_t idx = 0;
        for (std::size_t k = 0; k < K; ++k) {
          bool hi = (mask >> k) & 1u;
          std::size_t pos = lo[k] + (hi ? 1 : 0);
          pos = std::min(pos, table_.axes[k].size() - 1);
          w *= hi ? frac[k] : (1.0 - frac[k]);
          idx = idx * table_.axes[k].size() + pos;
        }
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < K; ++k)
          out[k] += w * table_.values[idx * K + k];
      }
      return;
    }
  }
}

double SuccessProfile::eval1(double rho) const {
  require(num_classes_ == 1, "eval1 requires a single-class profile");
  double out;
  eval({&rho, 1}, {&out, 1});
  return out;
}

SuccessProfile SuccessProfile::from_csv(std::istream& in, int num_classes) {
  require(num_classes >= 1, "num_classes must be >= 1");
  const auto K = static_cast<std::size_t>(num_classes);
  std::string line;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> nums;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        nums.push_back(std::stod(cell));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) continue;  // header row
    require(nums.size() == 2 * K, "profile CSV row arity mismatch");
    rows.emplace_back(std::vector<double>(nums.begin(), nums.begin() + K),
                      std::vector<double>(nums.begin() + K, nums.end()));
  }
  require(!rows.empty(), "profile CSV has no data rows");

  ProfileTable table;
  table.axes.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (auto& r : rows) table.axes[k].push_back(r.first[k]);
    auto& ax = table.axes[k];
    std::sort(ax.begin(), ax.end());
    ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
  }
  std::size_t cells = 1;
  for (auto& ax : table.axes) cells *= ax.size();
  require(rows.size() == cells, "profile CSV grid is not rectangular");
  table.values.assign(cells * K, -1.0);
  for (auto& r : rows) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto& ax = table.axes[k];
      auto it = std::lower_bound(ax.begin(), ax.end(), r.first[k]);
      idx = idx * ax.size() + static_cast<std::size_t>(it - ax.begin());
    }
    for (std::size_t k = 0; k < K; ++k) table.values[idx * K + k] = r.second[k];
  }
  for (double v : table.values)
    require(v >= 0.0, "profile CSV grid has duplicate or missing cells");
  return tabulated(std::move(table));
}

PsiFunction PsiFunction::d_skill(int capacity, int num_classes) {
  require(capacity >= 1, "capacity must be >= 1");
  require(num_classes >= 1, "num_classes must be >= 1");
  PsiFunction p(Kind::DSkill, num_classes);
  p.capacity_ = capacity;
  return p;
}

PsiFunction PsiFunction::near_far() { return PsiFunction(Kind::NearFar, 2); }

PsiFunction PsiFunction::custom(
    int num_classes, std::function<void(std::span<const std::uint32_t>,
                                        std::span<std::uint32_t>)> fn) {
  require(num_classes >= 1, "num_classes must be >= 1");
  PsiFunction p(Kind::Custom, num_classes);
  p.fn_ = std::move(fn);
  return p;
}

void PsiFunction::eval(std::span<const std::uint32_t> n,
                       std::span<std::uint32_t> out) const {
  require(n.size() == static_cast<std::size_t>(num_classes_) &&
              out.size() == n.size(),
          "psi arity mismatch");
  switch (kind_) {
    case Kind::DSkill: {
      std::uint64_t total = 0;
      for (auto v : n) total += v;
      bool ok = total <= static_cast<std::uint64_t>(capacity_);
      for (std::size_t k = 0; k < n.size(); ++k) out[k] = ok ? n[k] : 0;
      return;
    }
    case Kind::NearFar: {
      bool ok = n[0] <= 1 && n[1] <= 1;
      out[0] = ok ? n[0] : 0;
      out[1] = ok ? n[1] : 0;
      return;
    }
    case Kind::Custom: {
      fn_(n, out);
      for (std::size_t k = 0; k < n.size(); ++k) {
        if (out[k] > n[k])
          throw std::logic_error("psi_k(n) exceeded n_k");
      }
      return;
    }
  }
}

SuccessProfile PsiFunction::induced_profile() const {
  switch (kind_) {
    case Kind::DSkill:
      return SuccessProfile::d_skill(capacity_, num_classes_);
    case Kind::NearFar:
      return SuccessProfile::near_far();
    case Kind::Custom:
      break;
  }
  throw std::invalid_argument("no closed-form profile for a custom psi");
}

InducedEstimate induce_poisson_from_psi(const PsiFunction& psi,
                                        std::span<const double> rho,
                                        std::uint64_t num_samples,
                                        std::uint64_t seed, int num_threads) {
  require(num_samples >= 1, "num_samples must be >= 1");
  const auto K = static_cast<std::size_t>(psi.num_classes());
  require(rho.size() == K, "rho arity mismatch");
  for (double r : rho) {
    require_finite(r);
    require(r >= 0.0, "rho must be >= 0");
  }

  // A tagged class-k skill sees the excess load: N_k other novel skills in
  // class k plus the tagged one, so class k succeeds with
  // E[psi_k(N)] / rho_k. With rho_k = 0 the ratio is taken in the limit:
  // condition on the tagged skill, i.e. N_k = 1 exactly.
  const std::uint64_t kBlock = 65536;
  const std::uint64_t blocks = (num_samples + kBlock - 1) / kBlock;
  struct Acc {
    std::vector<double> sum, sumsq;
  };
  std::vector<Acc> acc(blocks);

  parallel_for(blocks, num_threads, [&](std::size_t b) {
    Rng rng = Rng::stream(seed, b, 0x51);
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min(num_samples, lo + kBlock);
    Acc a{std::vector<double>(K, 0.0), std::vector<double>(K, 0.0)};
    std::vector<std::uint32_t> n(K), psi_n(K), n_forced(K), psi_forced(K);
    for (std::uint64_t i = lo; i < hi; ++i) {
      for (std::size_t k = 0; k < K; ++k) n[k] = rng.poisson(rho[k]);
      psi.eval(n, psi_n);
      for (std::size_t k = 0; k < K; ++k) {
        double x;
        if (rho[k] > 0.0) {
          x = static_cast<double>(psi_n[k]) / rho[k];
        } else {
          n_forced = n;
          n_forced[k] = 1;
          psi.eval(n_forced, psi_forced);
          x = static_cast<double>(psi_forced[k]);
        }
        a.sum[k] += x;
        a.sumsq[k] += x * x;
      }
    }
    acc[b] = std::move(a);
  });

  InducedEstimate est;
  est.num_samples = num_samples;
  est.success.assign(K, 0.0);
  est.stderr_.assign(K, 0.0);
  std::vector<double> sum(K, 0.0), sumsq(K, 0.0);
  for (const auto& a : acc) {
    for (std::size_t k = 0; k < K; ++k) {
      sum[k] += a.sum[k];
      sumsq[k] += a.sumsq[k];
    }
  }
  const auto n = static_cast<double>(num_samples);
  for (std::size_t k = 0; k < K; ++k) {
    est.success[k] = sum[k] / n;
    double var = std::max(0.0, sumsq[k] / n - est.success[k] * est.success[k]);
    est.stderr_[k] = std::sqrt(var / n);
  }
  return est;
}

}  // namespace semlearn
