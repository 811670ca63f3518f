#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "semlearn/learners.hpp"

using namespace semlearn;

TEST_CASE("one-skill success probability") {
  CHECK(psuc_one_skill(0.0) == 1.0);
  CHECK(psuc_one_skill(1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(psuc_one_skill(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(psuc_one_skill(std::nan("")), std::invalid_argument);
}

TEST_CASE("capacity-D success probability") {
  CHECK(psuc_d_skill(1, 0.7) == doctest::Approx(psuc_one_skill(0.7)));
  CHECK(psuc_d_skill(2, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(psuc_d_skill(2, 0.0) == 1.0);
  CHECK_THROWS_AS(psuc_d_skill(0, 1.0), std::invalid_argument);
  // capacity -> infinity limit
  for (double rho : {0.5, 5.0, 20.0})
    CHECK(psuc_d_skill(200, rho) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("near-far success probabilities") {
  auto [a0, b0] = psuc_near_far(0.0, 0.0);
  CHECK(a0 == 1.0);
  CHECK(b0 == 1.0);
  auto [a, b] = psuc_near_far(0.0, 1.0);
  CHECK(a == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(b == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  auto [s1, s2] = psuc_near_far(0.8, 0.8);
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-15));
}

TEST_CASE("profiles are probabilities and non-increasing on a grid") {
  auto profiles = {SuccessProfile::one_skill(), SuccessProfile::d_skill(2),
                   SuccessProfile::d_skill(7)};
  for (const auto& p : profiles) {
    double prev = 2.0;
    for (double rho = 0.0; rho <= 10.0; rho += 0.1) {
      double v = p.eval1(rho);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
  auto nf = SuccessProfile::near_far();
  for (double r2 = 0.0; r2 <= 10.0; r2 += 0.5) {
    double prev1 = 2.0;
    for (double r1 = 0.0; r1 <= 10.0; r1 += 0.1) {
      double rho[2] = {r1, r2}, out[2];
      nf.eval(rho, out);
      CHECK(out[0] >= 0.0);
      CHECK(out[0] <= 1.0);
      CHECK(out[0] <= prev1 + 1e-12);
      prev1 = out[0];
    }
  }
}

TEST_CASE("psi evaluation") {
  auto d2 = PsiFunction::d_skill(2);
  std::uint32_t n = 3, out = 9;
  d2.eval({&n, 1}, {&out, 1});
  CHECK(out == 0);
  n = 2;
  d2.eval({&n, 1}, {&out, 1});
  CHECK(out == 2);
  n = 0;
  d2.eval({&n, 1}, {&out, 1});
  CHECK(out == 0);

  auto nf = PsiFunction::near_far();
  std::uint32_t nn[2] = {1, 1}, oo[2];
  nf.eval(nn, oo);
  CHECK(oo[0] == 1);
  CHECK(oo[1] == 1);
  nn[0] = 2;
  nf.eval(nn, oo);
  CHECK(oo[0] == 0);
  CHECK(oo[1] == 0);
}

TEST_CASE("induced Poisson learner matches the closed forms") {
  // capacity 2 at rho = 1: 2/e
  auto d2 = PsiFunction::d_skill(2);
  double rho = 1.0;
  auto est = induce_poisson_from_psi(d2, {&rho, 1}, 1000000, 42);
  double expect = 2.0 * std::exp(-1.0);
  CHECK(std::abs(est.success[0] - expect) < 3.9 * est.stderr_[0]);

  // near-far at (1,1) against the closed form
  auto nf = PsiFunction::near_far();
  double rr[2] = {1.0, 1.0};
  auto est2 = induce_poisson_from_psi(nf, rr, 1000000, 43);
  auto [e1, e2] = psuc_near_far(1.0, 1.0);
  CHECK(std::abs(est2.success[0] - e1) < 3.9 * est2.stderr_[0]);
  CHECK(std::abs(est2.success[1] - e2) < 3.9 * est2.stderr_[1]);

  // identity psi estimates 1 for every class
  auto ident = PsiFunction::custom(
      1, [](std::span<const std::uint32_t> n, std::span<std::uint32_t> out) {
        out[0] = n[0];
      });
  double r = 0.7;
  auto est3 = induce_poisson_from_psi(ident, {&r, 1}, 200000, 44);
  CHECK(std::abs(est3.success[0] - 1.0) < 3.9 * est3.stderr_[0]);
}

TEST_CASE("induced profile agreement on a rho grid") {
  auto nf_psi = PsiFunction::near_far();
  auto nf_profile = nf_psi.induced_profile();
  for (double r1 : {0.2, 0.7, 1.3, 2.1, 3.0}) {
    for (double r2 : {0.2, 0.7, 1.3, 2.1, 3.0}) {
      double rho[2] = {r1, r2}, closed[2];
      nf_profile.eval(rho, closed);
      auto est = induce_poisson_from_psi(nf_psi, rho, 200000,
                                         std::uint64_t(r1 * 100 + r2));
      for (int k = 0; k < 2; ++k)
        CHECK(std::abs(est.success[k] - closed[k]) <
              3.9 * est.stderr_[k] + 1e-9);
    }
  }
}

TEST_CASE("zero-load classes use the tagged-skill convention") {
  auto nf = PsiFunction::near_far();
  double rho[2] = {0.0, 1.0};
  auto est = induce_poisson_from_psi(nf, rho, 400000, 45);
  // limit rho1 -> 0 of P_suc,1(rho1, 1) is 2/e
  CHECK(std::abs(est.success[0] - 2.0 * std::exp(-1.0)) <
        3.9 * est.stderr_[0]);
}

TEST_CASE("tabulated profile: CSV load, interpolation, clamping") {
  std::istringstream csv(
      "rho_1,psuc_1\n"
      "0,1\n"
      "1,0.5\n"
      "2,0.25\n");
  auto p = SuccessProfile::from_csv(csv, 1);
  CHECK(p.eval1(0.0) == doctest::Approx(1.0));
  CHECK(p.eval1(0.5) == doctest::Approx(0.75));
  CHECK(p.eval1(1.5) == doctest::Approx(0.375));
  CHECK(p.eval1(5.0) == doctest::Approx(0.25));  // clamped

  std::istringstream bad(
      "0,0,1,1\n"
      "1,1,0.5,0.9\n");  // 2-class grid missing two of four cells
  CHECK_THROWS_AS(SuccessProfile::from_csv(bad, 2), std::invalid_argument);

  std::istringstream csv2(
      "0,0,1,1\n"
      "0,1,0.7,0.4\n"
      "1,0,0.5,0.9\n"
      "1,1,0.3,0.2\n");
  auto p2 = SuccessProfile::from_csv(csv2, 2);
  double rho[2] = {0.5, 0.5}, out[2];
  p2.eval(rho, out);
  CHECK(out[0] == doctest::Approx((1 + 0.7 + 0.5 + 0.3) / 4.0));
  CHECK(out[1] == doctest::Approx((1 + 0.4 + 0.9 + 0.2) / 4.0));
}
