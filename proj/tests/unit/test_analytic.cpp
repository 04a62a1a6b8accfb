#include <doctest.h>

#include <cmath>

#include "models.hpp"
#include "ptsol/analytic.hpp"
#include "ptsol/error.hpp"

using namespace ptsol;
using namespace testing_models;

namespace {

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

ErrorCode code_of(const Knowns& k) {
  try {
    solve_constraints(k);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("potential samples at the origin and far away") {
  Grid g(512, 16.0);
  const int mid = 256;  // x = 0
  ModelSpec s{0.01, 0.3, -4.0, 3.0, 2.0101, -4.0, Family::ClassI};
  PotentialSamples p = sample_potential(s, g);
  CHECK(p.v[mid] == doctest::Approx(3.9899).epsilon(1e-14));
  CHECK(p.w[mid] == 0.0);
  CHECK(std::abs(p.v[1]) < 1e-12);
  CHECK(p.w[511] == doctest::Approx(0.6).epsilon(1e-12));

  ModelSpec c2{1.0, 0.003, 4.0, 3.0, 4.0, 2.44, Family::ClassII};
  CHECK(sample_potential(c2, g).v[mid] == doctest::Approx(-6.0).epsilon(1e-14));
}

TEST_CASE("sampled V is even and W is odd") {
  Grid g(512, 16.0);
  for (const ModelSpec& s : {ModelSpec{0.01, 0.3, -4.0, 3.0, 2.0101, -4.0, Family::ClassI},
                             ModelSpec{1.0, 0.003, 4.0, 3.0, 4.0, 2.44, Family::ClassII}}) {
    const PotentialSamples p = sample_potential(s, g);
    double dv = 0.0, dw = 0.0;
    for (int j = 1; j < 512; ++j) {
      dv = std::max(dv, std::abs(p.v[j] - p.v[g.mirror(j)]));
      dw = std::max(dw, std::abs(p.w[j] + p.w[g.mirror(j)]));
    }
    CHECK(dv <= 1e-12 * p.v.cwiseAbs().maxCoeff());
    CHECK(dw <= 1e-12 * p.w.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("class I constraints with phi0 = 1") {
  const SolvedModel m = solve_constraints(fig1_knowns());
  // phi0^2 = (a^2 + a + 2)/g1 with phi0 = 1.
  CHECK(rel_close(m.spec.g1, 0.01 * 0.01 + 0.01 + 2.0, 1e-12));
  CHECK(rel_close(m.spec.g1, 2.0101, 1e-12));
  CHECK(rel_close(m.solution.mu, 0.3, 1e-12));
  CHECK(rel_close(m.solution.lambda, 0.91, 1e-12));
  CHECK(m.spec.v1 == -4.0);
  CHECK(m.spec.g2 == -4.0);

  const SolvedModel f2 = solve_constraints(fig2_knowns(0.03));
  CHECK(rel_close(f2.spec.g1, 2.0309, 1e-12));
  CHECK(rel_close(f2.solution.mu, 0.003, 1e-12));
  CHECK(rel_close(f2.solution.lambda, 1.0 - 0.003 * 0.003, 1e-12));
}

TEST_CASE("class II constraints from g1, g2") {
  const SolvedModel m = solve_constraints(fig4b_knowns());
  const double c = 1.0 * 2.0 + 1.0 / 3.0 + 1.0 / 9.0;  // a(a+1) + 1/kappa + 1/kappa^2
  const double phi0 = std::pow(c / 2.44, 1.0 / 6.0);
  CHECK(rel_close(m.solution.phi0, phi0, 1e-12));
  CHECK(m.solution.phi0 == doctest::Approx(1.000303).epsilon(1e-6));
  CHECK(rel_close(m.spec.v1, 4.0 * phi0 * phi0, 1e-12));
  CHECK(rel_close(m.solution.mu, 0.009, 1e-12));
  CHECK(rel_close(m.solution.lambda, 1.0 / 9.0 - 0.009 * 0.009, 1e-12));
  CHECK(m.solution.lambda == doctest::Approx(0.111030).epsilon(1e-6));
}

TEST_CASE("consistent over-determined knowns are accepted") {
  // fig3 preset: a=1, b=.003, g1=4, V1=g2=-4, kappa=3.
  Knowns k{Family::ClassI, 1.0, 0.003, 3.0, std::nullopt, 4.0, -4.0, -4.0};
  const SolvedModel m = solve_constraints(k);
  CHECK(m.solution.phi0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constraint errors") {
  Knowns k = fig1_knowns();
  k.v1 = 4.0;  // V1/g2 < 0
  CHECK(code_of(k) == ErrorCode::InfeasibleAmplitude);

  Knowns neg = fig1_knowns();
  neg.phi0.reset();
  neg.g1 = -1.0;  // (a^2 + a + 2)/g1 < 0
  CHECK(code_of(neg) == ErrorCode::InfeasibleAmplitude);

  Knowns under;
  under.family = Family::ClassI;
  under.kappa = 3.0;
  under.g2 = -4.0;
  CHECK(code_of(under) == ErrorCode::UnderDetermined);

  Knowns over = fig1_knowns();
  over.g1 = 2.5;
  CHECK(code_of(over) == ErrorCode::OverDetermined);

  Knowns zero = fig1_knowns();
  zero.kappa = 0.0;
  CHECK(code_of(zero) == ErrorCode::KappaZero);
}

TEST_CASE("kappa = 1 merges the two nonlinearities") {
  Grid g(256, 16.0);
  Knowns k = fig1_knowns();
  k.kappa = 1.0;
  k.v1 = -1.5;
  k.g2 = -1.5;
  const SolvedModel m = solve_constraints(k);
  // Class II with kappa = 1 is Class I with g1 and g2 swapped.
  Knowns k2{Family::ClassII, k.a, k.b, 1.0, std::nullopt, m.spec.g2, m.spec.g1, std::nullopt};
  const SolvedModel m2 = solve_constraints(k2);
  CHECK(rel_close(m2.solution.phi0, m.solution.phi0, 1e-12));
  CHECK(rel_close(m2.spec.v1, m.spec.v1, 1e-12));
  CHECK(rel_close(m2.solution.lambda, m.solution.lambda, 1e-12));

  // Residual with (g1, g2) equals residual with the merged strength g1 + g2.
  const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
  ModelSpec merged = m.spec;
  merged.g1 = m.spec.g1 + m.spec.g2;
  merged.g2 = 0.0;
  const double r1 = stationary_residual(phi, m.spec, m.solution.lambda, g).sup_norm;
  const double r2 = stationary_residual(phi, merged, m.solution.lambda, g).sup_norm;
  CHECK(std::abs(r1 - r2) < 1e-12);
}

TEST_CASE("closed-form solution samples") {
  Grid g(512, 16.0);
  const SolvedModel m = solve_constraints(fig1_knowns());
  const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
  CHECK(std::abs(phi[256] - cplx(1.0, 0.0)) < 1e-15);
  double odd = 0.0;
  for (int j = 1; j < 512; ++j) odd = std::max(odd, std::abs(std::abs(phi[j]) - std::abs(phi[g.mirror(j)])));
  CHECK(odd < 1e-15);

  // kappa = 1: Class II modulus equals Class I modulus.
  ModelSpec s1{0.2, 0.1, 1.0, 1.0, 1.0, 1.0, Family::ClassI};
  ModelSpec s2 = s1;
  s2.family = Family::ClassII;
  StationarySolution sol1{1.3, 0.1, 0.99, Family::ClassI};
  StationarySolution sol2{1.3, 0.1, 0.99, Family::ClassII};
  const ComplexField a = evaluate_solution(s1, sol1, g), b = evaluate_solution(s2, sol2, g);
  CHECK((a.cwiseAbs() - b.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-15);

  ModelSpec bad = s2;
  bad.kappa = -2.0;
  CHECK_THROWS_AS(evaluate_solution(bad, sol2, g), Error);
}

TEST_CASE("stationary residual certifies the closed forms") {
  Grid g(512, 16.0);
  for (const Knowns& k : {fig1_knowns(), fig4a_knowns(), fig4b_knowns()}) {
    const SolvedModel m = solve_constraints(k);
    const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
    CHECK(stationary_residual(phi, m.spec, m.solution.lambda, g).sup_norm < 1e-8);
  }
  const SolvedModel m = solve_constraints(fig1_knowns());
  const ComplexField scaled = 1.1 * evaluate_solution(m.spec, m.solution, g);
  CHECK(stationary_residual(scaled, m.spec, m.solution.lambda, g).sup_norm > 1e-3);
}

TEST_CASE("boundary advisory") {
  const SolvedModel m = solve_constraints(fig1_knowns());
  Grid narrow(256, 8.0), wide(512, 32.0);
  CHECK(stationary_residual(evaluate_solution(m.spec, m.solution, narrow), m.spec,
                            m.solution.lambda, narrow).grid_too_coarse);
  CHECK_FALSE(stationary_residual(evaluate_solution(m.spec, m.solution, wide), m.spec,
                                  m.solution.lambda, wide).grid_too_coarse);
}

TEST_CASE("power flow") {
  Grid g(512, 16.0);
  const SolvedModel m = solve_constraints(fig1_knowns());
  const PowerFlowProfile s = power_flow(evaluate_solution(m.spec, m.solution, g), g);
  CHECK(s.values[256] == doctest::Approx(0.3).epsilon(1e-12));
  double err = 0.0, asym = 0.0;
  for (int j = 0; j < 512; ++j) {
    const double x = g.point(j);
    if (std::abs(x) <= 0.8 * 16.0) err = std::max(err, std::abs(s.values[j] - 0.3 / std::pow(std::cosh(x), 2)));
    if (j > 0) asym = std::max(asym, std::abs(s.values[j] - s.values[g.mirror(j)]));
  }
  CHECK(err < 1e-8);
  CHECK(asym < 1e-12);

  Knowns real = fig1_knowns();
  real.b = 0.0;
  const SolvedModel r = solve_constraints(real);
  CHECK(power_flow(evaluate_solution(r.spec, r.solution, g), g).values.cwiseAbs().maxCoeff() < 1e-14);

  const SolvedModel c2 = solve_constraints(fig4b_knowns());
  const PowerFlowProfile s2 = power_flow(evaluate_solution(c2.spec, c2.solution, g), g);
  CHECK(s2.values[256] == doctest::Approx(0.009 * c2.solution.phi0 * c2.solution.phi0).epsilon(1e-10));
  CHECK(s2.values[256] == doctest::Approx(0.009005).epsilon(1e-4));
}
