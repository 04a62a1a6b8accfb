#include <doctest.h>

#include <cmath>

#include "models.hpp"
#include "ptsol/error.hpp"
#include "ptsol/linearization.hpp"
#include "ptsol/spectrum.hpp"

using namespace ptsol;
using namespace testing_models;

namespace {

double interior_sup(const ComplexVector& v, const Grid& g) {
  double out = 0.0;
  for (int j = 0; j < g.size(); ++j)
    if (std::abs(g.point(j)) <= 0.8 * g.half_width()) out = std::max(out, std::abs(v[j]));
  return out;
}

// The Class II profile sech^{1/3} is still 5e-3 at x = 16, so it gets a wider box.
Grid grid_for(const Knowns& k) {
  return k.family == Family::ClassII ? Grid(1024, 64.0) : Grid(512, 16.0);
}

}  // namespace

TEST_CASE("L0 annihilates the stationary profile") {
  for (const Knowns& k : {fig4a_knowns(), fig4b_knowns(), fig2_knowns(0.05)}) {
    const Grid g = grid_for(k);
    const SolvedModel m = solve_constraints(k);
    const LinearizedOperator op = build_operators(m.spec, m.solution, g);
    const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
    CHECK(interior_sup(op.l0 * phi, g) < 1e-8);
  }
}

TEST_CASE("gauge mode (0, phi) is in the kernel of M") {
  for (const Knowns& k : {fig1_knowns(), fig4a_knowns(), fig4b_knowns()}) {
    const Grid g = grid_for(k);
    const SolvedModel m = solve_constraints(k);
    const LinearizedOperator op = build_operators(m.spec, m.solution, g);
    const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
    ComplexVector u = ComplexVector::Zero(2 * g.size());
    u.tail(g.size()) = phi;
    const double norm_inf = op.block.cwiseAbs().rowwise().sum().maxCoeff();
    const ComplexVector mu = op.block * u;
    CHECK(interior_sup(mu.head(g.size()), g) <= 1e-8 * norm_inf);
    CHECK(interior_sup(mu.tail(g.size()), g) <= 1e-8 * norm_inf);
  }
}

TEST_CASE("block layout is exact") {
  Grid g(64, 12.0);
  const SolvedModel m = solve_constraints(fig4a_knowns());
  const LinearizedOperator op = build_operators(m.spec, m.solution, g);
  const int n = g.size();
  CHECK(op.block.topLeftCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
  CHECK(op.block.bottomRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
  CHECK(op.block.topRightCorner(n, n) == cplx(0, 1) * op.l0);
  CHECK(op.block.bottomLeftCorner(n, n) == cplx(0, 1) * op.l1);
}

TEST_CASE("cubic limit: L1 - L0 = 2 g1 |phi|^2") {
  Grid g(128, 16.0);
  const SolvedModel m = solve_constraints(cubic_knowns());
  const LinearizedOperator op = build_operators(m.spec, m.solution, g);
  const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
  ComplexMatrix expected = ComplexMatrix::Zero(g.size(), g.size());
  for (int j = 0; j < g.size(); ++j) expected(j, j) = 2.0 * m.spec.g1 * std::norm(phi[j]);
  CHECK((op.l1 - op.l0 - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("inconsistent parameters are refused") {
  Grid g(256, 16.0);
  SolvedModel m = solve_constraints(fig1_knowns());
  m.spec.g1 *= 1.01;
  CHECK_THROWS_AS(build_operators(m.spec, m.solution, g), Error);
}

TEST_CASE("Frechet oracle agrees with M in the real cubic limit") {
  Grid g(128, 16.0);
  const SolvedModel m = solve_constraints(cubic_knowns());
  const LinearizedOperator op = build_operators(m.spec, m.solution, g);
  const ComplexMatrix fr = direct_frechet_operator(m.spec, m.solution, g);
  const Spectrum a = certified_spectrum(op.block, g);
  const Spectrum b = certified_spectrum(fr, g);
  REQUIRE(a.pairs.size() == b.pairs.size());
  double worst = 0.0;
  for (const CertifiedPair& p : a.pairs) worst = std::max(worst, nearest_distance(b, p.eta));
  for (const CertifiedPair& p : b.pairs) worst = std::max(worst, nearest_distance(a, p.eta));
  CHECK(worst < 1e-4);
  // The gauge zero mode is a 2x2 Jordan block, so round-off splits it by
  // roughly the square root of the entry error.
  CHECK(nearest_distance(a, 0.0) < 1e-5);
  CHECK(nearest_distance(b, 0.0) < 1e-4);
}

TEST_CASE("Frechet oracle annihilates the gauge direction") {
  Grid g(128, 16.0);
  const SolvedModel m = solve_constraints(fig4a_knowns());
  const ComplexMatrix fr = direct_frechet_operator(m.spec, m.solution, g);
  const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
  // i phi in stacked (Re, Im) coordinates.
  ComplexVector u(2 * g.size());
  u.head(g.size()) = (-phi.imag()).cast<cplx>();
  u.tail(g.size()) = phi.real().cast<cplx>();
  CHECK(interior_sup((fr * u).head(g.size()), g) < 1e-5);
  CHECK(interior_sup((fr * u).tail(g.size()), g) < 1e-5);
}
