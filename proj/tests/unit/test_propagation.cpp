#include <doctest.h>

#include <cmath>

#include "models.hpp"
#include "ptsol/error.hpp"
#include "ptsol/propagation.hpp"

using namespace ptsol;
using namespace testing_models;

namespace {

ComplexField gaussian(const Grid& g, double amp, double width) {
  ComplexField f(g.size());
  for (int j = 0; j < g.size(); ++j) f[j] = amp * std::exp(-g.point(j) * g.point(j) / (width * width));
  return f;
}

}  // namespace

TEST_CASE("the exact soliton only rotates its phase") {
  Grid g(512, 16.0);
  const SolvedModel m = solve_constraints(fig1_knowns());
  const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
  PropagationOptions opt;
  opt.z_end = 5.0;
  opt.dz = 1e-3;
  opt.sample_every = 500;
  const PropagationRecord rec = split_step(phi, m.spec, g, opt);
  CHECK(rec.z.back() == doctest::Approx(5.0));
  for (const PropagationDiagnostics& d : rec.diagnostics) CHECK(d.deviation < 1e-3);
  // Psi(0, z) = phi0 e^{i lambda z}
  const cplx centre = rec.snapshots.back()[256];
  CHECK(std::abs(centre - std::polar(1.0, m.solution.lambda * 5.0)) < 1e-3);
}

TEST_CASE("power is conserved without gain and loss") {
  Grid g(256, 16.0);
  const ModelSpec s{0.01, 0.0, -4.0, 3.0, 2.0101, -4.0, Family::ClassI};
  PropagationOptions opt;
  opt.z_end = 1.0;
  opt.dz = 1e-3;
  opt.sample_every = 100;
  const PropagationRecord rec = split_step(gaussian(g, 0.5, 2.0), s, g, opt);
  const double p0 = rec.diagnostics.front().power;
  for (const PropagationDiagnostics& d : rec.diagnostics) CHECK(std::abs(d.power - p0) <= 1e-10 * p0);
}

TEST_CASE("even data stays even for a real potential") {
  Grid g(256, 16.0);
  const ModelSpec s{0.01, 0.0, -4.0, 3.0, 2.0101, -4.0, Family::ClassI};
  PropagationOptions opt;
  opt.z_end = 0.5;
  opt.sample_every = 500;
  const ComplexField end = split_step(gaussian(g, 0.8, 1.5), s, g, opt).snapshots.back();
  double asym = 0.0;
  for (int j = 1; j < g.size(); ++j) asym = std::max(asym, std::abs(std::abs(end[j]) - std::abs(end[g.mirror(j)])));
  CHECK(asym < 1e-12);
}

TEST_CASE("step halving") {
  Grid g(256, 16.0);
  const SolvedModel m = solve_constraints(fig1_knowns());
  const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
  PropagationOptions opt;
  opt.z_end = 0.5;
  opt.dz = 1e-3;
  CHECK(step_halving_gap(phi, m.spec, g, opt) < 1e-6);
  CHECK_NOTHROW(check_step_convergence(phi, m.spec, g, opt, 1e-6));

  opt.dz = 0.1;
  CHECK_THROWS_AS(check_step_convergence(phi, m.spec, g, opt, 1e-6), Error);
  try {
    check_step_convergence(phi, m.spec, g, opt, 1e-6);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergedStep);
  }
}

TEST_CASE("step selection halves dz until the gate passes") {
  Grid g(256, 16.0);
  const SolvedModel m = solve_constraints(fig1_knowns());
  const ComplexField phi = evaluate_solution(m.spec, m.solution, g);
  PropagationOptions opt;
  opt.z_end = 0.5;
  opt.dz = 0.02;
  const StepSelection step = select_step(phi, m.spec, g, opt, 1e-6, 10);
  CHECK(step.halvings > 0);
  CHECK(step.dz == doctest::Approx(0.02 / (1 << step.halvings)));
  CHECK(step.gap <= 1e-6);
  opt.dz = step.dz;
  CHECK(step_halving_gap(phi, m.spec, g, opt) == doctest::Approx(step.gap));
  opt.dz = 0.02;
  CHECK_THROWS_AS(select_step(phi, m.spec, g, opt, 1e-6, 1), Error);
}

TEST_CASE("unbounded linear gain is reported as StepUnstable") {
  Grid g(128, 16.0);
  // No nonlinearity: a flat field grows like e^{0.6 z} on the gain side.
  const ModelSpec s{0.01, 0.3, 0.0, 3.0, 0.0, 0.0, Family::ClassI};
  PropagationOptions opt;
  opt.z_end = 20.0;
  opt.dz = 1e-2;
  ErrorCode code = ErrorCode::InvalidArgument;
  try {
    split_step(ComplexField::Ones(g.size()), s, g, opt);
  } catch (const Error& e) {
    code = e.code();
  }
  CHECK(code == ErrorCode::StepUnstable);
}

TEST_CASE("perturbation is reproducible from its seed") {
  Grid g(64, 8.0);
  const ComplexField ref = gaussian(g, 1.0, 1.0);
  CHECK(perturb(ref, 1e-3, 42) == perturb(ref, 1e-3, 42));
  CHECK(perturb(ref, 1e-3, 42) != perturb(ref, 1e-3, 43));
  CHECK((perturb(ref, 1e-3, 42) - ref).cwiseAbs().maxCoeff() < 1e-2);
}

namespace {

// |Psi| = ref + eps e^{rate z} bump: the modulus deviation grows at exactly `rate`.
PropagationRecord synthetic_record(const Grid& g, const ComplexField& ref, double eps, double rate) {
  PropagationRecord rec;
  const ComplexField bump = gaussian(g, 1.0, 1.0);
  for (int k = 0; k <= 100; ++k) {
    const double z = 0.5 * k;
    rec.z.push_back(z);
    rec.snapshots.push_back(ref + eps * std::exp(rate * z) * bump);
  }
  return rec;
}

}  // namespace

TEST_CASE("growth window on a synthetic exponential") {
  Grid g(256, 16.0);
  ComplexField ref(g.size());
  for (int j = 0; j < g.size(); ++j) ref[j] = 1.0 / std::cosh(g.point(j));
  const GrowthEstimate est = measure_growth(synthetic_record(g, ref, 1e-6, 0.3), ref, g);
  REQUIRE(est.found);
  CHECK(est.rate == doctest::Approx(0.3).epsilon(1e-3 / 0.3));
  CHECK(est.samples >= 3);
  CHECK(est.z_start < est.z_stop);

  const GrowthEstimate none = measure_growth(synthetic_record(g, ref, 0.0, 0.3), ref, g);
  CHECK_FALSE(none.found);
  CHECK(none.rate == 0.0);
}
