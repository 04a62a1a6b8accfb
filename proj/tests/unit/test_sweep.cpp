#include <doctest.h>

#include <cmath>
#include <set>

#include "models.hpp"
#include "ptsol/error.hpp"
#include "ptsol/sweep.hpp"

using namespace ptsol;
using namespace testing_models;

namespace {

// Hand-built sweep: one point per value, discrete modes given directly.
SweepResult synthetic_sweep(const std::vector<double>& values,
                            const std::vector<std::vector<cplx>>& modes) {
  SweepResult s;
  s.parameter = "t";
  s.values = values;
  for (std::size_t k = 0; k < values.size(); ++k) {
    SweepPoint p;
    p.value = values[k];
    p.report = StabilityReport{};
    for (cplx eta : modes[k]) {
      ComplexVector u = ComplexVector::Zero(4);
      u[0] = 1.0;
      p.discrete.push_back({eta, u});
    }
    s.points.push_back(std::move(p));
  }
  s.trajectories = build_trajectories(s.points, 0.1);
  return s;
}

// eta(t) = +-(0.05 - t) for t < 0.05, then +-i (t - 0.05).
SweepResult crossing(bool reversed) {
  std::vector<double> values;
  std::vector<std::vector<cplx>> modes;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.01 * k;
    const cplx eta = t < 0.05 ? cplx(0.05 - t, 0.0) : cplx(0.0, t - 0.05);
    values.push_back(t);
    modes.push_back({eta, -eta, cplx(1e-7, 0.0)});
  }
  if (reversed) {
    std::reverse(values.begin(), values.end());
    std::reverse(modes.begin(), modes.end());
  }
  return synthetic_sweep(values, modes);
}

}  // namespace

TEST_CASE("set_parameter") {
  Knowns k = fig1_knowns();
  set_parameter(k, "a", 0.2);
  set_parameter(k, "g1", 3.0);
  CHECK(k.a == 0.2);
  CHECK(*k.g1 == 3.0);
  CHECK_THROWS_AS(set_parameter(k, "alpha", 1.0), Error);
}

TEST_CASE("synthetic crossing gives one event") {
  const auto events = detect_bifurcation(crossing(false));
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == TransitionKind::RealToImaginary);
  CHECK(events[0].param_low == doctest::Approx(0.04));
  CHECK(events[0].param_high == doctest::Approx(0.06));
  CHECK(events[0].real_pair[0].real() > 0.0);
  CHECK(std::abs(events[0].real_pair[0] + events[0].real_pair[1]) < 1e-12);
  CHECK(std::abs(events[0].imaginary_pair[0] - cplx(0, 0.01)) < 1e-12);
}

TEST_CASE("reversing the sweep swaps the bracket") {
  const auto fwd = detect_bifurcation(crossing(false));
  const auto rev = detect_bifurcation(crossing(true));
  REQUIRE(fwd.size() == 1);
  REQUIRE(rev.size() == 1);
  CHECK(rev[0].kind == TransitionKind::ImaginaryToReal);
  CHECK(rev[0].param_low == doctest::Approx(fwd[0].param_high));
  CHECK(rev[0].param_high == doctest::Approx(fwd[0].param_low));
}

TEST_CASE("constant spectra and persistent zero modes give no events") {
  std::vector<double> values;
  std::vector<std::vector<cplx>> modes;
  for (int k = 0; k < 8; ++k) {
    values.push_back(k);
    modes.push_back({cplx(0.3, 0), cplx(-0.3, 0), cplx(0, 0.7), cplx(0, -0.7), cplx(1e-6, 0), cplx(-1e-6, 0)});
  }
  CHECK(detect_bifurcation(synthetic_sweep(values, modes)).empty());
}

TEST_CASE("trajectory matching is one-to-one") {
  const SweepResult s = crossing(false);
  std::set<std::pair<int, int>> used;
  std::size_t nodes = 0;
  for (const Trajectory& t : s.trajectories) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(used.insert({t[k].point, t[k].mode}).second);
      if (k > 0) CHECK(t[k].point > t[k - 1].point);
      ++nodes;
    }
  }
  std::size_t modes = 0;
  for (const SweepPoint& p : s.points) modes += p.discrete.size();
  CHECK(nodes == modes);
}

TEST_CASE("single-step sweep") {
  Grid g(64, 12.0);
  const SweepResult s = run_sweep(fig2_knowns(0.03), g, "a", 0.03, 0.09, 1);
  REQUIRE(s.points.size() == 1);
  CHECK(s.points[0].ok());
  for (const Trajectory& t : s.trajectories) CHECK(t.size() == 1);
}

TEST_CASE("sweep over b reports lambda = 1 - b^2") {
  Grid g(64, 12.0);
  SweepOptions opts;
  opts.workers = 2;
  const SweepResult s = run_sweep(fig1_knowns(), g, "b", 0.0, 0.4, 3, opts);
  REQUIRE(s.points.size() == 3);
  for (const SweepPoint& p : s.points) {
    REQUIRE(p.ok());
    CHECK(p.model->solution.lambda == doctest::Approx(1.0 - p.value * p.value).epsilon(1e-14));
  }
}

TEST_CASE("per-point failures are recorded, not thrown") {
  Grid g(64, 12.0);
  const SweepResult s = run_sweep_values(fig1_knowns(), g, "v1", {-4.0, 4.0}, {});
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[0].ok());
  CHECK_FALSE(s.points[1].ok());
  CHECK(s.points[1].error.find("InfeasibleAmplitude") != std::string::npos);
  CHECK_THROWS_AS(run_sweep_values(fig1_knowns(), g, "nope", {1.0}, {}), Error);
}

TEST_CASE("results do not depend on the worker count") {
  Grid g(64, 12.0);
  SweepOptions one, three;
  one.workers = 1;
  three.workers = 3;
  const SweepResult a = run_sweep(fig2_knowns(0.03), g, "a", 0.03, 0.09, 4, one);
  const SweepResult b = run_sweep(fig2_knowns(0.03), g, "a", 0.03, 0.09, 4, three);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    REQUIRE(a.points[k].discrete.size() == b.points[k].discrete.size());
    for (std::size_t m = 0; m < a.points[k].discrete.size(); ++m)
      CHECK(a.points[k].discrete[m].eta == b.points[k].discrete[m].eta);
  }
}
