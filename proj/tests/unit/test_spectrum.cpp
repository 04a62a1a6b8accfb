#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "models.hpp"
#include "ptsol/error.hpp"
#include "ptsol/linearization.hpp"
#include "ptsol/spectrum.hpp"

using namespace ptsol;
using namespace testing_models;

TEST_CASE("eig_dense on small matrices") {
  const auto id = eig_dense(ComplexMatrix::Identity(4, 4));
  REQUIRE(id.size() == 4);
  for (const EigenPair& p : id) CHECK(std::abs(p.eta - 1.0) < 1e-14);

  ComplexMatrix rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;
  auto r = eig_dense(rot);
  std::sort(r.begin(), r.end(), [](const EigenPair& a, const EigenPair& b) { return a.eta.imag() < b.eta.imag(); });
  CHECK(std::abs(r[0].eta - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(r[1].eta - cplx(0, 1)) < 1e-14);
  for (const EigenPair& p : r) CHECK(p.vector.norm() == doctest::Approx(1.0));
}

TEST_CASE("eig_dense satisfies the trace identity and the residual bound") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  ComplexMatrix a(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) a(i, j) = cplx(normal(rng), normal(rng));
  const auto pairs = eig_dense(a);
  cplx sum = 0.0;
  for (const EigenPair& p : pairs) sum += p.eta;
  CHECK(std::abs(sum - a.trace()) <= 1e-10 * std::abs(a.trace()));
  const double norm = spectral_norm_estimate(a);
  for (const EigenPair& p : pairs) CHECK((a * p.vector - p.eta * p.vector).norm() <= 1e-8 * norm);
}

TEST_CASE("eig_dense rejects bad input") {
  ComplexMatrix a = ComplexMatrix::Identity(3, 3);
  a(1, 2) = std::nan("");
  CHECK_THROWS_AS(eig_dense(a), Error);
  CHECK_THROWS_AS(eig_dense(ComplexMatrix::Zero(2, 3)), Error);
}

TEST_CASE("spectral norm estimate") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = cplx(0, -5.0);
  d(2, 2) = 1.0;
  CHECK(spectral_norm_estimate(d) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("continuous band locus") {
  ModelSpec s{0.01, 0.3, -4.0, 3.0, 2.0101, -4.0, Family::ClassI};
  StationarySolution sol{1.0, 0.3, 0.91, Family::ClassI};
  const ContinuousBand band = continuous_band(s, sol);
  CHECK(band.re_offset == doctest::Approx(0.6));
  CHECK(band.im_edge == doctest::Approx(0.91));
  CHECK(band.distance(cplx(0.6, 5.0)) == doctest::Approx(0.0));
  CHECK(band.distance(cplx(-0.6, -0.91)) == doctest::Approx(0.0));
  CHECK(band.distance(cplx(0.6, 0.5)) == doctest::Approx(0.41));
  CHECK(band.distance(cplx(0.0, 2.0)) == doctest::Approx(0.6));
  // k = 0 endpoints
  const auto edges = band.edges();
  REQUIRE(edges.size() == 4);
  CHECK(std::abs(edges[0] - cplx(0.6, 0.91)) < 1e-15);
  CHECK(std::abs(band.point(2.0, -1, -1) - cplx(-0.6, -4.91)) < 1e-15);

  s.b = 0.0;
  sol.mu = 0.0;
  sol.lambda = 1.0;
  const ContinuousBand flat = continuous_band(s, sol);
  CHECK(flat.re_offset == 0.0);
  CHECK(flat.distance(cplx(0.0, 1.5)) == 0.0);
}

namespace {

CertifiedPair synthetic(cplx eta, const ComplexVector& u, const Grid& g) {
  CertifiedPair p;
  p.eta = eta;
  p.vector = u.normalized();
  p.tail_mass = tail_mass(p.vector, g, 0.2);
  p.boundary_mass = boundary_mass(p.vector, g, 0.05);
  return p;
}

}  // namespace

TEST_CASE("mode separation buckets") {
  Grid g(128, 16.0);
  const int n = g.size();
  const ContinuousBand band{0.6, 0.91};

  // Zero mode (0, phi): localized.
  ComplexVector zero = ComplexVector::Zero(2 * n);
  for (int j = 0; j < n; ++j) zero[n + j] = 1.0 / std::cosh(g.point(j));
  // Plane wave on the band.
  ComplexVector wave(2 * n);
  for (int j = 0; j < n; ++j) wave[j] = wave[n + j] = std::polar(1.0, 2.0 * g.point(j));
  // Supported on the outermost 4 points.
  ComplexVector edge = ComplexVector::Zero(2 * n);
  edge[0] = edge[1] = edge[n - 1] = edge[n - 2] = 1.0;

  Spectrum s;
  s.pairs = {synthetic(0.0, zero, g), synthetic(cplx(0.6, 4.91), wave, g),
             synthetic(cplx(0.6, 3.0), edge, g)};
  const Partition part = separate_discrete(s, band);
  REQUIRE(part.labels.size() == 3);
  CHECK(part.labels[0] == ModeClass::Discrete);
  CHECK(part.labels[1] == ModeClass::Continuous);
  CHECK(part.labels[2] == ModeClass::Spurious);
  CHECK(part.discrete.size() + part.continuous.size() + part.spurious.size() == 3);

  // Off the band, a delocalized vector is not continuous.
  s.pairs[1].eta = cplx(0.3, 4.91);
  CHECK(separate_discrete(s, band).labels[1] == ModeClass::Discrete);
}

TEST_CASE("classification") {
  const ClassifyTolerances tol{1.0, 1e-6, 1e-4};
  StabilityReport r = classify({0.0, 0.2, -0.2}, tol);
  CHECK(r.verdict == Verdict::Unstable);
  CHECK(r.max_growth == doctest::Approx(0.2));
  CHECK(r.zero_modes == 1);

  r = classify({0.0, cplx(0, 0.5), cplx(0, -0.5)}, tol);
  CHECK(r.verdict == Verdict::OscillatoryInternal);

  r = classify({0.0}, tol);
  CHECK(r.verdict == Verdict::NeutrallyStable);
  CHECK(r.zero_modes == 1);

  // Tolerances scale with the spectral radius.
  r = classify({cplx(1e-4, 0.0)}, ClassifyTolerances{1000.0, 1e-6, 1e-4});
  CHECK(r.tol_instab == doctest::Approx(1e-3));
  CHECK(r.verdict == Verdict::NeutrallyStable);
}

TEST_CASE("certified spectrum of a small linearization") {
  Grid g(128, 16.0);
  const SolvedModel m = solve_constraints(fig4a_knowns());
  const StabilityAnalysis a = analyze_stability(m, g);
  CHECK(a.spectrum.rejected == 0);
  CHECK(a.spectrum.trace_defect < 1e-10);
  for (const CertifiedPair& p : a.spectrum.pairs) {
    CHECK(p.residual <= 1e-8);
    CHECK(p.vector.norm() == doctest::Approx(1.0));
  }
  CHECK(a.partition.labels.size() == a.spectrum.pairs.size());
  CHECK(nearest_distance(a.spectrum, 0.0) <= 1e-4 * a.spectrum.spectral_radius);
  CHECK(a.report.verdict == Verdict::Unstable);
  CHECK(a.report.pairing_defect <= 1e-6 * a.spectrum.spectral_radius);
  CHECK(a.report.conjugate_defect >= 0.0);
  // Sorted by real part, then imaginary part.
  for (std::size_t k = 1; k < a.spectrum.pairs.size(); ++k) {
    const cplx l = a.spectrum.pairs[k - 1].eta, r = a.spectrum.pairs[k].eta;
    CHECK((l.real() < r.real() || (l.real() == r.real() && l.imag() <= r.imag())));
  }
}
