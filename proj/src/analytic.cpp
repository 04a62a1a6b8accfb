#include "ptsol/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "ptsol/error.hpp"

namespace ptsol {

const char* to_string(Family family) {
  return family == Family::ClassI ? "class_i" : "class_ii";
}

double ModelSpec::well_exponent() const {
  return family == Family::ClassI ? 2.0 * kappa : 2.0 / kappa;
}

double ModelSpec::profile_exponent() const {
  return family == Family::ClassI ? 1.0 : 1.0 / kappa;
}

double ModelSpec::carrier_wavenumber() const {
  return family == Family::ClassI ? b : b * kappa;
}

void validate(const ModelSpec& spec) {
  for (double value : {spec.a, spec.b, spec.v1, spec.kappa, spec.g1, spec.g2}) {
    if (!std::isfinite(value))
      throw Error(ErrorCode::InvalidArgument, "model parameters must be finite");
  }
  if (spec.kappa == 0.0) throw Error(ErrorCode::KappaZero, "kappa must be nonzero");
}

namespace {

// ln sech x, stable for large |x|.
double log_sech(double x) {
  const double ax = std::abs(x);
  return -(ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2);
}

bool close_rel(double lhs, double rhs, double tol) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return std::abs(lhs - rhs) <= tol * scale;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Both families share the shape
//   V1 = gp * phi0^ep          ("product" relation)
//   gq * phi0^eq = c           ("constant" relation)
// with the roles of g1/g2 and the exponents swapped between them.
struct RelationLayout {
  std::optional<double> Knowns::*gp;
  std::optional<double> Knowns::*gq;
  const char* gp_name;
  const char* gq_name;
  double ep;
  double eq;
  double c;
};

RelationLayout layout_for(const Knowns& k) {
  if (k.family == Family::ClassI) {
    return {&Knowns::g2, &Knowns::g1, "g2", "g1", 2.0 * k.kappa, 2.0, k.a * k.a + k.a + 2.0};
  }
  return {&Knowns::g1, &Knowns::g2, "g1", "g2", 2.0, 2.0 * k.kappa,
          k.a * (k.a + 1.0) + 1.0 / k.kappa + 1.0 / (k.kappa * k.kappa)};
}

}  // namespace

SolvedModel solve_constraints(const Knowns& knowns) {
  for (double value : {knowns.a, knowns.b, knowns.kappa}) {
    if (!std::isfinite(value))
      throw Error(ErrorCode::InvalidArgument, "a, b and kappa must be finite");
  }
  if (knowns.kappa == 0.0) throw Error(ErrorCode::KappaZero, "kappa must be nonzero");

  const RelationLayout rel = layout_for(knowns);
  const std::optional<double>& gp = knowns.*(rel.gp);
  const std::optional<double>& gq = knowns.*(rel.gq);
  const std::optional<double>& v1 = knowns.v1;
  const std::optional<double>& phi0 = knowns.phi0;

  const int given = int(phi0.has_value()) + int(gp.has_value()) + int(gq.has_value()) +
                    int(v1.has_value());
  if (given < 2)
    throw Error(ErrorCode::UnderDetermined,
                "need at least two of {phi0, g1, g2, v1}; got " + std::to_string(given));

  // Sign feasibility of every even power of phi0 that the knowns pin down.
  if (phi0 && !(*phi0 > 0.0))
    throw Error(ErrorCode::InfeasibleAmplitude, "phi0 must be positive, got " + fmt(*phi0));
  if (gq) {
    if (*gq == 0.0 || !(rel.c / *gq > 0.0))
      throw Error(ErrorCode::InfeasibleAmplitude,
                  std::string("phi0 power ") + fmt(rel.eq) + " = " + fmt(rel.c) + "/" +
                      rel.gq_name + " is not positive (" + rel.gq_name + " = " + fmt(*gq) + ")");
  }
  if (v1 && gp) {
    if (*gp == 0.0 ? *v1 != 0.0 : !(*v1 / *gp > 0.0))
      throw Error(ErrorCode::InfeasibleAmplitude,
                  std::string("phi0 power ") + fmt(rel.ep) + " = v1/" + rel.gp_name +
                      " is not positive (v1 = " + fmt(*v1) + ", " + rel.gp_name + " = " +
                      fmt(*gp) + ")");
  }

  double amplitude = 0.0;
  if (phi0) {
    amplitude = *phi0;
  } else if (gq) {
    amplitude = std::pow(rel.c / *gq, 1.0 / rel.eq);
  } else if (v1 && gp && *gp != 0.0) {
    amplitude = std::pow(*v1 / *gp, 1.0 / rel.ep);
  } else {
    throw Error(ErrorCode::UnderDetermined, "the knowns do not determine phi0");
  }

  // Constant relation.
  double gq_value = 0.0;
  if (gq) {
    const double implied = rel.c / std::pow(amplitude, rel.eq);
    if (!close_rel(*gq, implied, kConstraintTolerance))
      throw Error(ErrorCode::OverDetermined, std::string(rel.gq_name) + " = " + fmt(*gq) +
                                                 " contradicts phi0 = " + fmt(amplitude) +
                                                 " (requires " + fmt(implied) + ")");
    gq_value = *gq;
  } else {
    gq_value = rel.c / std::pow(amplitude, rel.eq);
  }

  // Product relation.
  const double power = std::pow(amplitude, rel.ep);
  double gp_value = 0.0;
  double v1_value = 0.0;
  if (v1 && gp) {
    if (!close_rel(*v1, *gp * power, kConstraintTolerance))
      throw Error(ErrorCode::OverDetermined, "v1 = " + fmt(*v1) + " and " + rel.gp_name + " = " +
                                                 fmt(*gp) + " contradict phi0 = " +
                                                 fmt(amplitude));
    gp_value = *gp;
    v1_value = *v1;
  } else if (v1) {
    gp_value = *v1 / power;
    v1_value = *v1;
  } else if (gp) {
    gp_value = *gp;
    v1_value = *gp * power;
  } else {
    throw Error(ErrorCode::UnderDetermined,
                std::string("neither v1 nor ") + rel.gp_name + " is given");
  }

  SolvedModel out;
  out.spec.family = knowns.family;
  out.spec.a = knowns.a;
  out.spec.b = knowns.b;
  out.spec.kappa = knowns.kappa;
  out.spec.v1 = v1_value;
  if (knowns.family == Family::ClassI) {
    out.spec.g1 = gq_value;
    out.spec.g2 = gp_value;
  } else {
    out.spec.g1 = gp_value;
    out.spec.g2 = gq_value;
  }
  out.solution.family = knowns.family;
  out.solution.phi0 = amplitude;
  out.solution.mu = out.spec.carrier_wavenumber();
  const double base = knowns.family == Family::ClassI ? 1.0 : 1.0 / (knowns.kappa * knowns.kappa);
  out.solution.lambda = base - out.solution.mu * out.solution.mu;
  return out;
}

PotentialSamples sample_potential(const ModelSpec& spec, const Grid& grid) {
  validate(spec);
  const int n = grid.size();
  const double depth = spec.a * (spec.a + 1.0);
  const double exponent = spec.well_exponent();
  PotentialSamples out{RealVector(n), RealVector(n)};
  for (int j = 0; j < n; ++j) {
    const double x = grid.point(j);
    const double ls = log_sech(x);
    out.v[j] = -depth * std::exp(2.0 * ls) - spec.v1 * std::exp(exponent * ls);
    out.w[j] = 2.0 * spec.b * std::tanh(x);
  }
  return out;
}

ComplexField evaluate_solution(const ModelSpec& spec, const StationarySolution& sol,
                               const Grid& grid) {
  validate(spec);
  if (sol.family != spec.family)
    throw Error(ErrorCode::InvalidArgument, "solution and model belong to different families");
  if (spec.family == Family::ClassII && spec.kappa < 0.0)
    throw Error(ErrorCode::NonLocalizable,
                "class II profile sech^{1/kappa} grows at infinity for kappa < 0");
  const double p = spec.profile_exponent();
  ComplexField field(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.point(j);
    field[j] = sol.phi0 * std::exp(p * log_sech(x)) * std::polar(1.0, sol.mu * x);
  }
  return field;
}

RealVector modulus_power(const ComplexField& field, double kappa) {
  RealVector out(field.size());
  for (Eigen::Index j = 0; j < field.size(); ++j) {
    const double s = std::norm(field[j]);
    out[j] = s > 0.0 ? std::exp(kappa * std::log(s)) : (kappa > 0.0 ? 0.0 : HUGE_VAL);
  }
  return out;
}

ResidualReport stationary_residual(const ComplexField& field, const ModelSpec& spec,
                                   double lambda, const Grid& grid) {
  if (field.size() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "field length does not match grid");
  const PotentialSamples pot = sample_potential(spec, grid);
  const ComplexField second = corrected_derivative(field, grid, 2);
  const RealVector high = modulus_power(field, spec.kappa);

  ResidualReport report;
  const double limit = kInteriorFraction * grid.half_width();
  for (int j = 0; j < grid.size(); ++j) {
    if (std::abs(grid.point(j)) > limit) continue;
    const cplx phi = field[j];
    const cplx lhs = second[j] + cplx(pot.v[j], pot.w[j]) * phi +
                     spec.g1 * std::norm(phi) * phi + spec.g2 * high[j] * phi;
    report.sup_norm = std::max(report.sup_norm, std::abs(lhs - lambda * phi));
  }
  report.boundary_modulus = std::max(std::abs(field[0]), std::abs(field[grid.size() - 1]));
  report.grid_too_coarse = report.boundary_modulus > kBoundaryAdvisory;
  return report;
}

PowerFlowProfile power_flow(const ComplexField& field, const Grid& grid) {
  const ComplexField first = corrected_derivative(field, grid, 1);
  PowerFlowProfile out{RealVector(field.size())};
  for (Eigen::Index j = 0; j < field.size(); ++j)
    out.values[j] = std::imag(std::conj(field[j]) * first[j]);
  return out;
}

}  // namespace ptsol
