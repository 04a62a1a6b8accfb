#include "ptsol/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fft.hpp"
#include "ptsol/error.hpp"

namespace ptsol {
namespace {

// integral_0^dz e^{-c t} dt
double decay_integral(double c, double dz) {
  return std::abs(c * dz) < 1e-300 ? dz : -std::expm1(-c * dz) / c;
}

double ipow(double base, int exponent) {
  double out = base;
  for (int k = 1; k < exponent; ++k) out *= base;
  return out;
}

PropagationDiagnostics diagnose(const ComplexField& psi, const RealVector& modulus0, double h) {
  PropagationDiagnostics d;
  double power = 0.0;
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const double m = std::abs(psi[j]);
    d.peak = std::max(d.peak, m);
    d.deviation = std::max(d.deviation, std::abs(m - modulus0[j]));
    power += m * m;
  }
  d.power = power * h;
  return d;
}

}  // namespace

PropagationRecord split_step(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                             const PropagationOptions& options) {
  validate(spec);
  if (initial.size() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "initial field length does not match grid");
  if (!(options.dz > 0.0) || !(options.z_end >= 0.0) || options.sample_every < 1)
    throw Error(ErrorCode::InvalidArgument, "need dz > 0, z_end >= 0 and sample_every >= 1");

  const long steps = std::lround(options.z_end / options.dz);
  const double dz = steps > 0 ? options.z_end / steps : options.dz;
  const int n = grid.size();
  const double h = grid.spacing();

  const PotentialSamples pot = sample_potential(spec, grid);
  ComplexVector half_diffraction(n);
  const RealVector k = grid.wavenumbers();
  for (int m = 0; m < n; ++m) half_diffraction[m] = std::polar(1.0, -k[m] * k[m] * dz / 2.0);

  // Per-point constants of the exact pointwise step.
  RealVector amp(n), i_cubic(n), i_power(n);
  for (int j = 0; j < n; ++j) {
    amp[j] = std::exp(-pot.w[j] * dz);
    i_cubic[j] = decay_integral(2.0 * pot.w[j], dz);
    i_power[j] = decay_integral(2.0 * spec.kappa * pot.w[j], dz);
  }

  // |Psi|^{2 kappa} by repeated products when kappa is a small integer.
  const int integer_power =
      spec.kappa == std::round(spec.kappa) && spec.kappa >= 1.0 && spec.kappa <= 8.0
          ? static_cast<int>(spec.kappa)
          : 0;

  RealVector modulus0(n);
  for (int j = 0; j < n; ++j) modulus0[j] = std::abs(initial[j]);
  const double peak0 = modulus0.maxCoeff();

  PropagationRecord record;
  ComplexField psi = initial;
  auto sample = [&](double z) {
    record.z.push_back(z);
    record.snapshots.push_back(psi);
    record.diagnostics.push_back(diagnose(psi, modulus0, h));
  };
  sample(0.0);

  for (long s = 1; s <= steps; ++s) {
    psi = detail::fft_inverse(half_diffraction.cwiseProduct(detail::fft_forward(psi)));
    for (int j = 0; j < n; ++j) {
      const double s0 = std::norm(psi[j]);
      const double high = integer_power > 0 ? ipow(s0, integer_power)
                          : s0 > 0.0        ? std::exp(spec.kappa * std::log(s0))
                                            : 0.0;
      const double phase = pot.v[j] * dz + spec.g1 * s0 * i_cubic[j] + spec.g2 * high * i_power[j];
      psi[j] *= amp[j] * std::polar(1.0, phase);
    }
    psi = detail::fft_inverse(half_diffraction.cwiseProduct(detail::fft_forward(psi)));

    const bool last = s == steps;
    if (s % options.sample_every == 0 || last) {
      sample(s * dz);
      const PropagationDiagnostics& d = record.diagnostics.back();
      if (!std::isfinite(d.peak) || d.peak > options.blowup_factor * peak0)
        throw Error(ErrorCode::StepUnstable,
                    "peak amplitude " + std::to_string(d.peak) + " at z = " + std::to_string(s * dz));
      if (options.stop_deviation && d.deviation > *options.stop_deviation) break;
    }
  }
  return record;
}

double step_halving_gap(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                        const PropagationOptions& options) {
  PropagationOptions coarse = options;
  coarse.stop_deviation.reset();
  coarse.sample_every = std::numeric_limits<int>::max();
  PropagationOptions fine = coarse;
  fine.dz = coarse.dz / 2.0;
  const ComplexField a = split_step(initial, spec, grid, coarse).snapshots.back();
  const ComplexField b = split_step(initial, spec, grid, fine).snapshots.back();
  return (a - b).cwiseAbs().maxCoeff();
}

void check_step_convergence(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                            const PropagationOptions& options, double tol) {
  const double gap = step_halving_gap(initial, spec, grid, options);
  if (!(gap <= tol))
    throw Error(ErrorCode::NonConvergedStep, "halving dz = " + std::to_string(options.dz) +
                                                 " changes the final field by " +
                                                 std::to_string(gap));
}

StepSelection select_step(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                          const PropagationOptions& options, double tol, int max_halvings) {
  PropagationOptions coarse = options;
  coarse.stop_deviation.reset();
  coarse.sample_every = std::numeric_limits<int>::max();
  ComplexField last = split_step(initial, spec, grid, coarse).snapshots.back();
  double gap = 0.0;
  for (int h = 0; h <= max_halvings; ++h) {
    PropagationOptions fine = coarse;
    fine.dz = coarse.dz / 2.0;
    ComplexField next = split_step(initial, spec, grid, fine).snapshots.back();
    gap = (last - next).cwiseAbs().maxCoeff();
    if (gap <= tol) return {coarse.dz, gap, h};
    coarse = fine;
    last = std::move(next);
  }
  throw Error(ErrorCode::NonConvergedStep,
              "step halving still changes the final field by " + std::to_string(gap) + " after " +
                  std::to_string(max_halvings) + " halvings of dz = " + std::to_string(options.dz));
}

ComplexField perturb(const ComplexField& reference, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexField out = reference;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const double xi = normal(rng);
    const double zeta = normal(rng);
    out[j] += amplitude * cplx(xi, zeta);
  }
  return out;
}

GrowthEstimate measure_growth(const PropagationRecord& record, const ComplexField& reference,
                              const Grid& grid, const GrowthOptions& options) {
  GrowthEstimate est;
  if (record.snapshots.empty()) return est;
  const RealVector ref = reference.cwiseAbs();
  const double scale = ref.maxCoeff();
  const double root_h = std::sqrt(grid.spacing());

  std::vector<double> dev(record.snapshots.size());
  for (std::size_t k = 0; k < dev.size(); ++k)
    dev[k] = root_h * (record.snapshots[k].cwiseAbs() - ref).norm();

  const double initial = std::max(dev.front(), options.floor_rel * scale);
  const double open = options.start_factor * initial;
  const double close = options.stop_fraction * scale;

  std::size_t first = dev.size();
  for (std::size_t k = 0; k < dev.size(); ++k) {
    if (dev[k] >= open) {
      first = k;
      break;
    }
  }
  if (first == dev.size()) return est;
  std::size_t last = first;
  while (last + 1 < dev.size() && dev[last + 1] <= close) ++last;
  if (dev[first] > close) return est;

  const int count = static_cast<int>(last - first + 1);
  if (count < 3) return est;
  double sz = 0.0, sy = 0.0, szz = 0.0, szy = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double z = record.z[k];
    const double y = std::log(dev[k]);
    sz += z;
    sy += y;
    szz += z * z;
    szy += z * y;
  }
  const double denom = count * szz - sz * sz;
  if (denom <= 0.0) return est;
  est.found = true;
  est.rate = (count * szy - sz * sy) / denom;
  est.z_start = record.z[first];
  est.z_stop = record.z[last];
  est.samples = count;
  return est;
}

}  // namespace ptsol
