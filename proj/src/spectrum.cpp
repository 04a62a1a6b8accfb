#include "ptsol/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <cblas.h>
#include <lapacke.h>

#include "ptsol/error.hpp"
#include "ptsol/linearization.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace ptsol {
namespace {

void single_threaded_blas() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

}  // namespace

std::vector<EigenPair> eig_dense(const ComplexMatrix& matrix) {
  if (matrix.rows() != matrix.cols())
    throw Error(ErrorCode::InvalidArgument, "eig_dense needs a square matrix");
  if (!matrix.allFinite())
    throw Error(ErrorCode::InvalidArgument, "eig_dense input has non-finite entries");
  single_threaded_blas();

  const lapack_int n = static_cast<lapack_int>(matrix.rows());
  ComplexMatrix work = matrix;
  ComplexVector values(n);
  ComplexMatrix vectors(n, n);
  cplx dummy;
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n,
                                        values.data(), &dummy, 1, vectors.data(), n);
  if (info > 0)
    throw Error(ErrorCode::NoConvergence,
                "QR iteration failed to converge (zgeev info " + std::to_string(info) + ")");
  if (info < 0)
    throw Error(ErrorCode::InvalidArgument, "zgeev argument " + std::to_string(-info));

  std::vector<EigenPair> out(n);
  for (lapack_int k = 0; k < n; ++k) {
    out[k].eta = values[k];
    out[k].vector = vectors.col(k).normalized();
  }
  return out;
}

double spectral_norm_estimate(const ComplexMatrix& matrix) {
  const Eigen::Index n = matrix.cols();
  if (n == 0) return 0.0;
  ComplexVector x(n);
  for (Eigen::Index j = 0; j < n; ++j) x[j] = cplx(1.0 + 0.5 * std::sin(1.0 + j), 0.25 * std::cos(j));
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 60; ++it) {
    const ComplexVector y = matrix * x;
    const ComplexVector z = matrix.adjoint() * y;
    const double znorm = z.norm();
    if (znorm == 0.0) return 0.0;
    const double next = std::sqrt(znorm);
    x = z / znorm;
    if (it > 5 && std::abs(next - estimate) <= 1e-10 * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

double tail_mass(const ComplexVector& u, const Grid& grid, double core_fraction) {
  const int n = grid.size();
  const double limit = core_fraction * grid.half_width();
  double total = 0.0;
  double tail = 0.0;
  for (int j = 0; j < n; ++j) {
    const double m = std::norm(u[j]) + (u.size() == 2 * n ? std::norm(u[n + j]) : 0.0);
    total += m;
    if (std::abs(grid.point(j)) >= limit) tail += m;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double boundary_mass(const ComplexVector& u, const Grid& grid, double boundary_fraction) {
  const int n = grid.size();
  const double limit = (1.0 - boundary_fraction) * grid.half_width();
  double total = 0.0;
  double edge = 0.0;
  for (int j = 0; j < n; ++j) {
    const double m = std::norm(u[j]) + (u.size() == 2 * n ? std::norm(u[n + j]) : 0.0);
    total += m;
    if (std::abs(grid.point(j)) >= limit) edge += m;
  }
  return total > 0.0 ? edge / total : 0.0;
}

Spectrum certified_spectrum(const ComplexMatrix& matrix, const Grid& grid,
                            const SpectrumOptions& options) {
  if (matrix.rows() != 2 * grid.size() && matrix.rows() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "matrix size does not match the grid");
  std::vector<EigenPair> pairs = eig_dense(matrix);
  const Eigen::Index n = matrix.rows();

  Spectrum out;
  out.matrix_norm = spectral_norm_estimate(matrix);

  // R = M U - U diag(eta), one GEMM for all pairs.
  ComplexMatrix basis(n, n);
  for (Eigen::Index k = 0; k < n; ++k) basis.col(k) = pairs[k].vector;
  ComplexMatrix applied(n, n);
  const cplx one(1.0), zero(0.0);
  cblas_zgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, int(n), int(n), int(n), &one,
              matrix.data(), int(n), basis.data(), int(n), &zero, applied.data(), int(n));

  cplx eta_sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const EigenPair& pair = pairs[k];
    eta_sum += pair.eta;
    out.spectral_radius = std::max(out.spectral_radius, std::abs(pair.eta));
    const double residual =
        (applied.col(k) - pair.eta * pair.vector).norm() / std::max(out.matrix_norm, 1e-300);
    if (!(residual <= options.residual_tol)) {
      ++out.rejected;
      continue;
    }
    CertifiedPair cp;
    cp.eta = pair.eta;
    cp.vector = pair.vector;
    cp.residual = residual;
    cp.tail_mass = tail_mass(pair.vector, grid, options.core_fraction);
    cp.boundary_mass = boundary_mass(pair.vector, grid, options.boundary_fraction);
    out.pairs.push_back(std::move(cp));
  }
  const cplx trace = matrix.trace();
  out.trace_defect =
      std::abs(eta_sum - trace) / std::max({std::abs(trace), out.matrix_norm, 1e-300});

  std::sort(out.pairs.begin(), out.pairs.end(), [](const CertifiedPair& l, const CertifiedPair& r) {
    if (l.eta.real() != r.eta.real()) return l.eta.real() < r.eta.real();
    return l.eta.imag() < r.eta.imag();
  });
  return out;
}

double ContinuousBand::distance(cplx eta) const {
  const double dx = std::abs(std::abs(eta.real()) - re_offset);
  const double dy = std::max(0.0, im_edge - std::abs(eta.imag()));
  return std::hypot(dx, dy);
}

cplx ContinuousBand::point(double k, int re_sign, int im_sign) const {
  return {re_sign * re_offset, im_sign * (k * k + im_edge)};
}

std::vector<cplx> ContinuousBand::edges() const {
  return {point(0, 1, 1), point(0, 1, -1), point(0, -1, 1), point(0, -1, -1)};
}

ContinuousBand continuous_band(const ModelSpec& spec, const StationarySolution& sol) {
  validate(spec);
  return {2.0 * std::abs(spec.b), sol.lambda};
}

const char* to_string(ModeClass cls) {
  switch (cls) {
    case ModeClass::Discrete: return "discrete";
    case ModeClass::Continuous: return "continuous";
    case ModeClass::Spurious: return "spurious";
  }
  return "unknown";
}

Partition separate_discrete(const Spectrum& spectrum, const ContinuousBand& band,
                            const SpectrumOptions& options) {
  Partition out;
  out.labels.reserve(spectrum.pairs.size());
  for (std::size_t k = 0; k < spectrum.pairs.size(); ++k) {
    const CertifiedPair& pair = spectrum.pairs[k];
    ModeClass cls = ModeClass::Discrete;
    if (pair.boundary_mass > options.boundary_threshold) {
      cls = ModeClass::Spurious;
    } else if (band.distance(pair.eta) < options.band_tol &&
               pair.tail_mass > options.tail_threshold) {
      cls = ModeClass::Continuous;
    }
    out.labels.push_back(cls);
    const int idx = static_cast<int>(k);
    switch (cls) {
      case ModeClass::Discrete: out.discrete.push_back(idx); break;
      case ModeClass::Continuous: out.continuous.push_back(idx); break;
      case ModeClass::Spurious: out.spurious.push_back(idx); break;
    }
  }
  return out;
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Unstable: return "unstable";
    case Verdict::OscillatoryInternal: return "oscillatory_internal";
    case Verdict::NeutrallyStable: return "neutrally_stable";
  }
  return "unknown";
}

StabilityReport classify(const std::vector<cplx>& discrete, const ClassifyTolerances& tol) {
  StabilityReport report;
  report.discrete = discrete;
  report.tol_instab = tol.instab();
  report.tol_zero = tol.zero();
  bool internal = false;
  double max_growth = discrete.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (const cplx& eta : discrete) {
    max_growth = std::max(max_growth, eta.real());
    if (std::abs(eta) < report.tol_zero) {
      ++report.zero_modes;
    } else if (std::abs(eta.real()) <= report.tol_instab) {
      internal = true;
    }
  }
  report.max_growth = max_growth;
  if (max_growth > report.tol_instab) {
    report.verdict = Verdict::Unstable;
  } else if (internal) {
    report.verdict = Verdict::OscillatoryInternal;
  } else {
    report.verdict = Verdict::NeutrallyStable;
  }
  return report;
}

double nearest_distance(const Spectrum& spectrum, cplx target) {
  double best = std::numeric_limits<double>::infinity();
  for (const CertifiedPair& pair : spectrum.pairs) best = std::min(best, std::abs(pair.eta - target));
  return best;
}

StabilityAnalysis analyze_stability(const SolvedModel& model, const Grid& grid,
                                    const SpectrumOptions& options) {
  const LinearizedOperator op = build_operators(model.spec, model.solution, grid);
  StabilityAnalysis out{model, grid, certified_spectrum(op.block, grid, options), {}, {}};
  const ContinuousBand band = continuous_band(model.spec, model.solution);
  out.partition = separate_discrete(out.spectrum, band, options);

  std::vector<cplx> discrete;
  for (int idx : out.partition.discrete) discrete.push_back(out.spectrum.pairs[idx].eta);
  out.report = classify(discrete, {out.spectrum.spectral_radius, options.instab_rel, options.zero_rel});
  out.report.continuous_band = band;

  out.report.pairing_defect = 0.0;
  out.report.conjugate_defect = 0.0;
  for (const cplx& eta : discrete) {
    if (std::abs(eta) <= out.report.tol_zero) continue;
    out.report.pairing_defect = std::max(out.report.pairing_defect, nearest_distance(out.spectrum, -eta));
    out.report.conjugate_defect =
        std::max(out.report.conjugate_defect, nearest_distance(out.spectrum, std::conj(eta)));
  }
  return out;
}

}  // namespace ptsol
