#include "wvsim/pointer.hpp"

#include <cmath>
#include <limits>

namespace wvsim {

namespace {

constexpr double kPlanck = 6.62607015e-34;     // J s, exact SI
constexpr double kLightSpeed = 299792458.0;    // m/s, exact SI

double gaussian_wavefunction(double x, double center, double sigma) {
  const double norm = std::pow(2.0 * M_PI * sigma * sigma, -0.25);
  const double d = x - center;
  return norm * std::exp(-d * d / (4.0 * sigma * sigma));
}

void validate_grid(const GaussianPointer& p) {
  if (!p.grid) return;
  if (p.grid->n < 256) throw InvalidArgumentError("pointer grid needs at least 256 points");
  if (p.grid->hi - p.grid->lo < 8.0 * p.sigma) {
    throw InvalidArgumentError("pointer grid needs at least 8 sigma of support");
  }
}

// exp(z) - 1 without precision loss for small |z|.
Complex complex_expm1(Complex z) {
  const double c = std::cos(z.imag());
  const double re = std::expm1(z.real()) * c - 2.0 * std::pow(std::sin(z.imag() / 2.0), 2);
  const double im = std::exp(z.real()) * std::sin(z.imag());
  return Complex(re, im);
}

}  // namespace

Complex gaussian_overlap(Complex s, Complex t, double sigma) {
  Complex d = std::conj(s) - t;
  return std::exp(-d * d / (8.0 * sigma * sigma));
}

BranchedState couple_exact(const StateVector& pre, const Operator& op,
                           const GaussianPointer& pointer, double lambda) {
  if (op.basis != pre.basis) throw BasisMismatchError("operator/state basis mismatch");
  if (!(pointer.sigma > 0.0)) throw InvalidArgumentError("pointer sigma must be positive");
  if (!std::isfinite(lambda)) throw InvalidArgumentError("lambda must be finite");
  if (std::abs(pre.norm() - 1.0) > 1e-9) {
    throw InvalidArgumentError("coupling requires a normalized preselection state");
  }
  validate_grid(pointer);
  EigenDecomposition ed = eigh(op);

  BranchedState b;
  b.lambda = lambda;
  b.pointer = pointer;
  b.basis = pre.basis;
  b.eigenvectors = ed.eigenvectors;
  double total = 0.0;
  for (Index k = 0; k < ed.eigenvalues.size(); ++k) {
    Complex c = ed.eigenvectors.col(k).dot(pre.amps);
    b.branches.push_back(Branch{c, ed.eigenvalues(k), lambda * ed.eigenvalues(k)});
    total += std::norm(c);
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error("branch coefficients do not resolve the preselection state");
  }
  return b;
}

PointerOutcome postselect_pointer(const BranchedState& b, const StateVector& post) {
  if (post.basis != b.basis) throw BasisMismatchError("postselection basis mismatch");
  const auto n = static_cast<Index>(b.branches.size());
  const double sigma = b.pointer.sigma;
  const double mu = b.pointer.mean;

  Vector a(n);
  double amax = 0.0;
  for (Index k = 0; k < n; ++k) {
    Complex pk = post.amps.dot(b.eigenvectors.col(k));
    a(k) = pk * b.branches[static_cast<std::size_t>(k)].coefficient;
    amax = std::max(amax, std::abs(a(k)));
  }
  if (amax <= 1e-15) {
    throw NoClickError("all postselected branch coefficients vanish");
  }

  Complex p_acc = 0.0, x_acc = 0.0, x2_acc = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double sj = b.branches[static_cast<std::size_t>(j)].shift;
    for (Index k = 0; k < n; ++k) {
      const double sk = b.branches[static_cast<std::size_t>(k)].shift;
      Complex w = std::conj(a(j)) * a(k) * gaussian_overlap(sj, sk, sigma);
      const double center = mu + (sj + sk) / 2.0;
      p_acc += w;
      x_acc += w * center;
      x2_acc += w * (sigma * sigma + center * center);
    }
  }
  const double p = std::max(0.0, p_acc.real());
  if (p <= 0.0) throw NoClickError("postselected pointer state has zero norm");

  PointerOutcome out;
  out.success_probability = std::min(1.0, p);
  const double mean_abs = x_acc.real() / p;
  out.mean_shift = mean_abs - mu;
  out.variance = x2_acc.real() / p - mean_abs * mean_abs;

  Complex den = a.sum();
  if (std::abs(den) <= kOrthoEps) {
    out.weak_val = Complex(std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN());
    out.first_order_mean_shift = std::numeric_limits<double>::quiet_NaN();
    out.residual_norm = std::numeric_limits<double>::quiet_NaN();
  } else {
    Complex num = 0.0;
    for (Index k = 0; k < n; ++k) {
      num += a(k) * b.branches[static_cast<std::size_t>(k)].eigenvalue;
    }
    const Complex w = num / den;
    out.weak_val = w;
    out.first_order_mean_shift = b.lambda * w.real();

    // First-order pointer state: the Gaussian analytically translated by
    // lambda * O_w. The distance is phase-invariant and is computed through
    // the Cauchy-Schwarz gap Q = |chi_e|^2 |chi_1|^2 - |<chi_e|chi_1>|^2,
    // whose terms expand with expm1 so residuals of order lambda^2 stay
    // resolvable far below the naive 1 - cos floor:
    //   Q = sum_jk conj(a_j) a_k <phi_sj|phi_t><phi_t|phi_sk>
    //                         * expm1((s_j - conj(t))(s_k - t) / 4 sigma^2).
    const Complex target = b.lambda * w;
    const double s8 = 8.0 * sigma * sigma;
    const double s4 = 4.0 * sigma * sigma;
    const double norm1_sq = gaussian_overlap(target, target, sigma).real();
    Complex gap = 0.0;
    for (Index j = 0; j < n; ++j) {
      const Complex dj = b.branches[static_cast<std::size_t>(j)].shift - target;
      for (Index k = 0; k < n; ++k) {
        const Complex dk = b.branches[static_cast<std::size_t>(k)].shift - target;
        const Complex e1 = std::exp(-(dj * dj + std::conj(dk * dk)) / s8);
        const Complex e2 = complex_expm1(std::conj(dj) * dk / s4);
        gap += std::conj(a(j)) * a(k) * e1 * e2;
      }
    }
    const double q = std::min(1.0, std::max(0.0, gap.real() / (p * norm1_sq)));
    const double one_minus_cos = q / (1.0 + std::sqrt(1.0 - q));
    out.residual_norm = std::sqrt(2.0 * one_minus_cos);
  }

  if (b.pointer.grid) {
    const auto& g = *b.pointer.grid;
    GriddedDensity d;
    d.lo = g.lo;
    d.dx = (g.hi - g.lo) / (g.n - 1);
    d.values.resize(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
      const double x = g.lo + d.dx * i;
      Complex amp = 0.0;
      for (Index k = 0; k < n; ++k) {
        amp += a(k) * gaussian_wavefunction(x, mu + b.branches[static_cast<std::size_t>(k)].shift,
                                            sigma);
      }
      d.values[static_cast<std::size_t>(i)] = std::norm(amp) / p;
    }
    out.pointer_density = std::move(d);
  }
  return out;
}

double first_order_residual(const BranchedState& b, const StateVector& post) {
  return postselect_pointer(b, post).residual_norm;
}

PointerOutcome pointer_outcome_at(const Scenario& sc, const std::string& detector,
                                  const CutOperator& cutop, const GaussianPointer& pointer,
                                  double lambda) {
  TwoStateVector ts = two_state_at_cut(sc, detector, cutop.cut);
  BranchedState b = couple_exact(ts.forward, cutop.op, pointer, lambda);
  return postselect_pointer(b, ts.backward);
}

double dark_port_leak(const Scenario& sc, double lambda, double sigma,
                      const std::string& arm_segment) {
  const Detector* dark = sc.circuit.find_detector("dark");
  if (!dark) throw InvalidArgumentError("scenario has no dark detector");
  const Segment& seg = sc.circuit.segment(arm_segment);
  const auto dark_idx = sc.circuit.detector_indices(*dark);

  StateVector fw = sc.circuit.propagate_forward(sc.input, seg.cut);
  Operator arm = projector_on_paths({seg.wire}, sc.circuit.basis());
  GaussianPointer pointer;
  pointer.sigma = sigma;
  BranchedState b = couple_exact(fw, arm, pointer, lambda);

  const auto n = static_cast<Index>(b.branches.size());
  // Per dark-detector mode, the branch amplitudes after the remaining layers.
  Matrix d(static_cast<Index>(dark_idx.size()), n);
  for (Index k = 0; k < n; ++k) {
    Vector sys = b.eigenvectors.col(k) * b.branches[static_cast<std::size_t>(k)].coefficient;
    StateVector out = sc.circuit.propagate_between(StateVector(sc.circuit.basis(), sys), seg.cut,
                                                   sc.circuit.layer_count());
    for (std::size_t i = 0; i < dark_idx.size(); ++i) {
      d(static_cast<Index>(i), k) = out.amps(dark_idx[i]);
    }
  }
  for (Index i = 0; i < d.rows(); ++i) {
    if (std::abs(d.row(i).sum()) > 1e-12) {
      throw InvalidArgumentError("scenario not dark-port-calibrated");
    }
  }
  Complex p = 0.0;
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        p += std::conj(d(i, j)) * d(i, k) *
             gaussian_overlap(b.branches[static_cast<std::size_t>(j)].shift,
                              b.branches[static_cast<std::size_t>(k)].shift, sigma);
      }
    }
  }
  return std::min(1.0, std::max(0.0, p.real()));
}

double mirror_recoil_fraction(double wavelength_m, double mirror_mass_kg) {
  if (!(wavelength_m > 0.0) || !(mirror_mass_kg > 0.0)) {
    throw InvalidArgumentError("wavelength and mass must be positive");
  }
  return 2.0 * kPlanck / (mirror_mass_kg * kLightSpeed * wavelength_m);
}

}  // namespace wvsim
