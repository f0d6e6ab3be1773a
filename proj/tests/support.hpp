#pragma once

#include "wvsim/circuit.hpp"
#include "wvsim/pointer.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace wvsim::testing {

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
}

/// Least-squares slope of log(y) against log(x).
inline double fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline StateVector random_state(const Basis& basis, std::mt19937_64& eng) {
  Vector v(basis.dim());
  for (Index i = 0; i < basis.dim(); ++i) {
    v(i) = Complex(uniform(eng, -1, 1), uniform(eng, -1, 1));
  }
  return StateVector(basis, v).normalized();
}

inline Operator random_hermitian(const Basis& basis, std::mt19937_64& eng) {
  Matrix m(basis.dim(), basis.dim());
  for (Index i = 0; i < basis.dim(); ++i) {
    for (Index j = 0; j < basis.dim(); ++j) {
      m(i, j) = Complex(uniform(eng, -1, 1), uniform(eng, -1, 1));
    }
  }
  Matrix h = (m + m.adjoint()) / 2.0;
  return Operator(basis, std::move(h));
}

inline Basis path_basis(int n) {
  std::vector<ModeLabel> labels;
  for (int i = 0; i < n; ++i) labels.push_back(ModeLabel{"w" + std::to_string(i), {}, {}});
  return Basis::lexicographic(std::move(labels));
}

/// Random layered circuit on 2-5 plain wires: beam splitters, phases, mirrors.
inline Circuit random_circuit(std::mt19937_64& eng) {
  const int n_wires = 2 + static_cast<int>(eng() % 4);
  std::vector<std::string> wires;
  std::vector<ModeLabel> labels;
  for (int i = 0; i < n_wires; ++i) {
    wires.push_back("w" + std::to_string(i));
    labels.push_back(ModeLabel{wires.back(), {}, {}});
  }
  Basis basis = Basis::lexicographic(std::move(labels));
  const int n_layers = 1 + static_cast<int>(eng() % 8);
  std::vector<Element> layers;
  for (int k = 0; k < n_layers; ++k) {
    switch (eng() % 3) {
      case 0: {
        auto a = eng() % wires.size();
        auto b = eng() % wires.size();
        if (b == a) b = (a + 1) % wires.size();
        layers.push_back(Element::beam_splitter(wires[a], wires[b], uniform(eng, 0, 1)));
        break;
      }
      case 1:
        layers.push_back(
            Element::phase_shift(wires[eng() % wires.size()], uniform(eng, -3.14, 3.14)));
        break;
      default:
        layers.push_back(Element::mirror(wires[eng() % wires.size()]));
    }
  }
  std::vector<Segment> segments;
  for (const auto& w : wires) segments.push_back(Segment{"seg_" + w, n_layers / 2, w});
  std::vector<Detector> detectors;
  for (const auto& w : wires) detectors.push_back(Detector{"det_" + w, w, {}});
  return Circuit(basis, layers, segments, detectors);
}

/// Numeric pointer-evolution oracle: evolves the joint state on a position
/// grid by translating each eigenbranch with a plain DFT (independent of the
/// closed-form Gaussian algebra), then reports the postselected density.
struct GridOracle {
  std::vector<double> xs;
  std::vector<double> density;
  double success = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

inline GridOracle grid_pointer_oracle(const BranchedState& b, const StateVector& post, int n,
                                      double span_sigmas = 16.0) {
  const double sigma = b.pointer.sigma;
  const double mu = b.pointer.mean;
  double smin = 0.0, smax = 0.0;
  for (const Branch& br : b.branches) {
    smin = std::min(smin, br.shift);
    smax = std::max(smax, br.shift);
  }
  const double lo = mu + smin - span_sigmas / 2.0 * sigma;
  const double hi = mu + smax + span_sigmas / 2.0 * sigma;
  const double dx = (hi - lo) / n;
  const double l = hi - lo;

  std::vector<Complex> phi(static_cast<std::size_t>(n));
  const double norm = std::pow(2.0 * M_PI * sigma * sigma, -0.25);
  for (int i = 0; i < n; ++i) {
    const double x = lo + dx * i;
    phi[static_cast<std::size_t>(i)] = norm * std::exp(-(x - mu) * (x - mu) / (4 * sigma * sigma));
  }
  // DFT of the initial pointer
  std::vector<Complex> phik(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += phi[static_cast<std::size_t>(i)] *
             std::exp(Complex(0, -2.0 * M_PI * k * i / n));
    }
    phik[static_cast<std::size_t>(k)] = acc;
  }
  auto translated = [&](double shift) {
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Complex acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const int kk = k <= n / 2 ? k : k - n;  // signed frequency
        acc += phik[static_cast<std::size_t>(k)] *
               std::exp(Complex(0, 2.0 * M_PI * kk * (dx * i - shift) / l));
      }
      out[static_cast<std::size_t>(i)] = acc / static_cast<double>(n);
    }
    return out;
  };

  GridOracle g;
  g.xs.resize(static_cast<std::size_t>(n));
  std::vector<Complex> joint(static_cast<std::size_t>(n), Complex(0, 0));
  for (std::size_t k = 0; k < b.branches.size(); ++k) {
    Complex a = post.amps.dot(b.eigenvectors.col(static_cast<Index>(k))) *
                b.branches[k].coefficient;
    if (std::abs(a) < 1e-300) continue;
    auto shifted = translated(b.branches[k].shift);
    for (int i = 0; i < n; ++i) joint[static_cast<std::size_t>(i)] += a * shifted[static_cast<std::size_t>(i)];
  }
  double p = 0, m = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + dx * i;
    g.xs[static_cast<std::size_t>(i)] = x;
    const double rho = std::norm(joint[static_cast<std::size_t>(i)]);
    p += rho * dx;
    m += x * rho * dx;
    m2 += x * x * rho * dx;
  }
  g.density.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g.density[static_cast<std::size_t>(i)] = std::norm(joint[static_cast<std::size_t>(i)]) / p;
  }
  g.success = p;
  g.mean = m / p;
  g.variance = m2 / p - g.mean * g.mean;
  return g;
}

}  // namespace wvsim::testing
