#include "wvsim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wvsim {

namespace {

double next_uniform(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF sampler over the exact postselected pointer density.
class DensitySampler {
 public:
  DensitySampler(const BranchedState& b, const Vector& a, double success) {
    const double sigma = b.pointer.sigma;
    const double mu = b.pointer.mean;
    double smin = 0.0, smax = 0.0;
    for (const Branch& br : b.branches) {
      smin = std::min(smin, br.shift);
      smax = std::max(smax, br.shift);
    }
    lo_ = mu + smin - 10.0 * sigma;
    const double hi = mu + smax + 10.0 * sigma;
    n_ = 4096;
    dx_ = (hi - lo_) / (n_ - 1);

    const double norm = std::pow(2.0 * M_PI * sigma * sigma, -0.25);
    std::vector<double> density(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const double x = lo_ + dx_ * i;
      Complex amp = 0.0;
      for (std::size_t k = 0; k < b.branches.size(); ++k) {
        const double d = x - mu - b.branches[k].shift;
        amp += a(static_cast<Index>(k)) * norm * std::exp(-d * d / (4.0 * sigma * sigma));
      }
      density[static_cast<std::size_t>(i)] = std::norm(amp) / success;
    }
    cdf_.resize(static_cast<std::size_t>(n_));
    cdf_[0] = 0.0;
    for (int i = 1; i < n_; ++i) {
      cdf_[static_cast<std::size_t>(i)] =
          cdf_[static_cast<std::size_t>(i - 1)] +
          0.5 * (density[static_cast<std::size_t>(i - 1)] + density[static_cast<std::size_t>(i)]) *
              dx_;
    }
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
  }

  double sample(double u) const {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return lo_;
    if (it == cdf_.end()) return lo_ + dx_ * (n_ - 1);
    const auto i = static_cast<int>(it - cdf_.begin());
    const double c0 = cdf_[static_cast<std::size_t>(i - 1)];
    const double c1 = cdf_[static_cast<std::size_t>(i)];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return lo_ + dx_ * (i - 1 + frac);
  }

 private:
  double lo_ = 0.0, dx_ = 0.0;
  int n_ = 0;
  std::vector<double> cdf_;
};

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

EnsembleRun run(const EnsembleConfig& cfg) {
  if (cfg.n_particles < 1) throw InvalidArgumentError("n_particles must be >= 1");
  if (cfg.lambda == 0.0) throw InvalidArgumentError("ensemble coupling needs lambda != 0");

  TwoStateVector ts = two_state_at_cut(cfg.scenario, cfg.detector, cfg.op.cut);
  BranchedState b = couple_exact(ts.forward, cfg.op.op, cfg.pointer, cfg.lambda);

  const auto n = static_cast<Index>(b.branches.size());
  Vector a(n);
  for (Index k = 0; k < n; ++k) {
    a(k) = ts.backward.amps.dot(b.eigenvectors.col(k)) *
           b.branches[static_cast<std::size_t>(k)].coefficient;
  }
  Complex p_acc = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      p_acc += std::conj(a(j)) * a(k) *
               gaussian_overlap(b.branches[static_cast<std::size_t>(j)].shift,
                                b.branches[static_cast<std::size_t>(k)].shift, b.pointer.sigma);
    }
  }
  const double success = std::min(1.0, std::max(0.0, p_acc.real()));

  EnsembleRun out;
  out.n_particles = cfg.n_particles;
  out.success_probability = success;
  Complex den = a.sum();
  if (std::abs(den) > kOrthoEps) {
    Complex num = 0.0;
    for (Index k = 0; k < n; ++k) {
      num += a(k) * b.branches[static_cast<std::size_t>(k)].eigenvalue;
    }
    out.target = (num / den).real();
  } else {
    out.target = 0.0;
  }

  std::mt19937_64 eng(cfg.seed);
  if (success <= 0.0) {
    out.empty = true;
    return out;
  }
  DensitySampler sampler(b, a, success);
  out.readouts.reserve(static_cast<std::size_t>(cfg.n_particles * success * 1.1) + 16);
  for (std::int64_t i = 0; i < cfg.n_particles; ++i) {
    if (next_uniform(eng) >= success) continue;
    out.readouts.push_back(sampler.sample(next_uniform(eng)));
  }
  out.n_postselected = static_cast<std::int64_t>(out.readouts.size());
  if (out.n_postselected == 0) {
    out.empty = true;
    return out;
  }

  double sum = 0.0;
  for (double x : out.readouts) sum += (x - cfg.pointer.mean) / cfg.lambda;
  out.estimate = sum / static_cast<double>(out.n_postselected);
  double ss = 0.0;
  for (double x : out.readouts) {
    const double z = (x - cfg.pointer.mean) / cfg.lambda - out.estimate;
    ss += z * z;
  }
  const double m = static_cast<double>(out.n_postselected);
  const double sd = out.n_postselected > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
  out.stderr_est = sd / std::sqrt(m);
  return out;
}

std::vector<PrecisionPoint> precision_curve(const EnsembleConfig& cfg,
                                            const std::vector<std::int64_t>& n_grid) {
  std::vector<PrecisionPoint> out;
  out.reserve(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    EnsembleConfig c = cfg;
    c.n_particles = n_grid[i];
    c.seed = splitmix64(cfg.seed + i);
    EnsembleRun r = run(c);
    out.push_back(PrecisionPoint{n_grid[i], r.stderr_est});
  }
  return out;
}

std::int64_t required_n(double sigma, double lambda, double k) {
  if (!(sigma > 0.0) || !(lambda > 0.0) || !(k > 0.0)) {
    throw InvalidArgumentError("required_n needs positive sigma, lambda, k");
  }
  const double x = k * sigma / lambda;
  return static_cast<std::int64_t>(std::ceil(x * x));
}

}  // namespace wvsim
