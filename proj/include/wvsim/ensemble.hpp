#pragma once

#include "wvsim/pointer.hpp"

#include <cstdint>
#include <vector>

namespace wvsim {

/// One weak-measure-then-postselect experiment: couple `op` at its cut,
/// postselect on `detector`, read the pointer. Runs are reproducible: the
/// generator is std::mt19937_64 with uniforms taken as (engine() >> 11) * 2^-53,
/// so identical seeds give bit-identical readout streams on any platform.
struct EnsembleConfig {
  Scenario scenario;
  std::string detector;
  CutOperator op;
  double lambda = 0.0;
  GaussianPointer pointer;
  std::int64_t n_particles = 0;
  std::uint64_t seed = 0;
};

struct EnsembleRun {
  std::int64_t n_particles = 0;
  std::int64_t n_postselected = 0;
  std::vector<double> readouts;  // pointer positions of postselected particles
  double estimate = 0.0;         // mean((readout - pointer.mean) / lambda)
  double stderr_est = 0.0;       // sample std of scaled readouts / sqrt(n_postselected)
  double target = 0.0;           // Re(O_w)
  double success_probability = 0.0;
  bool empty = false;            // no particle passed postselection
};

EnsembleRun run(const EnsembleConfig& cfg);

struct PrecisionPoint {
  std::int64_t n = 0;
  double stderr_est = 0.0;
};

/// stderr as a function of N; each point runs with a seed derived from
/// cfg.seed via splitmix64 so points are independent but reproducible.
std::vector<PrecisionPoint> precision_curve(const EnsembleConfig& cfg,
                                            const std::vector<std::int64_t>& n_grid);

/// The ensemble-size bound N > (DeltaX_d)^2 O(lambda^-2) made concrete with an
/// explicit confidence multiplier: ceil((k sigma / lambda)^2).
std::int64_t required_n(double sigma, double lambda, double k = 3.0);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace wvsim
