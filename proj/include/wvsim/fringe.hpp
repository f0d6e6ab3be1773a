#pragma once

#include "wvsim/circuit.hpp"

#include <vector>

namespace wvsim {

struct FringeReport {
  double theta_b = 0.0;
  double theta_c = 0.0;
  double distinguishability = 0.0;  // D
  double visibility = 0.0;          // V
  double leak_probability = 0.0;    // into arm E for input on D

  double dv_sum() const { return distinguishability * distinguishability +
                                 visibility * visibility; }
};

/// Tags arms B and C of the nested interferometer and reports which-path
/// distinguishability, fringe visibility, and the probability that light
/// entering the inner pair on D leaks to E instead of exiting to D3.
/// Requires a nested scenario (tag angles are re-applied).
FringeReport analyze_tagged_inner(const Scenario& nested, double theta_b, double theta_c);

/// analyze_tagged_inner over a grid of relative tag angles (theta on B, 0 on C).
std::vector<FringeReport> dv_inequality_sweep(const std::vector<double>& theta_grid);

}  // namespace wvsim
