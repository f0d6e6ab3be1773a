#pragma once

#include "wvsim/circuit.hpp"
#include "wvsim/weakvalue.hpp"

#include <optional>
#include <vector>

namespace wvsim {

/// Position-space Gaussian pointer: wavefunction centered at `mean` with
/// position spread `sigma`. The optional grid supports numeric cross-checks
/// and sampling.
struct GaussianPointer {
  double mean = 0.0;
  double sigma = 1.0;

  struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
  };
  std::optional<Grid> grid;
};

/// One eigen-branch of the exactly coupled state: the pointer is translated by
/// lambda times the branch eigenvalue.
struct Branch {
  Complex coefficient;  // <v_k|psi_i>
  double eigenvalue = 0.0;
  double shift = 0.0;   // lambda * eigenvalue
};

struct BranchedState {
  std::vector<Branch> branches;
  double lambda = 0.0;
  GaussianPointer pointer;
  Basis basis;
  Matrix eigenvectors;  // columns aligned with branches
};

/// Exact action of exp(-i lambda O (x) P_d) on |pre> (x) |pointer|: each
/// eigenbranch of O translates the Gaussian by lambda * eigenvalue.
BranchedState couple_exact(const StateVector& pre, const Operator& op,
                           const GaussianPointer& pointer, double lambda);

struct GriddedDensity {
  double lo = 0.0;
  double dx = 0.0;
  std::vector<double> values;
};

struct PointerOutcome {
  double success_probability = 0.0;
  double mean_shift = 0.0;
  double variance = 0.0;
  double first_order_mean_shift = 0.0;  // lambda * Re(O_w); NaN if O_w undefined
  double residual_norm = 0.0;           // exact vs first-order normalized state distance
  Complex weak_val;                     // O_w implied by the postselected branches
  std::optional<GriddedDensity> pointer_density;
};

/// Postselects the branched state on |post| and reports exact pointer
/// statistics from closed-form Gaussian overlap integrals.
PointerOutcome postselect_pointer(const BranchedState& b, const StateVector& post);

double first_order_residual(const BranchedState& b, const StateVector& post);

/// Couples `cutop` into the scenario at its cut and postselects on `detector`.
PointerOutcome pointer_outcome_at(const Scenario& sc, const std::string& detector,
                                  const CutOperator& cutop, const GaussianPointer& pointer,
                                  double lambda);

/// Probability of a click at the dark detector of a dark-port scenario after a
/// weak in-arm coupling of strength lambda. Zero exactly at lambda = 0.
double dark_port_leak(const Scenario& sc, double lambda, double sigma = 1.0,
                      const std::string& arm_segment = "arm_a");

/// Nonrelativistic mirror-recoil to photon-energy ratio 2h/(m c wavelength).
double mirror_recoil_fraction(double wavelength_m, double mirror_mass_kg);

/// <phi_s | phi_t> for Gaussians displaced by s and t (t may be complex via
/// analytic continuation): exp(-(s-t)^2 / (8 sigma^2)).
Complex gaussian_overlap(Complex s, Complex t, double sigma);

}  // namespace wvsim
