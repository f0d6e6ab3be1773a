#pragma once

#include "wvsim/circuit.hpp"

#include <set>
#include <string>
#include <vector>

namespace wvsim {

struct WeakValueResult {
  Complex value;
  Complex numerator;           // <post|O|pre>
  Complex denominator;         // <post|pre>
  double postselection_probability = 0.0;  // |denominator|^2
};

/// O_w = <post|O|pre> / <post|pre>. Throws OrthogonalPostselectionError when
/// |<post|pre>| <= eps_ortho (the weak value is then undefined, not large).
WeakValueResult weak_value(const Operator& op, const StateVector& pre, const StateVector& post,
                           double eps_ortho = kOrthoEps);

struct TwoStateVector {
  int cut = 0;
  StateVector forward;
  StateVector backward;
};

TwoStateVector two_state_at_cut(const Scenario& sc, const std::string& detector, int cut);

struct SegmentTrace {
  std::string name;
  int cut = 0;
  std::string wire;
  Complex forward_amplitude;      // amplitude for 1-dim segments, projected norm otherwise
  Complex backward_amplitude;
  Complex conditional_amplitude;  // <f|Pi_segment|psi> at the segment cut
  Complex weak_value;
  int sign = 0;                   // sign of Re(weak value); 0 when negligible
};

struct SegmentTraceMap {
  std::string detector;
  Complex overlap;                // <psi_f|psi_i>, cut independent
  std::vector<SegmentTrace> segments;
};

SegmentTraceMap segment_trace_map(const Scenario& sc, const std::string& detector);

/// Weak value of the projector onto the union of several same-cut segments.
WeakValueResult coarse_grained_weak_value(const std::vector<std::string>& segment_names,
                                          const Scenario& sc, const std::string& detector);

/// Full-space operator acting as `property` (2x2 on {H,V}) inside `region`
/// wires and as zero outside. Used for property-times-projector weak values.
Operator compound_operator(const Matrix& property, const std::set<std::string>& region,
                           const Basis& basis);

WeakValueResult compound_weak_value(const Matrix& property, const std::set<std::string>& region,
                                    const Scenario& sc, const std::string& detector, int cut);

/// An operator together with the circuit cut it acts at.
struct CutOperator {
  Operator op;
  int cut = 0;
  std::string description;
};

CutOperator segment_projector(const Scenario& sc, const std::string& segment_name);
CutOperator coarse_projector(const Scenario& sc, const std::vector<std::string>& segment_names);
CutOperator compound_at(const Scenario& sc, const Matrix& property,
                        const std::set<std::string>& region, int cut,
                        const std::string& property_name = "property");

/// Weak value of a cut operator between the scenario's forward and backward
/// states at that cut.
WeakValueResult scenario_weak_value(const Scenario& sc, const std::string& detector,
                                    const CutOperator& cutop);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

}  // namespace wvsim
