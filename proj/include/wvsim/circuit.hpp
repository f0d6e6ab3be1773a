#pragma once

#include "wvsim/hilbert.hpp"

#include <map>
#include <string>
#include <vector>

namespace wvsim {

enum class ElementKind {
  BeamSplitter,
  PhaseShift,
  Mirror,
  PolarizingBS,
  SwitchableMirror,
  Tag,
  Waveplate,
  Identity,
};

enum class BsConvention { SymmetricI, RealRotation };

std::string to_string(ElementKind k);

/// One unitary optical element acting on one or two wires (spatial paths).
/// Elements act identically on every internal sublevel of a wire unless the
/// kind addresses an internal degree of freedom (PolarizingBS, Tag, Waveplate)
/// or a pol filter is set (PhaseShift).
struct Element {
  ElementKind kind = ElementKind::Identity;
  std::string wire_a;
  std::string wire_b;                 // beam splitter / pbs / switchable-mirror partner
  std::optional<Pol> pol_filter;      // phase shift on a single polarization sublevel
  double param = 0.0;                 // reflectivity or angle, by kind
  BsConvention convention = BsConvention::SymmetricI;
  bool on = false;                    // switchable mirror state

  static Element beam_splitter(std::string a, std::string b, double reflectivity,
                               BsConvention conv = BsConvention::SymmetricI);
  static Element phase_shift(std::string wire, double radians, std::optional<Pol> pol = {});
  static Element mirror(std::string wire);
  static Element polarizing_bs(std::string a, std::string b);
  static Element switchable_mirror(std::string wire, std::string sink, bool on);
  static Element tag(std::string wire, double theta);
  static Element waveplate(std::string wire, double theta);
  static Element identity(std::string wire);

  bool operator==(const Element&) const = default;
};

Operator element_unitary(const Element& e, const Basis& basis);

/// A named path segment: the subspace of one wire at one circuit cut.
/// Cut k is the state after the first k layers.
struct Segment {
  std::string name;
  int cut = 0;
  std::string wire;
  bool operator==(const Segment&) const = default;
};

struct Detector {
  std::string name;
  std::string wire;
  std::optional<Pol> pol;
  bool operator==(const Detector&) const = default;
};

/// Layered interferometer. Immutable after construction; layer unitaries are
/// cached and the composed unitary is validated at build time.
class Circuit {
 public:
  Circuit() = default;
  Circuit(Basis basis, std::vector<Element> layers, std::vector<Segment> segments,
          std::vector<Detector> detectors);

  const Basis& basis() const { return basis_; }
  int layer_count() const { return static_cast<int>(layers_.size()); }
  const std::vector<Element>& layers() const { return layers_; }
  const Matrix& layer_unitary(int k) const;
  Matrix total_unitary() const;

  StateVector propagate_forward(const StateVector& s, int upto) const;
  StateVector propagate_backward(const StateVector& f, int downto) const;
  /// Applies layers [from, to) to a state given at cut `from`.
  StateVector propagate_between(const StateVector& s, int from, int to) const;

  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(const std::string& name) const;
  const std::vector<Detector>& detectors() const { return detectors_; }
  const Detector* find_detector(const std::string& name) const;
  std::vector<Index> detector_indices(const Detector& d) const;

 private:
  Basis basis_;
  std::vector<Element> layers_;
  std::vector<Segment> segments_;
  std::vector<Detector> detectors_;
  std::vector<Matrix> layer_unitaries_;
};

/// A circuit with a pre-selected input and named post-selections. The
/// post-selection for a detector is the backward state at the final cut.
struct Scenario {
  std::string name;
  Circuit circuit;
  StateVector input;
  std::map<std::string, StateVector> postselections;
  std::string description;

  /// Post-selection state for a detector: an explicit entry if present;
  /// otherwise the detector's basis ket when its subspace is one-dimensional,
  /// otherwise the normalized projection of the propagated input onto the
  /// detector subspace (the state a bare click actually conditions on).
  StateVector postselection_state(const std::string& detector) const;
  bool has_detector(const std::string& detector) const;
  double detection_probability(const std::string& detector) const;
};

enum class BuiltinScenario { MachZehnder, DarkPortMz, Nested, CheshireCat, SalihSingleOuter };

struct ScenarioParams {
  double theta_b = 0.0;   // nested: tag angle on arm B
  double theta_c = 0.0;   // nested: tag angle on arm C
  bool with_tags = false; // nested: include the tag qubit even at zero angles
  int inner_cycles = 3;   // salih: M
  bool mirrors_on = true; // salih: Bob's switchable mirrors
};

Scenario build_scenario(BuiltinScenario kind, const ScenarioParams& params = {});
Scenario build_scenario(const std::string& name, const ScenarioParams& params = {});
std::vector<std::string> builtin_scenario_names();

}  // namespace wvsim
