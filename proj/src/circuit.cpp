#include "wvsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace wvsim {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

struct Sublevel {
  std::optional<Pol> pol;
  std::optional<std::string> tag;
  bool operator==(const Sublevel&) const = default;
  bool operator<(const Sublevel& o) const {
    ModeLabel a{"", pol, tag}, b{"", o.pol, o.tag};
    return a < b;
  }
};

std::vector<std::pair<Sublevel, Index>> wire_sublevels(const Basis& basis,
                                                       const std::string& wire) {
  std::vector<std::pair<Sublevel, Index>> out;
  for (Index i = 0; i < basis.dim(); ++i) {
    const ModeLabel& m = basis.label(i);
    if (m.path == wire) out.emplace_back(Sublevel{m.pol, m.tag}, i);
  }
  if (out.empty()) throw BasisMismatchError("no basis mode on wire: " + wire);
  return out;
}

Index partner_index(const Basis& basis, const std::string& wire, const Sublevel& s) {
  auto idx = basis.find(ModeLabel{wire, s.pol, s.tag});
  if (!idx) {
    throw BasisMismatchError("wires have mismatched sublevel structure at wire " + wire);
  }
  return *idx;
}

}  // namespace

std::string to_string(ElementKind k) {
  switch (k) {
    case ElementKind::BeamSplitter: return "bs";
    case ElementKind::PhaseShift: return "phase";
    case ElementKind::Mirror: return "mirror";
    case ElementKind::PolarizingBS: return "pbs";
    case ElementKind::SwitchableMirror: return "swmirror";
    case ElementKind::Tag: return "tag";
    case ElementKind::Waveplate: return "waveplate";
    case ElementKind::Identity: return "identity";
  }
  return "?";
}

Element Element::beam_splitter(std::string a, std::string b, double reflectivity,
                               BsConvention conv) {
  Element e;
  e.kind = ElementKind::BeamSplitter;
  e.wire_a = std::move(a);
  e.wire_b = std::move(b);
  e.param = reflectivity;
  e.convention = conv;
  return e;
}

Element Element::phase_shift(std::string wire, double radians, std::optional<Pol> pol) {
  Element e;
  e.kind = ElementKind::PhaseShift;
  e.wire_a = std::move(wire);
  e.param = radians;
  e.pol_filter = pol;
  return e;
}

Element Element::mirror(std::string wire) {
  Element e;
  e.kind = ElementKind::Mirror;
  e.wire_a = std::move(wire);
  return e;
}

Element Element::polarizing_bs(std::string a, std::string b) {
  Element e;
  e.kind = ElementKind::PolarizingBS;
  e.wire_a = std::move(a);
  e.wire_b = std::move(b);
  return e;
}

Element Element::switchable_mirror(std::string wire, std::string sink, bool on) {
  Element e;
  e.kind = ElementKind::SwitchableMirror;
  e.wire_a = std::move(wire);
  e.wire_b = std::move(sink);
  e.on = on;
  return e;
}

Element Element::tag(std::string wire, double theta) {
  Element e;
  e.kind = ElementKind::Tag;
  e.wire_a = std::move(wire);
  e.param = theta;
  return e;
}

Element Element::waveplate(std::string wire, double theta) {
  Element e;
  e.kind = ElementKind::Waveplate;
  e.wire_a = std::move(wire);
  e.param = theta;
  return e;
}

Element Element::identity(std::string wire) {
  Element e;
  e.kind = ElementKind::Identity;
  e.wire_a = std::move(wire);
  return e;
}

Operator element_unitary(const Element& e, const Basis& basis) {
  Matrix u = Matrix::Identity(basis.dim(), basis.dim());
  switch (e.kind) {
    case ElementKind::BeamSplitter: {
      if (e.param < 0.0 || e.param > 1.0) {
        throw InvalidArgumentError("beam splitter reflectivity outside [0,1]");
      }
      if (e.wire_a == e.wire_b) throw InvalidArgumentError("bs requires two distinct wires");
      auto subs_a = wire_sublevels(basis, e.wire_a);
      auto subs_b = wire_sublevels(basis, e.wire_b);
      if (subs_a.size() != subs_b.size()) {
        throw BasisMismatchError("bs wires have mismatched sublevel structure");
      }
      const double t = std::sqrt(1.0 - e.param);
      const double r = std::sqrt(e.param);
      for (const auto& [sub, ia] : subs_a) {
        Index ib = partner_index(basis, e.wire_b, sub);
        if (e.convention == BsConvention::SymmetricI) {
          u(ia, ia) = t;
          u(ia, ib) = kI * r;
          u(ib, ia) = kI * r;
          u(ib, ib) = t;
        } else {
          u(ia, ia) = t;
          u(ia, ib) = r;
          u(ib, ia) = r;
          u(ib, ib) = -t;
        }
      }
      break;
    }
    case ElementKind::PhaseShift: {
      auto subs = wire_sublevels(basis, e.wire_a);
      Complex ph = std::exp(kI * e.param);
      bool touched = false;
      for (const auto& [sub, i] : subs) {
        if (e.pol_filter && sub.pol != e.pol_filter) continue;
        u(i, i) = ph;
        touched = true;
      }
      if (!touched) {
        throw BasisMismatchError("phase target has no matching sublevel on wire " + e.wire_a);
      }
      break;
    }
    case ElementKind::Mirror: {
      for (const auto& [sub, i] : wire_sublevels(basis, e.wire_a)) u(i, i) = -1.0;
      break;
    }
    case ElementKind::PolarizingBS: {
      if (e.wire_a == e.wire_b) throw InvalidArgumentError("pbs requires two distinct wires");
      auto subs_a = wire_sublevels(basis, e.wire_a);
      bool any = false;
      for (const auto& [sub, ia] : subs_a) {
        if (sub.pol != Pol::V) continue;
        Index ib = partner_index(basis, e.wire_b, sub);
        u(ia, ia) = 0.0;
        u(ib, ib) = 0.0;
        u(ia, ib) = 1.0;
        u(ib, ia) = 1.0;
        any = true;
      }
      if (!any) {
        throw BasisMismatchError("pbs requires V polarization sublevels on wire " + e.wire_a);
      }
      break;
    }
    case ElementKind::SwitchableMirror: {
      if (e.wire_a == e.wire_b) {
        throw InvalidArgumentError("swmirror requires a distinct sink wire");
      }
      auto subs_a = wire_sublevels(basis, e.wire_a);
      auto subs_b = wire_sublevels(basis, e.wire_b);
      if (subs_a.size() != subs_b.size()) {
        throw BasisMismatchError("swmirror wires have mismatched sublevel structure");
      }
      if (e.on) {
        for (const auto& [sub, ia] : subs_a) {
          Index ib = partner_index(basis, e.wire_b, sub);
          u(ia, ia) = 0.0;
          u(ib, ib) = 0.0;
          u(ia, ib) = 1.0;
          u(ib, ia) = 1.0;
        }
      }
      break;
    }
    case ElementKind::Tag: {
      auto subs = wire_sublevels(basis, e.wire_a);
      const double c = std::cos(e.param / 2.0);
      const double s = std::sin(e.param / 2.0);
      bool any = false;
      for (const auto& [sub, i0] : subs) {
        if (sub.tag != std::optional<std::string>("0")) continue;
        auto j = basis.find(ModeLabel{e.wire_a, sub.pol, std::string("1")});
        if (!j) throw BasisMismatchError("tag qubit levels missing on wire " + e.wire_a);
        u(i0, i0) = c;
        u(*j, i0) = s;
        u(i0, *j) = -s;
        u(*j, *j) = c;
        any = true;
      }
      if (!any) throw BasisMismatchError("tag requires tag sublevels on wire " + e.wire_a);
      break;
    }
    case ElementKind::Waveplate: {
      auto subs = wire_sublevels(basis, e.wire_a);
      const double c = std::cos(e.param);
      const double s = std::sin(e.param);
      bool any = false;
      for (const auto& [sub, ih] : subs) {
        if (sub.pol != Pol::H) continue;
        auto iv = basis.find(ModeLabel{e.wire_a, Pol::V, sub.tag});
        if (!iv) throw BasisMismatchError("waveplate requires H and V sublevels on wire " + e.wire_a);
        u(ih, ih) = c;
        u(*iv, ih) = s;
        u(ih, *iv) = -s;
        u(*iv, *iv) = c;
        any = true;
      }
      if (!any) {
        throw BasisMismatchError("waveplate requires polarization sublevels on wire " + e.wire_a);
      }
      break;
    }
    case ElementKind::Identity: {
      wire_sublevels(basis, e.wire_a);  // existence check
      break;
    }
  }
  return Operator(basis, std::move(u));
}

Circuit::Circuit(Basis basis, std::vector<Element> layers, std::vector<Segment> segments,
                 std::vector<Detector> detectors)
    : basis_(std::move(basis)),
      layers_(std::move(layers)),
      segments_(std::move(segments)),
      detectors_(std::move(detectors)) {
  layer_unitaries_.reserve(layers_.size());
  for (const Element& e : layers_) {
    Operator op = element_unitary(e, basis_);
    double dev = (op.mat.adjoint() * op.mat - Matrix::Identity(basis_.dim(), basis_.dim())).norm();
    if (dev > 1e-12) {
      throw NonUnitaryError("element " + to_string(e.kind) + " is not unitary on its support");
    }
    layer_unitaries_.push_back(std::move(op.mat));
  }
  Matrix total = total_unitary();
  double dev = (total.adjoint() * total - Matrix::Identity(basis_.dim(), basis_.dim())).norm();
  if (dev > kUnitaryTol) {
    throw NonUnitaryError("composed circuit unitary deviates from unitarity");
  }
  std::set<std::string> seg_names;
  for (const Segment& s : segments_) {
    if (s.cut < 0 || s.cut > layer_count()) {
      throw InvalidArgumentError("segment cut out of range: " + s.name);
    }
    if (!basis_.has_path(s.wire)) {
      throw BasisMismatchError("segment wire not in basis: " + s.wire);
    }
    if (!seg_names.insert(s.name).second) {
      throw InvalidArgumentError("duplicate segment name: " + s.name);
    }
  }
  std::set<std::string> det_names;
  for (const Detector& d : detectors_) {
    if (detector_indices(d).empty()) {
      throw BasisMismatchError("detector mode not in basis: " + d.name);
    }
    if (!det_names.insert(d.name).second) {
      throw InvalidArgumentError("duplicate detector name: " + d.name);
    }
  }
}

const Matrix& Circuit::layer_unitary(int k) const {
  if (k < 0 || k >= layer_count()) throw InvalidArgumentError("layer index out of range");
  return layer_unitaries_[static_cast<std::size_t>(k)];
}

Matrix Circuit::total_unitary() const {
  Matrix total = Matrix::Identity(basis_.dim(), basis_.dim());
  for (const Matrix& u : layer_unitaries_) total = u * total;
  return total;
}

StateVector Circuit::propagate_forward(const StateVector& s, int upto) const {
  return propagate_between(s, 0, upto);
}

StateVector Circuit::propagate_between(const StateVector& s, int from, int to) const {
  if (s.basis != basis_) throw BasisMismatchError("state basis does not match circuit basis");
  if (from < 0 || to > layer_count() || from > to) {
    throw InvalidArgumentError("layer index out of range");
  }
  Vector v = s.amps;
  for (int k = from; k < to; ++k) v = layer_unitaries_[static_cast<std::size_t>(k)] * v;
  return StateVector(basis_, std::move(v));
}

StateVector Circuit::propagate_backward(const StateVector& f, int downto) const {
  if (f.basis != basis_) throw BasisMismatchError("state basis does not match circuit basis");
  if (downto < 0 || downto > layer_count()) throw InvalidArgumentError("layer index out of range");
  Vector v = f.amps;
  for (int k = layer_count() - 1; k >= downto; --k) {
    v = layer_unitaries_[static_cast<std::size_t>(k)].adjoint() * v;
  }
  return StateVector(basis_, std::move(v));
}

const Segment& Circuit::segment(const std::string& name) const {
  for (const Segment& s : segments_) {
    if (s.name == name) return s;
  }
  throw InvalidArgumentError("unknown segment: " + name);
}

const Detector* Circuit::find_detector(const std::string& name) const {
  for (const Detector& d : detectors_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<Index> Circuit::detector_indices(const Detector& d) const {
  std::vector<Index> out;
  for (Index i = 0; i < basis_.dim(); ++i) {
    const ModeLabel& m = basis_.label(i);
    if (m.path != d.wire) continue;
    if (d.pol && m.pol != d.pol) continue;
    out.push_back(i);
  }
  return out;
}

StateVector Scenario::postselection_state(const std::string& detector) const {
  auto it = postselections.find(detector);
  if (it != postselections.end()) return it->second;
  const Detector* d = circuit.find_detector(detector);
  if (!d) throw InvalidArgumentError("unknown detector: " + detector);
  auto idx = circuit.detector_indices(*d);
  if (idx.size() == 1) {
    Vector v = Vector::Zero(circuit.basis().dim());
    v(idx[0]) = 1.0;
    return StateVector(circuit.basis(), std::move(v));
  }
  StateVector out = circuit.propagate_forward(input, circuit.layer_count());
  Vector v = Vector::Zero(circuit.basis().dim());
  for (Index i : idx) v(i) = out.amps(i);
  double n = v.norm();
  if (n <= kOrthoEps) {
    throw OrthogonalPostselectionError("detector " + detector +
                                       " receives no amplitude; postselection undefined");
  }
  return StateVector(circuit.basis(), v / n);
}

bool Scenario::has_detector(const std::string& detector) const {
  return postselections.count(detector) > 0 || circuit.find_detector(detector) != nullptr;
}

double Scenario::detection_probability(const std::string& detector) const {
  const Detector* d = circuit.find_detector(detector);
  if (!d) throw InvalidArgumentError("unknown detector: " + detector);
  StateVector out = circuit.propagate_forward(input, circuit.layer_count());
  double p = 0.0;
  for (Index i : circuit.detector_indices(*d)) p += std::norm(out.amps(i));
  return p;
}

namespace {

Basis wires_basis(const std::vector<std::string>& wires, bool with_pol, bool with_tag) {
  std::vector<ModeLabel> labels;
  for (const auto& w : wires) {
    std::vector<std::optional<Pol>> pols;
    if (with_pol) {
      pols = {Pol::H, Pol::V};
    } else {
      pols = {std::nullopt};
    }
    std::vector<std::optional<std::string>> tags;
    if (with_tag) {
      tags = {std::string("0"), std::string("1")};
    } else {
      tags = {std::nullopt};
    }
    for (const auto& p : pols) {
      for (const auto& t : tags) labels.push_back(ModeLabel{w, p, t});
    }
  }
  return Basis::lexicographic(std::move(labels));
}

Scenario build_mach_zehnder(bool dark_port) {
  Basis basis = wires_basis({"a", "b"}, false, false);
  std::vector<Element> layers = {
      Element::beam_splitter("a", "b", 0.5),
      Element::beam_splitter("a", "b", 0.5),
  };
  std::vector<Segment> segments = {{"arm_a", 1, "a"}, {"arm_b", 1, "b"}};
  std::vector<Detector> detectors;
  if (dark_port) {
    detectors = {{"dark", "a", {}}, {"bright", "b", {}}};
  } else {
    detectors = {{"d1", "a", {}}, {"d2", "b", {}}};
  }
  Circuit circuit(basis, layers, segments, detectors);
  StateVector input = StateVector::ket(basis, ModeLabel{"a", {}, {}});
  Scenario sc;
  sc.name = dark_port ? "dark_port_mz" : "mach_zehnder";
  sc.circuit = std::move(circuit);
  sc.input = std::move(input);
  sc.description = dark_port
                       ? "Balanced Mach-Zehnder tuned so that output a is dark; segments "
                         "arm_a/arm_b sit between the beam splitters."
                       : "Balanced Mach-Zehnder; input on a exits entirely on b.";
  if (dark_port) {
    StateVector out = sc.circuit.propagate_forward(sc.input, sc.circuit.layer_count());
    Index ia = basis.index_of(ModeLabel{"a", {}, {}});
    if (std::abs(out.amps(ia)) > 1e-12) {
      throw Error("dark port calibration failed");
    }
  }
  return sc;
}

Scenario build_nested(const ScenarioParams& params) {
  const bool tagged = params.with_tags || params.theta_b != 0.0 || params.theta_c != 0.0;
  Basis basis = wires_basis({"A", "B", "C"}, false, tagged);

  std::vector<Element> layers;
  layers.push_back(Element::beam_splitter("A", "B", 0.5));
  layers.push_back(Element::phase_shift("B", -kPi / 2));
  layers.push_back(Element::beam_splitter("B", "C", 0.5));
  layers.push_back(Element::phase_shift("C", -kPi / 2));
  if (tagged) {
    layers.push_back(Element::tag("B", params.theta_b));
    layers.push_back(Element::tag("C", params.theta_c));
  }
  layers.push_back(Element::phase_shift("C", kPi / 2));
  layers.push_back(Element::beam_splitter("B", "C", 0.5));
  layers.push_back(Element::phase_shift("B", -kPi / 2));
  layers.push_back(Element::beam_splitter("A", "B", 0.5));

  const int mid = 4;
  const int pre_outer = tagged ? 9 : 7;
  std::vector<Segment> segments = {
      {"A", mid, "A"}, {"B", mid, "B"}, {"C", mid, "C"}, {"D", 2, "B"}, {"E", pre_outer, "B"},
  };
  std::vector<Detector> detectors = {{"D1", "B", {}}, {"D2", "A", {}}, {"D3", "C", {}}};
  Circuit circuit(basis, layers, segments, detectors);

  StateVector input = tagged ? StateVector::ket(basis, ModeLabel{"A", {}, std::string("0")})
                             : StateVector::ket(basis, ModeLabel{"A", {}, {}});
  Scenario sc;
  sc.name = "nested";
  sc.circuit = std::move(circuit);
  sc.input = std::move(input);
  sc.description =
      "Nested interferometer: outer arm A bypasses an inner balanced Mach-Zehnder on arms "
      "B/C. The mid cut (cut 4) carries (sqrt(2)|A> + |B> + |C>)/2 forward and "
      "(sqrt(2)<A| + <B| - <C|)/2 backward from D2. The inner pair is balanced so light "
      "entering on D exits entirely to D3.";
  return sc;
}

Scenario build_cheshire() {
  Basis basis = wires_basis({"L", "R"}, true, false);
  std::vector<Element> layers = {Element::identity("L")};
  std::vector<Segment> segments = {{"L", 1, "L"}, {"R", 1, "R"}};
  std::vector<Detector> detectors = {{"F", "L", {}}};
  Circuit circuit(basis, layers, segments, detectors);

  Vector in = Vector::Zero(basis.dim());
  in(basis.index_of(ModeLabel{"L", Pol::H, {}})) = Complex(0.0, 0.5);
  in(basis.index_of(ModeLabel{"L", Pol::V, {}})) = Complex(0.0, 0.5);
  in(basis.index_of(ModeLabel{"R", Pol::H, {}})) = Complex(0.5, 0.0);
  in(basis.index_of(ModeLabel{"R", Pol::V, {}})) = Complex(0.5, 0.0);

  Vector post = Vector::Zero(basis.dim());
  post(basis.index_of(ModeLabel{"L", Pol::H, {}})) = Complex(0.5, 0.0);
  post(basis.index_of(ModeLabel{"L", Pol::V, {}})) = Complex(0.5, 0.0);
  post(basis.index_of(ModeLabel{"R", Pol::H, {}})) = Complex(0.5, 0.0);
  post(basis.index_of(ModeLabel{"R", Pol::V, {}})) = Complex(-0.5, 0.0);

  Scenario sc;
  sc.name = "cheshire_cat";
  sc.circuit = std::move(circuit);
  sc.input = StateVector(basis, std::move(in));
  sc.postselections.emplace("F", StateVector(basis, std::move(post)));
  sc.description =
      "Cheshire-cat pre/post-selection. Pre: (i|L> + |R>) (|H> + |V>)/2, i.e. the standard "
      "construction with the internal operator taken diagonal in H/V. Post (detector F): "
      "(|L>(|H>+|V>) + |R>(|H>-|V>))/2. The R-path projector has weak value 0 while "
      "sigma_z times that projector has weak value -i.";
  return sc;
}

Scenario build_salih(const ScenarioParams& params) {
  const int m = params.inner_cycles;
  if (m < 1) throw InvalidArgumentError("salih_single_outer requires M >= 1 inner cycles");
  std::vector<std::string> wires = {"chain", "vout"};
  for (int i = 1; i <= m; ++i) wires.push_back("bob" + std::to_string(i));
  for (int i = 1; i <= m; ++i) wires.push_back("db" + std::to_string(i));
  Basis basis = wires_basis(wires, true, false);

  const double theta = kPi / (2.0 * m);
  std::vector<Element> layers;
  std::vector<Segment> segments;
  segments.push_back({"chain0", 0, "chain"});
  for (int i = 1; i <= m; ++i) {
    std::string bob = "bob" + std::to_string(i);
    std::string db = "db" + std::to_string(i);
    layers.push_back(Element::waveplate("chain", theta));
    layers.push_back(Element::polarizing_bs("chain", bob));
    layers.push_back(Element::switchable_mirror(bob, db, params.mirrors_on));
    layers.push_back(Element::polarizing_bs("chain", bob));
    const int base = 4 * (i - 1);
    segments.push_back({bob + "_in", base + 2, bob});
    segments.push_back({bob + "_out", base + 3, bob});
    segments.push_back({"bobdet" + std::to_string(i), base + 3, db});
    segments.push_back({"chain" + std::to_string(i), base + 4, "chain"});
  }
  layers.push_back(Element::polarizing_bs("chain", "vout"));

  std::vector<Detector> detectors = {{"D0", "chain", Pol::H}, {"D1", "vout", Pol::V}};
  for (int i = 1; i <= m; ++i) {
    detectors.push_back({"DB" + std::to_string(i), "db" + std::to_string(i), {}});
  }
  Circuit circuit(basis, layers, segments, detectors);
  StateVector input = StateVector::ket(basis, ModeLabel{"chain", Pol::H, {}});

  Scenario sc;
  sc.name = "salih_single_outer";
  sc.circuit = std::move(circuit);
  sc.input = std::move(input);
  std::ostringstream desc;
  desc << "Single-outer-cycle counterfactual protocol with M=" << m
       << " inner cycles, Bob's switchable mirrors "
       << (params.mirrors_on ? "on" : "off")
       << ". Each cycle rotates polarization by pi/(2M); a PBS detours the V component "
          "through Bob's arm. Mirrors on divert the detour into Bob's detectors, so the "
          "H survivor reaches D0 with probability cos(pi/2M)^(2M); mirrors off let the "
          "detour recombine, the rotations accumulate, and everything exits V to D1.";
  sc.description = desc.str();
  return sc;
}

}  // namespace

Scenario build_scenario(BuiltinScenario kind, const ScenarioParams& params) {
  switch (kind) {
    case BuiltinScenario::MachZehnder: return build_mach_zehnder(false);
    case BuiltinScenario::DarkPortMz: return build_mach_zehnder(true);
    case BuiltinScenario::Nested: return build_nested(params);
    case BuiltinScenario::CheshireCat: return build_cheshire();
    case BuiltinScenario::SalihSingleOuter: return build_salih(params);
  }
  throw InvalidArgumentError("unknown scenario kind");
}

Scenario build_scenario(const std::string& name, const ScenarioParams& params) {
  if (name == "mach_zehnder") return build_scenario(BuiltinScenario::MachZehnder, params);
  if (name == "dark_port_mz") return build_scenario(BuiltinScenario::DarkPortMz, params);
  if (name == "nested") return build_scenario(BuiltinScenario::Nested, params);
  if (name == "cheshire_cat") return build_scenario(BuiltinScenario::CheshireCat, params);
  if (name == "salih_single_outer") {
    return build_scenario(BuiltinScenario::SalihSingleOuter, params);
  }
  throw InvalidArgumentError("unknown scenario name: " + name);
}

std::vector<std::string> builtin_scenario_names() {
  return {"mach_zehnder", "dark_port_mz", "nested", "cheshire_cat", "salih_single_outer"};
}

}  // namespace wvsim
