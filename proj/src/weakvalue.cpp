#include "wvsim/weakvalue.hpp"

#include <algorithm>
#include <cmath>

namespace wvsim {

WeakValueResult weak_value(const Operator& op, const StateVector& pre, const StateVector& post,
                           double eps_ortho) {
  if (op.basis != pre.basis || pre.basis != post.basis) {
    throw BasisMismatchError("weak value requires a shared basis");
  }
  if (std::abs(pre.norm() - 1.0) > 1e-9 || std::abs(post.norm() - 1.0) > 1e-9) {
    throw InvalidArgumentError("weak value requires normalized pre/post states");
  }
  Complex den = post.amps.dot(pre.amps);
  if (std::abs(den) <= eps_ortho) {
    throw OrthogonalPostselectionError(
        "postselection orthogonal to preselection; weak value undefined");
  }
  Complex num = post.amps.dot(op.mat * pre.amps);
  WeakValueResult r;
  r.numerator = num;
  r.denominator = den;
  r.value = num / den;
  r.postselection_probability = std::min(1.0, std::norm(den));
  return r;
}

TwoStateVector two_state_at_cut(const Scenario& sc, const std::string& detector, int cut) {
  if (!sc.has_detector(detector)) throw InvalidArgumentError("unknown detector: " + detector);
  TwoStateVector ts;
  ts.cut = cut;
  ts.forward = sc.circuit.propagate_forward(sc.input, cut);
  ts.backward = sc.circuit.propagate_backward(sc.postselection_state(detector), cut);
  return ts;
}

namespace {

int sign_of(double x, double tol = 1e-12) {
  if (x > tol) return 1;
  if (x < -tol) return -1;
  return 0;
}

Complex segment_amplitude(const StateVector& s, const std::vector<Index>& idx) {
  if (idx.size() == 1) return s.amps(idx[0]);
  double n2 = 0.0;
  for (Index i : idx) n2 += std::norm(s.amps(i));
  return Complex(std::sqrt(n2), 0.0);
}

}  // namespace

SegmentTraceMap segment_trace_map(const Scenario& sc, const std::string& detector) {
  StateVector post = sc.postselection_state(detector);
  Complex overlap = sc.circuit.propagate_backward(post, 0).amps.dot(sc.input.amps);
  if (std::abs(overlap) <= kOrthoEps) {
    throw OrthogonalPostselectionError(
        "postselection orthogonal to preselection; trace map undefined");
  }
  SegmentTraceMap map;
  map.detector = detector;
  map.overlap = overlap;
  for (const Segment& seg : sc.circuit.segments()) {
    StateVector fw = sc.circuit.propagate_forward(sc.input, seg.cut);
    StateVector bw = sc.circuit.propagate_backward(post, seg.cut);
    auto idx = sc.circuit.basis().indices_on_path(seg.wire);
    Complex cond = 0.0;
    for (Index i : idx) cond += std::conj(bw.amps(i)) * fw.amps(i);
    SegmentTrace t;
    t.name = seg.name;
    t.cut = seg.cut;
    t.wire = seg.wire;
    t.forward_amplitude = segment_amplitude(fw, idx);
    t.backward_amplitude = segment_amplitude(bw, idx);
    t.conditional_amplitude = cond;
    t.weak_value = cond / overlap;
    t.sign = sign_of(t.weak_value.real());
    map.segments.push_back(std::move(t));
  }
  return map;
}

WeakValueResult coarse_grained_weak_value(const std::vector<std::string>& segment_names,
                                          const Scenario& sc, const std::string& detector) {
  CutOperator cutop = coarse_projector(sc, segment_names);
  return scenario_weak_value(sc, detector, cutop);
}

Operator compound_operator(const Matrix& property, const std::set<std::string>& region,
                           const Basis& basis) {
  if (property.rows() != 2 || property.cols() != 2) {
    throw InvalidArgumentError("property operator must be 2x2 over {H,V}");
  }
  Matrix m = Matrix::Zero(basis.dim(), basis.dim());
  auto pol_index = [](Pol p) { return p == Pol::H ? 0 : 1; };
  bool any = false;
  for (const std::string& wire : region) {
    auto idx = basis.indices_on_path(wire);
    if (idx.empty()) throw BasisMismatchError("no basis mode on wire: " + wire);
    for (Index i : idx) {
      const ModeLabel& mi = basis.label(i);
      if (!mi.pol) {
        throw BasisMismatchError("compound operator requires polarization sublevels on wire " +
                                 wire);
      }
      for (Index j : idx) {
        const ModeLabel& mj = basis.label(j);
        if (mi.tag != mj.tag) continue;
        m(i, j) = property(pol_index(*mi.pol), pol_index(*mj.pol));
      }
      any = true;
    }
  }
  if (!any) throw InvalidArgumentError("compound operator region is empty");
  return Operator(basis, std::move(m));
}

WeakValueResult compound_weak_value(const Matrix& property, const std::set<std::string>& region,
                                    const Scenario& sc, const std::string& detector, int cut) {
  CutOperator cutop = compound_at(sc, property, region, cut);
  return scenario_weak_value(sc, detector, cutop);
}

CutOperator segment_projector(const Scenario& sc, const std::string& segment_name) {
  const Segment& seg = sc.circuit.segment(segment_name);
  CutOperator c;
  c.op = projector_on_paths({seg.wire}, sc.circuit.basis());
  c.cut = seg.cut;
  c.description = "segment:" + segment_name;
  return c;
}

CutOperator coarse_projector(const Scenario& sc, const std::vector<std::string>& segment_names) {
  if (segment_names.empty()) throw InvalidArgumentError("no segments given");
  std::set<std::string> wires;
  int cut = sc.circuit.segment(segment_names.front()).cut;
  std::string desc = "segments:";
  for (const auto& name : segment_names) {
    const Segment& seg = sc.circuit.segment(name);
    if (seg.cut != cut) {
      throw InvalidArgumentError("coarse-grained weak value requires same-cut segments");
    }
    wires.insert(seg.wire);
    desc += name + ",";
  }
  desc.pop_back();
  CutOperator c;
  c.op = projector_on_paths(wires, sc.circuit.basis());
  c.cut = cut;
  c.description = desc;
  return c;
}

CutOperator compound_at(const Scenario& sc, const Matrix& property,
                        const std::set<std::string>& region, int cut,
                        const std::string& property_name) {
  CutOperator c;
  c.op = compound_operator(property, region, sc.circuit.basis());
  c.cut = cut;
  std::string wires;
  for (const auto& w : region) wires += (wires.empty() ? "" : "+") + w;
  c.description = property_name + "*proj:" + wires;
  return c;
}

WeakValueResult scenario_weak_value(const Scenario& sc, const std::string& detector,
                                    const CutOperator& cutop) {
  TwoStateVector ts = two_state_at_cut(sc, detector, cutop.cut);
  return weak_value(cutop.op, ts.forward, ts.backward);
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace wvsim
