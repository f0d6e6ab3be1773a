#include "wvsim/weakvalue.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace wvsim;
using namespace wvsim::testing;

TEST_CASE("nested golden weak values from circuit propagation") {
  Scenario sc = build_scenario(BuiltinScenario::Nested);
  auto wv = [&](const std::string& seg) {
    return scenario_weak_value(sc, "D2", segment_projector(sc, seg));
  };
  WeakValueResult a = wv("A");
  WeakValueResult b = wv("B");
  WeakValueResult c = wv("C");
  CHECK(std::abs(a.value - Complex(1.0, 0)) < 1e-12);
  CHECK(std::abs(b.value - Complex(0.5, 0)) < 1e-12);
  CHECK(std::abs(c.value - Complex(-0.5, 0)) < 1e-12);
  WeakValueResult bc = coarse_grained_weak_value({"B", "C"}, sc, "D2");
  CHECK(std::abs(bc.value) < 1e-12);
  CHECK(bc.postselection_probability == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("weak value of the identity is 1") {
  Scenario sc = build_scenario(BuiltinScenario::Nested);
  TwoStateVector ts = two_state_at_cut(sc, "D2", 4);
  WeakValueResult r = weak_value(Operator::identity(sc.circuit.basis()), ts.forward, ts.backward);
  CHECK(std::abs(r.value - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(r.value * r.denominator - r.numerator) < 1e-12);
}

TEST_CASE("orthogonal postselection is rejected as undefined") {
  Basis b = path_basis(2);
  StateVector pre = StateVector::ket(b, ModeLabel{"w0", {}, {}});
  StateVector post = StateVector::ket(b, ModeLabel{"w1", {}, {}});
  CHECK_THROWS_AS(weak_value(Operator::identity(b), pre, post), OrthogonalPostselectionError);
}

TEST_CASE("pre = post reduces the weak value to the expectation value") {
  std::mt19937_64 eng(31);
  Basis basis = path_basis(5);
  for (int trial = 0; trial < 50; ++trial) {
    StateVector psi = random_state(basis, eng);
    Operator op = random_hermitian(basis, eng);
    WeakValueResult r = weak_value(op, psi, psi);
    Complex expect = psi.amps.dot(op.mat * psi.amps);
    CHECK(std::abs(r.value - expect) < 1e-12);
  }
}

TEST_CASE("eigenstate preselection pins the weak value to the eigenvalue") {
  std::mt19937_64 eng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + static_cast<int>(eng() % 7);
    Basis basis = path_basis(dim);
    Operator op = random_hermitian(basis, eng);
    EigenDecomposition ed = eigh(op);
    const auto k = static_cast<Index>(eng() % static_cast<std::uint64_t>(dim));
    StateVector pre(basis, ed.eigenvectors.col(k));
    StateVector post = random_state(basis, eng);
    Complex ov = post.amps.dot(pre.amps);
    if (std::abs(ov) < 1e-3) continue;
    WeakValueResult r = weak_value(op, pre, post);
    CHECK(std::abs(r.value - Complex(ed.eigenvalues(k), 0)) < 1e-10);
  }
}

TEST_CASE("two_state_at_cut endpoints") {
  Scenario sc = build_scenario(BuiltinScenario::Nested);
  SUBCASE("cut 0 pairs the input with the fully back-propagated postselection") {
    TwoStateVector ts = two_state_at_cut(sc, "D2", 0);
    CHECK((ts.forward.amps - sc.input.amps).norm() == doctest::Approx(0.0));
    StateVector expect = sc.circuit.propagate_backward(sc.postselection_state("D2"), 0);
    CHECK((ts.backward.amps - expect.amps).norm() == doctest::Approx(0.0));
  }
  SUBCASE("both legs stay normalized at any cut") {
    for (int cut = 0; cut <= sc.circuit.layer_count(); ++cut) {
      TwoStateVector ts = two_state_at_cut(sc, "D2", cut);
      CHECK(ts.forward.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(ts.backward.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("unknown detector") {
    CHECK_THROWS_AS(two_state_at_cut(sc, "Dx", 0), InvalidArgumentError);
  }
}

TEST_CASE("segment trace map for the nested interferometer") {
  Scenario sc = build_scenario(BuiltinScenario::Nested);
  SegmentTraceMap map = segment_trace_map(sc, "D2");
  CHECK(std::abs(map.overlap - Complex(0.5, 0)) < 1e-12);
  auto seg = [&](const std::string& name) -> const SegmentTrace& {
    for (const auto& s : map.segments) {
      if (s.name == name) return s;
    }
    FAIL("missing segment");
    return map.segments.front();
  };
  CHECK(std::abs(seg("A").weak_value - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(seg("B").weak_value - Complex(0.5, 0)) < 1e-12);
  CHECK(std::abs(seg("C").weak_value - Complex(-0.5, 0)) < 1e-12);
  CHECK(std::abs(seg("D").weak_value) < 1e-12);
  CHECK(std::abs(seg("E").weak_value) < 1e-12);
  CHECK(seg("A").sign == 1);
  CHECK(seg("B").sign == 1);
  CHECK(seg("C").sign == -1);
  CHECK(seg("D").sign == 0);
  CHECK(seg("E").sign == 0);
  // complete mid-cut resolves the identity
  Complex sum = seg("A").weak_value + seg("B").weak_value + seg("C").weak_value;
  CHECK(std::abs(sum - Complex(1, 0)) < 1e-10);
}

TEST_CASE("single-path circuit has a unit segment weak value") {
  Basis b = path_basis(1);
  Circuit c(b, {Element::identity("w0")}, {{"only", 0, "w0"}}, {{"out", "w0", {}}});
  Scenario sc;
  sc.name = "single";
  sc.circuit = c;
  sc.input = StateVector::ket(b, ModeLabel{"w0", {}, {}});
  SegmentTraceMap map = segment_trace_map(sc, "out");
  CHECK(std::abs(map.segments.at(0).weak_value - Complex(1, 0)) < 1e-15);
}

TEST_CASE("salih trace: Bob's segments all vanish for D0 while the chain is unity") {
  ScenarioParams p;
  p.inner_cycles = 3;
  Scenario sc = build_scenario(BuiltinScenario::SalihSingleOuter, p);
  SegmentTraceMap map = segment_trace_map(sc, "D0");
  for (const auto& s : map.segments) {
    const bool bob = s.wire.rfind("bob", 0) == 0 || s.wire.rfind("db", 0) == 0;
    if (bob) {
      CHECK(std::abs(s.weak_value) < 1e-12);
    } else {
      CHECK(std::abs(s.weak_value - Complex(1, 0)) < 1e-10);
    }
  }
}

TEST_CASE("salih backward state stays off Bob's modes") {
  ScenarioParams p;
  p.inner_cycles = 3;
  Scenario sc = build_scenario(BuiltinScenario::SalihSingleOuter, p);
  const Basis& basis = sc.circuit.basis();
  StateVector post = sc.postselection_state("D0");
  // Behind each mirror (cuts after the switchable-mirror layer), the backward
  // state has no amplitude on Bob's detector wires; wherever the forward state
  // is nonzero on a Bob wire the backward state vanishes, and vice versa.
  for (int cut = 0; cut <= sc.circuit.layer_count(); ++cut) {
    StateVector fw = sc.circuit.propagate_forward(sc.input, cut);
    StateVector bw = sc.circuit.propagate_backward(post, cut);
    for (int i = 1; i <= 3; ++i) {
      for (const std::string& wire : {"bob" + std::to_string(i), "db" + std::to_string(i)}) {
        for (Index idx : basis.indices_on_path(wire)) {
          CHECK(std::abs(fw.amps(idx)) * std::abs(bw.amps(idx)) < 1e-12);
        }
      }
      const int after_mirror = 4 * (i - 1) + 3;
      for (int cut2 = after_mirror; cut2 <= sc.circuit.layer_count(); ++cut2) {
        StateVector bw2 = sc.circuit.propagate_backward(post, cut2);
        for (Index idx : basis.indices_on_path("db" + std::to_string(i))) {
          CHECK(std::abs(bw2.amps(idx)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("coarse graining is linear and errors are reported") {
  Scenario sc = build_scenario(BuiltinScenario::Nested);
  SUBCASE("sum rule against member segments, exactly") {
    WeakValueResult bc = coarse_grained_weak_value({"B", "C"}, sc, "D2");
    WeakValueResult b = scenario_weak_value(sc, "D2", segment_projector(sc, "B"));
    WeakValueResult c = scenario_weak_value(sc, "D2", segment_projector(sc, "C"));
    CHECK(std::abs(bc.value - (b.value + c.value)) < 1e-12);
  }
  SUBCASE("complete cut gives 1") {
    WeakValueResult all = coarse_grained_weak_value({"A", "B", "C"}, sc, "D2");
    CHECK(std::abs(all.value - Complex(1, 0)) < 1e-12);
  }
  SUBCASE("unknown segment") {
    CHECK_THROWS_AS(coarse_grained_weak_value({"Q"}, sc, "D2"), InvalidArgumentError);
  }
  SUBCASE("segments at different cuts cannot be summed") {
    CHECK_THROWS_AS(coarse_grained_weak_value({"A", "D"}, sc, "D2"), InvalidArgumentError);
  }
}

TEST_CASE("sum rule holds on random subsets of random circuits") {
  std::mt19937_64 eng(606);
  for (int trial = 0; trial < 100; ++trial) {
    Circuit c = random_circuit(eng);
    Scenario sc;
    sc.name = "random";
    sc.circuit = c;
    sc.input = random_state(c.basis(), eng);
    const std::string det = c.detectors().front().name;
    StateVector post = StateVector::ket(c.basis(), ModeLabel{c.detectors().front().wire, {}, {}});
    sc.postselections.emplace(det, post);

    Complex overlap = c.propagate_backward(post, 0).amps.dot(sc.input.amps);
    if (std::abs(overlap) < 1e-3) continue;

    const int cut = c.segments().front().cut;
    std::vector<std::string> members;
    Complex member_sum = 0.0;
    for (const auto& seg : c.segments()) {
      if (eng() % 2 == 0) continue;
      members.push_back(seg.name);
      member_sum += scenario_weak_value(sc, det, segment_projector(sc, seg.name)).value;
    }
    if (members.empty()) continue;
    WeakValueResult coarse = coarse_grained_weak_value(members, sc, det);
    CHECK(std::abs(coarse.value - member_sum) < 1e-12);

    // resolution of identity over the complete cut
    std::vector<std::string> all;
    for (const auto& seg : c.segments()) all.push_back(seg.name);
    WeakValueResult whole = coarse_grained_weak_value(all, sc, det);
    CHECK(std::abs(whole.value - Complex(1, 0)) < 1e-10);
    (void)cut;
  }
}

TEST_CASE("cheshire cat: projector vanishes while sigma_z times it does not") {
  Scenario sc = build_scenario(BuiltinScenario::CheshireCat);
  WeakValueResult pr = compound_weak_value(Matrix::Identity(2, 2), {"R"}, sc, "F", 1);
  CHECK(std::abs(pr.value) < 1e-12);
  WeakValueResult szr = compound_weak_value(pauli_z(), {"R"}, sc, "F", 1);
  CHECK(std::abs(szr.value - Complex(0, -1)) < 1e-12);
  CHECK(std::abs(szr.value) >= 0.5);
  WeakValueResult pl = compound_weak_value(Matrix::Identity(2, 2), {"L"}, sc, "F", 1);
  CHECK(std::abs(pl.value - Complex(1, 0)) < 1e-12);
  // the grin is absent from the left arm
  WeakValueResult szl = compound_weak_value(pauli_z(), {"L"}, sc, "F", 1);
  CHECK(std::abs(szl.value) < 1e-12);
}

TEST_CASE("compound with identity property reduces to the plain projector") {
  Scenario sc = build_scenario(BuiltinScenario::CheshireCat);
  WeakValueResult compound = compound_weak_value(Matrix::Identity(2, 2), {"L"}, sc, "F", 1);
  WeakValueResult plain = scenario_weak_value(sc, "F", segment_projector(sc, "L"));
  CHECK(std::abs(compound.value - plain.value) < 1e-14);
}

TEST_CASE("product polarization states factor out of compound weak values") {
  // Nested layout with a polarization qubit riding along untouched: the
  // compound weak value on arm A factorizes into <sigma> * <P_A>_w = <sigma>.
  std::mt19937_64 eng(17);
  std::vector<ModeLabel> labels;
  for (const std::string w : {"A", "B", "C"}) {
    labels.push_back(ModeLabel{w, Pol::H, {}});
    labels.push_back(ModeLabel{w, Pol::V, {}});
  }
  Basis basis = Basis::lexicographic(std::move(labels));
  Scenario plain = build_scenario(BuiltinScenario::Nested);
  Circuit circuit(basis, plain.circuit.layers(), plain.circuit.segments(),
                  plain.circuit.detectors());

  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector2cd chi;
    chi << Complex(uniform(eng, -1, 1), uniform(eng, -1, 1)),
        Complex(uniform(eng, -1, 1), uniform(eng, -1, 1));
    chi.normalize();
    Vector in = Vector::Zero(basis.dim());
    in(basis.index_of(ModeLabel{"A", Pol::H, {}})) = chi(0);
    in(basis.index_of(ModeLabel{"A", Pol::V, {}})) = chi(1);
    Vector post = in;  // detector D2 sits on wire A; same polarization state

    Scenario sc;
    sc.name = "nested_pol";
    sc.circuit = circuit;
    sc.input = StateVector(basis, in);
    sc.postselections.emplace("D2", StateVector(basis, post));

    Matrix sigma = random_hermitian(path_basis(2), eng).mat;
    WeakValueResult r = compound_weak_value(sigma, {"A"}, sc, "D2", 4);
    Complex expect = chi.dot(sigma * chi);  // <chi|sigma|chi>
    CHECK(std::abs(r.value - expect) < 1e-10);
  }
}

TEST_CASE("compound operators require polarization sublevels") {
  Scenario sc = build_scenario(BuiltinScenario::Nested);
  CHECK_THROWS_AS(compound_weak_value(pauli_z(), {"A"}, sc, "D2", 4), BasisMismatchError);
}
