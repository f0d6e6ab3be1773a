#include "wvsim/fringe.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace wvsim {

FringeReport analyze_tagged_inner(const Scenario& nested, double theta_b, double theta_c) {
  if (nested.name != "nested") {
    throw InvalidArgumentError("fringe analysis requires the nested scenario");
  }
  ScenarioParams params;
  params.theta_b = theta_b;
  params.theta_c = theta_c;
  params.with_tags = true;
  Scenario sc = build_scenario(BuiltinScenario::Nested, params);
  const Basis& basis = sc.circuit.basis();

  // Tag layers sit at layers 4 and 5; cut 6 is right after both tags.
  const int post_tag_cut = 6;
  StateVector mid = sc.circuit.propagate_forward(sc.input, post_tag_cut);

  auto arm_tag_state = [&](const std::string& wire) {
    auto idx = basis.indices_on_path(wire);
    Eigen::Vector2cd tau = Eigen::Vector2cd::Zero();
    for (Index i : idx) {
      const ModeLabel& m = basis.label(i);
      tau(m.tag == std::optional<std::string>("0") ? 0 : 1) = mid.amps(i);
    }
    return tau;
  };
  Eigen::Vector2cd amp_b = arm_tag_state("B");
  Eigen::Vector2cd amp_c = arm_tag_state("C");
  const double pb = amp_b.squaredNorm();
  const double pc = amp_c.squaredNorm();
  if (pb <= 0.0 || pc <= 0.0) throw Error("nested scenario lost an inner arm");
  Eigen::Vector2cd tau_b = amp_b / std::sqrt(pb);
  Eigen::Vector2cd tau_c = amp_c / std::sqrt(pc);

  const double wb = pb / (pb + pc);
  const double wc = pc / (pb + pc);
  const double ov = std::abs(tau_b.dot(tau_c));

  FringeReport r;
  r.theta_b = theta_b;
  r.theta_c = theta_c;
  r.visibility = 2.0 * std::sqrt(wb * wc) * ov;

  // Which-path distinguishability: trace norm of the weighted tag-state
  // difference. For equal-weight pure tags this is sqrt(1 - |overlap|^2).
  Eigen::Matrix2cd diff = wb * (tau_b * tau_b.adjoint()) - wc * (tau_c * tau_c.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(diff);
  r.distinguishability = es.eigenvalues().cwiseAbs().sum();

  // Leak to E: feed the inner pair on D (wire B at cut 2) and collect what
  // exits on the E wire after the recombining beam splitter.
  const int inner_in_cut = 2;
  const int post_inner_cut = 8;
  StateVector d_in = StateVector::ket(basis, ModeLabel{"B", {}, std::string("0")});
  StateVector out = sc.circuit.propagate_between(d_in, inner_in_cut, post_inner_cut);
  double leak = 0.0;
  for (Index i : basis.indices_on_path("B")) leak += std::norm(out.amps(i));
  r.leak_probability = leak;
  return r;
}

std::vector<FringeReport> dv_inequality_sweep(const std::vector<double>& theta_grid) {
  if (theta_grid.empty()) throw InvalidArgumentError("empty theta grid");
  Scenario nested = build_scenario(BuiltinScenario::Nested);
  std::vector<FringeReport> out;
  out.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    out.push_back(analyze_tagged_inner(nested, theta, 0.0));
  }
  return out;
}

}  // namespace wvsim
