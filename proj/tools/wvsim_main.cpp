#include "wvsim/dsl.hpp"
#include "wvsim/ensemble.hpp"
#include "wvsim/fringe.hpp"
#include "wvsim/pointer.hpp"
#include "wvsim/result.hpp"
#include "wvsim/version.hpp"
#include "wvsim/weakvalue.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace wvsim;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitOrthogonal = 3;

struct CommonOpts {
  std::string scenario = "nested";
  std::string detector;
  std::string format = "json";
  std::string out;
  double theta_b = 0.0;
  double theta_c = 0.0;
  bool with_tags = false;
  int salih_m = 3;
  std::string mirrors = "on";
};

void add_scenario_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario, "builtin scenario name or .wv file path");
  cmd->add_option("--theta-b", o.theta_b, "nested: tag angle on arm B (radians)");
  cmd->add_option("--theta-c", o.theta_c, "nested: tag angle on arm C (radians)");
  cmd->add_flag("--with-tags", o.with_tags, "nested: include the tag qubit");
  cmd->add_option("--salih-m", o.salih_m, "salih: number of inner cycles M");
  cmd->add_option("--mirrors", o.mirrors, "salih: Bob's switchable mirrors (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
}

void add_output_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", o.out, "write output to a file instead of stdout");
}

bool is_builtin(const std::string& name) {
  for (const auto& n : builtin_scenario_names()) {
    if (n == name) return true;
  }
  return false;
}

Scenario resolve_scenario(const CommonOpts& o) {
  if (is_builtin(o.scenario)) {
    ScenarioParams params;
    params.theta_b = o.theta_b;
    params.theta_c = o.theta_c;
    params.with_tags = o.with_tags;
    params.inner_cycles = o.salih_m;
    params.mirrors_on = o.mirrors == "on";
    return build_scenario(o.scenario, params);
  }
  std::ifstream in(o.scenario);
  if (!in) throw InvalidArgumentError("cannot open scenario file: " + o.scenario);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return build_document(parse_scenario(buf.str()));
  } catch (const ParseError& e) {
    throw InvalidArgumentError(o.scenario + ":" + e.what());
  }
}

CutOperator resolve_operator(const Scenario& sc, const std::string& segment,
                             const std::vector<std::string>& segments,
                             const std::string& compound,
                             const std::vector<std::string>& region, std::optional<int> cut) {
  if (!compound.empty()) {
    if (region.empty()) throw InvalidArgumentError("--compound requires --region");
    if (!cut) throw InvalidArgumentError("--compound requires --cut");
    Matrix property;
    if (compound == "sigma_x") {
      property = pauli_x();
    } else if (compound == "sigma_y") {
      property = pauli_y();
    } else if (compound == "sigma_z") {
      property = pauli_z();
    } else if (compound == "identity") {
      property = Matrix::Identity(2, 2);
    } else {
      throw InvalidArgumentError("unknown property operator: " + compound);
    }
    std::set<std::string> wires(region.begin(), region.end());
    return compound_at(sc, property, wires, *cut, compound);
  }
  if (!segments.empty()) return coarse_projector(sc, segments);
  if (!segment.empty()) return segment_projector(sc, segment);
  throw InvalidArgumentError("select an operator: --segment, --segments or --compound");
}

void write_output(const CommonOpts& o, const ResultEnvelope& env) {
  std::string bytes = emit(env, o.format == "csv" ? Format::Csv : Format::Json);
  if (o.out.empty()) {
    std::cout << bytes;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InvalidArgumentError("cannot open output file: " + o.out);
  f << bytes;
}

ResultEnvelope make_envelope(const CommonOpts& o, const Scenario& sc, std::string analysis,
                             Payload payload, std::optional<std::uint64_t> seed = {}) {
  ResultEnvelope env;
  env.tool_version = kToolVersion;
  env.scenario_name = sc.name.empty() ? o.scenario : sc.name;
  env.analysis = std::move(analysis);
  env.seed = seed;
  env.provenance.push_back("scenario=" + o.scenario);
  if (!o.detector.empty()) env.provenance.push_back("detector=" + o.detector);
  env.payload = std::move(payload);
  return env;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw InvalidArgumentError("lambda sweep needs 0 < min < max and at least 2 points");
  }
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  }
  return xs;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"wvsim: weak values, two-state traces and pointer statistics for "
               "pre/post-selected interferometers"};
  app.require_subcommand(1);
  CommonOpts o;

  auto* wv = app.add_subcommand("weakvalue", "weak value of a projector or compound operator");
  std::string wv_segment;
  std::vector<std::string> wv_segments;
  std::string wv_compound;
  std::vector<std::string> wv_region;
  std::optional<int> wv_cut;
  add_scenario_opts(wv, o);
  add_output_opts(wv, o);
  wv->add_option("--detector", o.detector)->required();
  wv->add_option("--segment", wv_segment, "segment projector");
  wv->add_option("--segments", wv_segments, "coarse-grained projector over same-cut segments")
      ->delimiter(',');
  wv->add_option("--compound", wv_compound,
                 "property operator (sigma_x|sigma_y|sigma_z|identity)");
  wv->add_option("--region", wv_region, "wires for the compound projector")->delimiter(',');
  wv->add_option("--cut", wv_cut, "cut for the compound operator");

  auto* tm = app.add_subcommand("trace-map", "per-segment two-state trace map");
  add_scenario_opts(tm, o);
  add_output_opts(tm, o);
  tm->add_option("--detector", o.detector)->required();

  auto* ps = app.add_subcommand("pointer-sweep",
                                "pointer mean shift, first-order law and residual over lambda");
  std::string ps_segment;
  std::vector<std::string> ps_segments;
  std::string ps_compound;
  std::vector<std::string> ps_region;
  std::optional<int> ps_cut;
  double ps_sigma = 1.0;
  double ps_lambda_min = 1e-4, ps_lambda_max = 1e-2;
  int ps_points = 10;
  std::optional<double> ps_lambda;
  add_scenario_opts(ps, o);
  add_output_opts(ps, o);
  ps->add_option("--detector", o.detector)->required();
  ps->add_option("--segment", ps_segment);
  ps->add_option("--segments", ps_segments)->delimiter(',');
  ps->add_option("--compound", ps_compound);
  ps->add_option("--region", ps_region)->delimiter(',');
  ps->add_option("--cut", ps_cut);
  ps->add_option("--sigma", ps_sigma, "pointer spread");
  ps->add_option("--lambda-min", ps_lambda_min, "sweep start, in units of sigma");
  ps->add_option("--lambda-max", ps_lambda_max, "sweep end, in units of sigma");
  ps->add_option("--points", ps_points, "log-spaced sweep points");
  ps->add_option("--lambda", ps_lambda, "single coupling instead of a sweep");

  auto* en = app.add_subcommand("ensemble", "Monte Carlo weak-measure-then-postselect runs");
  std::string en_segment;
  double en_lambda = 0.01, en_sigma = 1.0;
  std::int64_t en_n = 100000;
  std::uint64_t en_seed = 1;
  add_scenario_opts(en, o);
  add_output_opts(en, o);
  en->add_option("--detector", o.detector)->required();
  en->add_option("--segment", en_segment)->required();
  en->add_option("--lambda", en_lambda, "coupling strength");
  en->add_option("--sigma", en_sigma, "pointer spread");
  en->add_option("--n", en_n, "number of particles");
  en->add_option("--seed", en_seed, "RNG seed (runs are bit-reproducible)");

  auto* fs = app.add_subcommand("fringe-sweep",
                                "distinguishability/visibility/leak over tag angles");
  int fs_points = 50;
  double fs_theta_max = std::acos(-1.0);
  std::optional<double> fs_theta_b, fs_theta_c;
  add_scenario_opts(fs, o);
  add_output_opts(fs, o);
  fs->add_option("--points", fs_points, "sweep points over [0, theta-max]");
  fs->add_option("--theta-max", fs_theta_max);
  fs->add_option("--single-theta-b", fs_theta_b, "single report at (theta_b, theta_c)");
  fs->add_option("--single-theta-c", fs_theta_c);

  auto* sc_cmd = app.add_subcommand("scenario", "inspect scenarios");
  sc_cmd->require_subcommand(1);
  auto* sc_list = sc_cmd->add_subcommand("list", "list builtin scenarios");
  auto* sc_show = sc_cmd->add_subcommand("show", "print a scenario as DSL text");
  add_scenario_opts(sc_show, o);
  std::string show_out;
  sc_show->add_option("--out", show_out, "write to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (sc_list->parsed()) {
    for (const auto& n : builtin_scenario_names()) std::cout << n << "\n";
    return kExitOk;
  }
  if (sc_show->parsed()) {
    Scenario sc = resolve_scenario(o);
    std::string text = print_scenario(document_from_scenario(sc));
    if (show_out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(show_out, std::ios::binary);
      if (!f) throw InvalidArgumentError("cannot open output file: " + show_out);
      f << text;
    }
    return kExitOk;
  }

  Scenario sc = resolve_scenario(o);

  if (wv->parsed()) {
    CutOperator op = resolve_operator(sc, wv_segment, wv_segments, wv_compound, wv_region, wv_cut);
    WeakValuePayload payload;
    payload.operator_desc = op.description;
    payload.result = scenario_weak_value(sc, o.detector, op);
    ResultEnvelope env = make_envelope(o, sc, "weakvalue", payload);
    env.provenance.push_back("operator=" + op.description);
    env.provenance.push_back("cut=" + std::to_string(op.cut));
    write_output(o, env);
    return kExitOk;
  }
  if (tm->parsed()) {
    TraceMapPayload payload;
    payload.map = segment_trace_map(sc, o.detector);
    write_output(o, make_envelope(o, sc, "trace-map", payload));
    return kExitOk;
  }
  if (ps->parsed()) {
    CutOperator op = resolve_operator(sc, ps_segment, ps_segments, ps_compound, ps_region, ps_cut);
    GaussianPointer pointer;
    pointer.sigma = ps_sigma;
    std::vector<double> lambdas;
    if (ps_lambda) {
      lambdas = {*ps_lambda};
    } else {
      lambdas = log_spaced(ps_lambda_min * ps_sigma, ps_lambda_max * ps_sigma, ps_points);
    }
    PointerSweepPayload payload;
    payload.operator_desc = op.description;
    payload.sigma = ps_sigma;
    for (double lambda : lambdas) {
      PointerOutcome out = pointer_outcome_at(sc, o.detector, op, pointer, lambda);
      payload.rows.push_back(PointerSweepRow{lambda, out.mean_shift, out.first_order_mean_shift,
                                             out.residual_norm, out.success_probability});
    }
    ResultEnvelope env = make_envelope(o, sc, "pointer-sweep", payload);
    env.provenance.push_back("operator=" + op.description);
    write_output(o, env);
    return kExitOk;
  }
  if (en->parsed()) {
    EnsembleConfig cfg;
    cfg.scenario = sc;
    cfg.detector = o.detector;
    cfg.op = segment_projector(sc, en_segment);
    cfg.lambda = en_lambda;
    cfg.pointer.sigma = en_sigma;
    cfg.n_particles = en_n;
    cfg.seed = en_seed;
    EnsembleRun r = run(cfg);
    ResultEnvelope env = make_envelope(o, sc, "ensemble", ensemble_payload(r), en_seed);
    env.provenance.push_back("operator=" + cfg.op.description);
    env.provenance.push_back("lambda=" + format_double(en_lambda));
    env.provenance.push_back("sigma=" + format_double(en_sigma));
    write_output(o, env);
    return kExitOk;
  }
  if (fs->parsed()) {
    FringeSweepPayload payload;
    if (fs_theta_b || fs_theta_c) {
      payload.reports.push_back(
          analyze_tagged_inner(sc, fs_theta_b.value_or(0.0), fs_theta_c.value_or(0.0)));
    } else {
      if (fs_points < 1) throw InvalidArgumentError("--points must be >= 1");
      std::vector<double> grid(static_cast<std::size_t>(fs_points));
      for (int i = 0; i < fs_points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            fs_points == 1 ? 0.0 : fs_theta_max * i / (fs_points - 1);
      }
      payload.reports = dv_inequality_sweep(grid);
    }
    write_output(o, make_envelope(o, sc, "fringe-sweep", payload));
    return kExitOk;
  }
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const wvsim::OrthogonalPostselectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOrthogonal;
  } catch (const wvsim::NoClickError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOrthogonal;
  } catch (const wvsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
