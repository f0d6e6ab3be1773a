#include "wvsim/result.hpp"

#include "wvsim/dsl.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wvsim {

namespace {

using Json = nlohmann::ordered_json;

Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

// NaN serializes as null; map it back when reading envelopes.
double double_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Complex complex_from(const Json& j) {
  return Complex(double_from(j.at("re")), double_from(j.at("im")));
}

Json payload_json(const WeakValuePayload& p) {
  Json j;
  j["operator"] = p.operator_desc;
  j["value"] = complex_json(p.result.value);
  j["numerator"] = complex_json(p.result.numerator);
  j["denominator"] = complex_json(p.result.denominator);
  j["postselection_probability"] = p.result.postselection_probability;
  return j;
}

Json payload_json(const TraceMapPayload& p) {
  Json j;
  j["detector"] = p.map.detector;
  j["overlap"] = complex_json(p.map.overlap);
  Json segs = Json::array();
  for (const auto& s : p.map.segments) {
    segs.push_back(Json{{"name", s.name},
                        {"cut", s.cut},
                        {"wire", s.wire},
                        {"forward", complex_json(s.forward_amplitude)},
                        {"backward", complex_json(s.backward_amplitude)},
                        {"conditional", complex_json(s.conditional_amplitude)},
                        {"weak_value", complex_json(s.weak_value)},
                        {"sign", s.sign}});
  }
  j["segments"] = std::move(segs);
  return j;
}

Json payload_json(const PointerSweepPayload& p) {
  Json j;
  j["operator"] = p.operator_desc;
  j["sigma"] = p.sigma;
  Json rows = Json::array();
  for (const auto& r : p.rows) {
    rows.push_back(Json{{"lambda", r.lambda},
                        {"mean_shift", r.mean_shift},
                        {"first_order_mean_shift", r.first_order_mean_shift},
                        {"residual_norm", r.residual_norm},
                        {"success_probability", r.success_probability}});
  }
  j["rows"] = std::move(rows);
  return j;
}

Json payload_json(const EnsemblePayload& p) {
  Json j;
  j["n_particles"] = p.n_particles;
  j["n_postselected"] = p.n_postselected;
  j["estimate"] = p.estimate;
  j["stderr"] = p.stderr_est;
  j["target"] = p.target;
  j["postselection_rate"] = p.postselection_rate;
  j["empty"] = p.empty;
  j["histogram"] = Json{{"lo", p.histogram.lo}, {"hi", p.histogram.hi},
                        {"counts", p.histogram.counts}};
  return j;
}

Json payload_json(const FringeSweepPayload& p) {
  Json j;
  Json reports = Json::array();
  for (const auto& r : p.reports) {
    reports.push_back(Json{{"theta_b", r.theta_b},
                           {"theta_c", r.theta_c},
                           {"D", r.distinguishability},
                           {"V", r.visibility},
                           {"leak", r.leak_probability},
                           {"dv_sum", r.dv_sum()}});
  }
  j["reports"] = std::move(reports);
  return j;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ",";
    s += fields[i];
  }
  s += "\n";
  return s;
}

std::string f(double x) { return format_double(x); }

std::string payload_csv(const WeakValuePayload& p) {
  std::string s = "value_re,value_im,numerator_re,numerator_im,denominator_re,denominator_im,"
                  "postselection_probability\n";
  s += csv_row({f(p.result.value.real()), f(p.result.value.imag()), f(p.result.numerator.real()),
                f(p.result.numerator.imag()), f(p.result.denominator.real()),
                f(p.result.denominator.imag()), f(p.result.postselection_probability)});
  return s;
}

std::string payload_csv(const TraceMapPayload& p) {
  std::string s = "segment,cut,wire,forward_re,forward_im,backward_re,backward_im,"
                  "conditional_re,conditional_im,weak_re,weak_im,sign\n";
  for (const auto& t : p.map.segments) {
    s += csv_row({t.name, std::to_string(t.cut), t.wire, f(t.forward_amplitude.real()),
                  f(t.forward_amplitude.imag()), f(t.backward_amplitude.real()),
                  f(t.backward_amplitude.imag()), f(t.conditional_amplitude.real()),
                  f(t.conditional_amplitude.imag()), f(t.weak_value.real()),
                  f(t.weak_value.imag()), std::to_string(t.sign)});
  }
  return s;
}

std::string payload_csv(const PointerSweepPayload& p) {
  std::string s = "lambda,mean_shift,first_order_mean_shift,residual_norm,success_probability\n";
  for (const auto& r : p.rows) {
    s += csv_row({f(r.lambda), f(r.mean_shift), f(r.first_order_mean_shift), f(r.residual_norm),
                  f(r.success_probability)});
  }
  return s;
}

std::string payload_csv(const EnsemblePayload& p) {
  std::string s = "n_particles,n_postselected,estimate,stderr,target,postselection_rate\n";
  s += csv_row({std::to_string(p.n_particles), std::to_string(p.n_postselected), f(p.estimate),
                f(p.stderr_est), f(p.target), f(p.postselection_rate)});
  return s;
}

std::string payload_csv(const FringeSweepPayload& p) {
  std::string s = "theta_b,theta_c,D,V,leak,dv_sum\n";
  for (const auto& r : p.reports) {
    s += csv_row({f(r.theta_b), f(r.theta_c), f(r.distinguishability), f(r.visibility),
                  f(r.leak_probability), f(r.dv_sum())});
  }
  return s;
}

WeakValuePayload weakvalue_from(const Json& j) {
  WeakValuePayload p;
  p.operator_desc = j.at("operator").get<std::string>();
  p.result.value = complex_from(j.at("value"));
  p.result.numerator = complex_from(j.at("numerator"));
  p.result.denominator = complex_from(j.at("denominator"));
  p.result.postselection_probability = j.at("postselection_probability").get<double>();
  return p;
}

TraceMapPayload tracemap_from(const Json& j) {
  TraceMapPayload p;
  p.map.detector = j.at("detector").get<std::string>();
  p.map.overlap = complex_from(j.at("overlap"));
  for (const auto& s : j.at("segments")) {
    SegmentTrace t;
    t.name = s.at("name").get<std::string>();
    t.cut = s.at("cut").get<int>();
    t.wire = s.at("wire").get<std::string>();
    t.forward_amplitude = complex_from(s.at("forward"));
    t.backward_amplitude = complex_from(s.at("backward"));
    t.conditional_amplitude = complex_from(s.at("conditional"));
    t.weak_value = complex_from(s.at("weak_value"));
    t.sign = s.at("sign").get<int>();
    p.map.segments.push_back(std::move(t));
  }
  return p;
}

PointerSweepPayload pointersweep_from(const Json& j) {
  PointerSweepPayload p;
  p.operator_desc = j.at("operator").get<std::string>();
  p.sigma = j.at("sigma").get<double>();
  for (const auto& r : j.at("rows")) {
    PointerSweepRow row;
    row.lambda = double_from(r.at("lambda"));
    row.mean_shift = double_from(r.at("mean_shift"));
    row.first_order_mean_shift = double_from(r.at("first_order_mean_shift"));
    row.residual_norm = double_from(r.at("residual_norm"));
    row.success_probability = double_from(r.at("success_probability"));
    p.rows.push_back(row);
  }
  return p;
}

EnsemblePayload ensemble_from(const Json& j) {
  EnsemblePayload p;
  p.n_particles = j.at("n_particles").get<std::int64_t>();
  p.n_postselected = j.at("n_postselected").get<std::int64_t>();
  p.estimate = j.at("estimate").get<double>();
  p.stderr_est = j.at("stderr").get<double>();
  p.target = j.at("target").get<double>();
  p.postselection_rate = j.at("postselection_rate").get<double>();
  p.empty = j.at("empty").get<bool>();
  p.histogram.lo = j.at("histogram").at("lo").get<double>();
  p.histogram.hi = j.at("histogram").at("hi").get<double>();
  p.histogram.counts = j.at("histogram").at("counts").get<std::vector<std::int64_t>>();
  return p;
}

FringeSweepPayload fringesweep_from(const Json& j) {
  FringeSweepPayload p;
  for (const auto& r : j.at("reports")) {
    FringeReport rep;
    rep.theta_b = r.at("theta_b").get<double>();
    rep.theta_c = r.at("theta_c").get<double>();
    rep.distinguishability = r.at("D").get<double>();
    rep.visibility = r.at("V").get<double>();
    rep.leak_probability = r.at("leak").get<double>();
    p.reports.push_back(rep);
  }
  return p;
}

}  // namespace

std::string emit(const ResultEnvelope& envelope, Format format) {
  if (format == Format::Json) {
    Json j;
    j["tool_version"] = envelope.tool_version;
    j["scenario"] = envelope.scenario_name;
    j["analysis"] = envelope.analysis;
    if (envelope.seed) j["seed"] = *envelope.seed;
    j["provenance"] = envelope.provenance;
    j["payload"] = std::visit([](const auto& p) { return payload_json(p); }, envelope.payload);
    return j.dump(2) + "\n";
  }
  std::string header = "# tool_version=" + envelope.tool_version +
                       " scenario=" + envelope.scenario_name + " analysis=" + envelope.analysis;
  if (envelope.seed) header += " seed=" + std::to_string(*envelope.seed);
  header += "\n";
  return header + std::visit([](const auto& p) { return payload_csv(p); }, envelope.payload);
}

ResultEnvelope parse_envelope(const std::string& bytes, Format format) {
  if (format != Format::Json) {
    throw InvalidArgumentError("envelope parsing supports JSON only");
  }
  Json j = Json::parse(bytes);
  ResultEnvelope env;
  env.tool_version = j.at("tool_version").get<std::string>();
  env.scenario_name = j.at("scenario").get<std::string>();
  env.analysis = j.at("analysis").get<std::string>();
  if (j.contains("seed")) env.seed = j.at("seed").get<std::uint64_t>();
  env.provenance = j.at("provenance").get<std::vector<std::string>>();
  const Json& p = j.at("payload");
  if (env.analysis == "weakvalue") {
    env.payload = weakvalue_from(p);
  } else if (env.analysis == "trace-map") {
    env.payload = tracemap_from(p);
  } else if (env.analysis == "pointer-sweep") {
    env.payload = pointersweep_from(p);
  } else if (env.analysis == "ensemble") {
    env.payload = ensemble_from(p);
  } else if (env.analysis == "fringe-sweep") {
    env.payload = fringesweep_from(p);
  } else {
    throw InvalidArgumentError("unknown analysis kind in envelope: " + env.analysis);
  }
  return env;
}

EnsemblePayload ensemble_payload(const EnsembleRun& run, int histogram_bins) {
  EnsemblePayload p;
  p.n_particles = run.n_particles;
  p.n_postselected = run.n_postselected;
  p.estimate = run.estimate;
  p.stderr_est = run.stderr_est;
  p.target = run.target;
  p.postselection_rate = run.n_particles > 0
                             ? static_cast<double>(run.n_postselected) /
                                   static_cast<double>(run.n_particles)
                             : 0.0;
  p.empty = run.empty;
  if (!run.readouts.empty() && histogram_bins > 0) {
    auto [mn, mx] = std::minmax_element(run.readouts.begin(), run.readouts.end());
    p.histogram.lo = *mn;
    p.histogram.hi = *mx;
    p.histogram.counts.assign(static_cast<std::size_t>(histogram_bins), 0);
    const double span = std::max(p.histogram.hi - p.histogram.lo, 1e-300);
    for (double x : run.readouts) {
      auto bin = static_cast<std::size_t>(std::min(
          static_cast<double>(histogram_bins - 1),
          std::floor((x - p.histogram.lo) / span * histogram_bins)));
      ++p.histogram.counts[bin];
    }
  }
  return p;
}

}  // namespace wvsim
