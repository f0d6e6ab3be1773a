#pragma once

#include "wvsim/ensemble.hpp"
#include "wvsim/fringe.hpp"
#include "wvsim/weakvalue.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wvsim {

enum class Format { Json, Csv };

struct WeakValuePayload {
  std::string operator_desc;
  WeakValueResult result;
};

struct TraceMapPayload {
  SegmentTraceMap map;
};

struct PointerSweepRow {
  double lambda = 0.0;
  double mean_shift = 0.0;
  double first_order_mean_shift = 0.0;
  double residual_norm = 0.0;
  double success_probability = 0.0;
};

struct PointerSweepPayload {
  std::string operator_desc;
  double sigma = 1.0;
  std::vector<PointerSweepRow> rows;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::int64_t> counts;
};

struct EnsemblePayload {
  std::int64_t n_particles = 0;
  std::int64_t n_postselected = 0;
  double estimate = 0.0;
  double stderr_est = 0.0;
  double target = 0.0;
  double postselection_rate = 0.0;
  bool empty = false;
  Histogram histogram;
};

struct FringeSweepPayload {
  std::vector<FringeReport> reports;
};

using Payload = std::variant<WeakValuePayload, TraceMapPayload, PointerSweepPayload,
                             EnsemblePayload, FringeSweepPayload>;

/// Versioned, reproducible result wrapper. JSON output round-trips losslessly;
/// CSV is a flat plot-ready view of the payload.
struct ResultEnvelope {
  std::string tool_version;
  std::string scenario_name;
  std::string analysis;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> provenance;
  Payload payload;
};

std::string emit(const ResultEnvelope& envelope, Format format);
ResultEnvelope parse_envelope(const std::string& bytes, Format format);

EnsemblePayload ensemble_payload(const EnsembleRun& run, int histogram_bins = 64);

}  // namespace wvsim
