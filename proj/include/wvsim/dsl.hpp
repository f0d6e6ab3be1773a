#pragma once

#include "wvsim/circuit.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wvsim {

class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + message),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

struct StateTerm {
  ModeLabel label;
  Complex amp;
  bool operator==(const StateTerm&) const = default;
};

struct PostselectDecl {
  std::string detector;
  std::vector<StateTerm> terms;
  bool operator==(const PostselectDecl&) const = default;
};

struct AnalysisRequest {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;
  bool operator==(const AnalysisRequest&) const = default;
};

/// Parsed form of a .wv scenario file. Mode declarations list wires and their
/// polarization sublevels; a tag element implies a shared tag qubit, doubling
/// the basis with tag levels 0/1.
struct ScenarioDocument {
  int version = 1;
  std::string name;
  std::vector<ModeLabel> modes;
  std::vector<Element> layers;
  std::vector<Segment> segments;
  std::vector<Detector> detectors;
  std::vector<StateTerm> input;
  std::vector<PostselectDecl> postselections;
  std::vector<AnalysisRequest> analyses;
  bool operator==(const ScenarioDocument&) const = default;
};

ScenarioDocument parse_scenario(std::string_view text);
std::string print_scenario(const ScenarioDocument& doc);

Scenario build_document(const ScenarioDocument& doc);
ScenarioDocument document_from_scenario(const Scenario& sc);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);
std::string format_complex(Complex z);

}  // namespace wvsim
