#include "wvsim/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace wvsim {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_double(z.real());
  if (z.real() == 0.0) return format_double(z.imag()) + "i";
  std::string s = format_double(z.real());
  s += z.imag() < 0 ? "-" : "+";
  s += format_double(std::abs(z.imag())) + "i";
  return s;
}

namespace {

enum class Tok { Ident, Number, ImagNumber, Ket, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;   // ident text, ket label text, punct char
  double number = 0.0;
  int col = 1;
};

class LineLexer {
 public:
  LineLexer(std::string_view line, int line_no) : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(int col, const std::string& msg) const {
    throw ParseError(line_no_, col, msg);
  }

  Token next() {
    skip_ws();
    Token t;
    t.col = static_cast<int>(pos_) + 1;
    if (pos_ >= line_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = line_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_')) {
        ++pos_;
      }
      t.kind = Tok::Ident;
      t.text = std::string(line_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      if (pos_ < line_.size() && line_[pos_] == '.' && pos_ + 1 < line_.size() &&
          std::isdigit(static_cast<unsigned char>(line_[pos_ + 1]))) {
        ++pos_;
        while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
          ++pos_;
        }
      }
      if (pos_ < line_.size() && (line_[pos_] == 'e' || line_[pos_] == 'E')) {
        std::size_t mark = pos_;
        ++pos_;
        if (pos_ < line_.size() && (line_[pos_] == '+' || line_[pos_] == '-')) ++pos_;
        if (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
          while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) {
            ++pos_;
          }
        } else {
          pos_ = mark;
        }
      }
      std::string_view num = line_.substr(start, pos_ - start);
      double value = 0.0;
      auto res = std::from_chars(num.data(), num.data() + num.size(), value);
      if (res.ec != std::errc()) fail(t.col, "malformed number");
      if (pos_ < line_.size() && line_[pos_] == 'i') {
        ++pos_;
        t.kind = Tok::ImagNumber;
      } else {
        t.kind = Tok::Number;
      }
      t.number = value;
      return t;
    }
    if (c == '|') {
      std::size_t end = line_.find('>', pos_ + 1);
      if (end == std::string_view::npos) fail(t.col, "unterminated ket (missing '>')");
      t.kind = Tok::Ket;
      t.text = std::string(line_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return t;
    }
    static const std::string punct = "()+-*/=:.,";
    if (punct.find(c) != std::string::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      ++pos_;
      return t;
    }
    fail(t.col, std::string("unexpected character '") + c + "'");
  }

  int line_no() const { return line_no_; }

 private:
  void skip_ws() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }
  std::string_view line_;
  int line_no_;
  std::size_t pos_ = 0;
};

class TokenStream {
 public:
  TokenStream(std::string_view line, int line_no) : lexer_(line, line_no) { advance(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    advance();
    return t;
  }
  bool at_end() const { return current_.kind == Tok::End; }

  Token expect_ident(const std::string& what) {
    if (current_.kind != Tok::Ident) fail("expected " + what);
    return take();
  }
  void expect_punct(char c) {
    if (current_.kind != Tok::Punct || current_.text[0] != c) {
      fail(std::string("expected '") + c + "'");
    }
    take();
  }
  bool accept_punct(char c) {
    if (current_.kind == Tok::Punct && current_.text[0] == c) {
      take();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const { lexer_.fail(current_.col, msg); }
  [[noreturn]] void fail_at(int col, const std::string& msg) const { lexer_.fail(col, msg); }
  int line_no() const { return lexer_.line_no(); }

 private:
  void advance() { current_ = lexer_.next(); }
  LineLexer lexer_;
  Token current_;
};

ModeLabel parse_label_text(TokenStream& ts, int col, const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.empty() || parts[0].empty() || parts.size() > 3) {
    ts.fail_at(col, "malformed mode label '" + text + "'");
  }
  ModeLabel m;
  m.path = parts[0];
  if (parts.size() >= 2) {
    if (parts[1] == "H") {
      m.pol = Pol::H;
    } else if (parts[1] == "V") {
      m.pol = Pol::V;
    } else if (parts[1] == "_") {
      m.pol = std::nullopt;
    } else {
      ts.fail_at(col, "polarization must be H, V or _ in '" + text + "'");
    }
  }
  if (parts.size() == 3) {
    if (parts[2].empty()) ts.fail_at(col, "empty tag in mode label '" + text + "'");
    m.tag = parts[2];
  }
  return m;
}

// A mode reference in an element/detector statement: wire or wire.pol.
struct ModeRef {
  std::string wire;
  std::optional<Pol> pol;
  int col = 1;
};

ModeRef parse_mode_ref(TokenStream& ts) {
  Token t = ts.expect_ident("a mode name");
  ModeRef ref;
  ref.wire = t.text;
  ref.col = t.col;
  if (ts.accept_punct('.')) {
    Token p = ts.expect_ident("H or V");
    if (p.text == "H") {
      ref.pol = Pol::H;
    } else if (p.text == "V") {
      ref.pol = Pol::V;
    } else {
      ts.fail_at(p.col, "polarization must be H or V");
    }
  }
  return ref;
}

struct ExprValue {
  bool is_state = false;
  Complex scalar;
  std::vector<StateTerm> terms;
};

class ExprParser {
 public:
  explicit ExprParser(TokenStream& ts) : ts_(ts) {}

  ExprValue parse() { return parse_sum(); }

 private:
  ExprValue parse_sum() {
    ExprValue v = parse_term();
    while (ts_.peek().kind == Tok::Punct &&
           (ts_.peek().text == "+" || ts_.peek().text == "-")) {
      Token op = ts_.take();
      ExprValue rhs = parse_term();
      combine_add(v, rhs, op.text == "-", op.col);
    }
    return v;
  }

  ExprValue parse_term() {
    ExprValue v = parse_factor();
    while (ts_.peek().kind == Tok::Punct &&
           (ts_.peek().text == "*" || ts_.peek().text == "/")) {
      Token op = ts_.take();
      ExprValue rhs = parse_factor();
      if (op.text == "*") {
        combine_mul(v, rhs, op.col);
      } else {
        if (rhs.is_state) ts_.fail_at(op.col, "cannot divide by a state");
        if (rhs.scalar == Complex(0.0, 0.0)) ts_.fail_at(op.col, "division by zero");
        scale(v, Complex(1.0, 0.0) / rhs.scalar);
      }
    }
    return v;
  }

  ExprValue parse_factor() {
    if (ts_.peek().kind == Tok::Punct && ts_.peek().text == "-") {
      Token t = ts_.take();
      ExprValue v = parse_factor();
      scale(v, Complex(-1.0, 0.0));
      (void)t;
      return v;
    }
    return parse_primary();
  }

  ExprValue parse_primary() {
    const Token& p = ts_.peek();
    ExprValue v;
    switch (p.kind) {
      case Tok::Number: {
        Token t = ts_.take();
        v.scalar = Complex(t.number, 0.0);
        return v;
      }
      case Tok::ImagNumber: {
        Token t = ts_.take();
        v.scalar = Complex(0.0, t.number);
        return v;
      }
      case Tok::Ket: {
        Token t = ts_.take();
        v.is_state = true;
        v.terms.push_back(StateTerm{parse_label_text(ts_, t.col, t.text), Complex(1.0, 0.0)});
        return v;
      }
      case Tok::Ident: {
        Token t = ts_.take();
        if (t.text == "i") {
          v.scalar = Complex(0.0, 1.0);
          return v;
        }
        if (t.text == "pi") {
          v.scalar = Complex(std::numbers::pi, 0.0);
          return v;
        }
        if (t.text == "sqrt") {
          ts_.expect_punct('(');
          ExprValue inner = parse_sum();
          ts_.expect_punct(')');
          if (inner.is_state) ts_.fail_at(t.col, "sqrt of a state is not defined");
          v.scalar = std::sqrt(inner.scalar);
          return v;
        }
        ts_.fail_at(t.col, "unknown name '" + t.text + "' in expression");
      }
      case Tok::Punct:
        if (p.text == "(") {
          ts_.take();
          ExprValue inner = parse_sum();
          ts_.expect_punct(')');
          return inner;
        }
        ts_.fail("unexpected token in expression");
      case Tok::End:
        ts_.fail("unexpected end of expression");
    }
    ts_.fail("unexpected token in expression");
  }

  void scale(ExprValue& v, Complex c) {
    if (v.is_state) {
      for (auto& t : v.terms) t.amp *= c;
    } else {
      v.scalar *= c;
    }
  }

  void combine_add(ExprValue& a, ExprValue& b, bool negate, int col) {
    if (negate) scale(b, Complex(-1.0, 0.0));
    if (a.is_state != b.is_state) ts_.fail_at(col, "cannot add a scalar and a state");
    if (!a.is_state) {
      a.scalar += b.scalar;
      return;
    }
    for (auto& tb : b.terms) {
      bool merged = false;
      for (auto& ta : a.terms) {
        if (ta.label == tb.label) {
          ta.amp += tb.amp;
          merged = true;
          break;
        }
      }
      if (!merged) a.terms.push_back(tb);
    }
  }

  void combine_mul(ExprValue& a, ExprValue& b, int col) {
    if (a.is_state && b.is_state) ts_.fail_at(col, "cannot multiply two states");
    if (b.is_state) std::swap(a, b);
    scale(a, b.scalar);
  }

  TokenStream& ts_;
};

double parse_real_param(TokenStream& ts, const std::string& what) {
  int col = ts.peek().col;
  ExprParser ep(ts);
  ExprValue v = ep.parse();
  if (v.is_state) ts.fail_at(col, what + " must be a scalar");
  if (std::abs(v.scalar.imag()) > 1e-15) ts.fail_at(col, what + " must be real");
  return v.scalar.real();
}

double parse_keyed_real(TokenStream& ts, const std::string& key) {
  Token k = ts.expect_ident("'" + key + "='");
  if (k.text != key) ts.fail_at(k.col, "expected '" + key + "='");
  ts.expect_punct('=');
  return parse_real_param(ts, key);
}

int parse_int(TokenStream& ts, const std::string& what) {
  if (ts.peek().kind != Tok::Number) ts.fail("expected " + what);
  Token t = ts.take();
  double d = t.number;
  int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) ts.fail_at(t.col, what + " must be an integer");
  return i;
}

struct ParserState {
  ScenarioDocument doc;
  bool saw_version = false;
  bool saw_input = false;
  bool saw_tag_element = false;
  std::set<std::string> declared_wires;
  std::set<std::string> detector_names;
  std::set<std::string> segment_names;

  void require_wire(TokenStream& ts, const ModeRef& ref) const {
    if (!declared_wires.count(ref.wire)) {
      ts.fail_at(ref.col, "unknown mode '" + ref.wire + "' (declare it with 'mode')");
    }
    if (ref.pol) {
      ModeLabel want{ref.wire, ref.pol, {}};
      for (const auto& m : doc.modes) {
        if (m.path == ref.wire && m.pol == ref.pol) return;
      }
      ts.fail_at(ref.col, "mode '" + want.str() + "' was not declared");
    }
  }

  std::set<std::optional<Pol>> wire_levels(const std::string& wire) const {
    std::set<std::optional<Pol>> levels;
    for (const auto& m : doc.modes) {
      if (m.path == wire) levels.insert(m.pol);
    }
    return levels;
  }

  // Paired elements act sublevel by sublevel; mismatched wires would build a
  // non-unitary block, so reject them here with a location.
  void require_matching_wires(TokenStream& ts, const ModeRef& a, const ModeRef& b) const {
    if (wire_levels(a.wire) != wire_levels(b.wire)) {
      ts.fail_at(b.col, "wires '" + a.wire + "' and '" + b.wire +
                            "' have mismatched sublevel structure");
    }
  }

  void require_polarized(TokenStream& ts, const ModeRef& ref) const {
    auto levels = wire_levels(ref.wire);
    if (!levels.count(Pol::H) || !levels.count(Pol::V)) {
      ts.fail_at(ref.col, "wire '" + ref.wire + "' needs H and V sublevels");
    }
  }
};

void parse_statement(ParserState& st, TokenStream& ts) {
  Token head = ts.expect_ident("a statement keyword");
  const std::string& kw = head.text;
  ScenarioDocument& doc = st.doc;

  auto finish = [&]() {
    if (!ts.at_end()) ts.fail("trailing tokens after " + kw + " statement");
  };

  if (kw == "version") {
    if (st.saw_version) ts.fail_at(head.col, "duplicate version line");
    doc.version = parse_int(ts, "version number");
    if (doc.version != 1) ts.fail_at(head.col, "unsupported document version");
    st.saw_version = true;
    return finish();
  }
  if (kw == "scenario") {
    doc.name = ts.expect_ident("a scenario name").text;
    return finish();
  }
  if (kw == "mode") {
    ModeRef ref = parse_mode_ref(ts);
    ModeLabel m{ref.wire, ref.pol, {}};
    for (const auto& existing : doc.modes) {
      if (existing == m) ts.fail_at(ref.col, "duplicate mode declaration '" + m.str() + "'");
    }
    doc.modes.push_back(m);
    st.declared_wires.insert(ref.wire);
    return finish();
  }
  if (kw == "bs") {
    ModeRef a = parse_mode_ref(ts);
    ModeRef b = parse_mode_ref(ts);
    if (ts.peek().kind == Tok::Ident && ts.peek().text != "r") {
      ts.fail("bs takes exactly two modes");
    }
    st.require_wire(ts, a);
    st.require_wire(ts, b);
    st.require_matching_wires(ts, a, b);
    double r = parse_keyed_real(ts, "r");
    BsConvention conv = BsConvention::SymmetricI;
    if (ts.peek().kind == Tok::Ident && ts.peek().text == "conv") {
      ts.take();
      ts.expect_punct('=');
      Token c = ts.expect_ident("a convention name");
      if (c.text == "real") {
        conv = BsConvention::RealRotation;
      } else if (c.text != "symmetric_i") {
        ts.fail_at(c.col, "unknown beam splitter convention '" + c.text + "'");
      }
    }
    doc.layers.push_back(Element::beam_splitter(a.wire, b.wire, r, conv));
    return finish();
  }
  if (kw == "phase") {
    ModeRef m = parse_mode_ref(ts);
    st.require_wire(ts, m);
    double radians = parse_real_param(ts, "phase angle");
    doc.layers.push_back(Element::phase_shift(m.wire, radians, m.pol));
    return finish();
  }
  if (kw == "mirror") {
    ModeRef m = parse_mode_ref(ts);
    st.require_wire(ts, m);
    doc.layers.push_back(Element::mirror(m.wire));
    return finish();
  }
  if (kw == "pbs") {
    ModeRef a = parse_mode_ref(ts);
    ModeRef b = parse_mode_ref(ts);
    st.require_wire(ts, a);
    st.require_wire(ts, b);
    st.require_polarized(ts, a);
    st.require_polarized(ts, b);
    doc.layers.push_back(Element::polarizing_bs(a.wire, b.wire));
    return finish();
  }
  if (kw == "swmirror") {
    ModeRef m = parse_mode_ref(ts);
    ModeRef sink = parse_mode_ref(ts);
    st.require_wire(ts, m);
    st.require_wire(ts, sink);
    st.require_matching_wires(ts, m, sink);
    Token state = ts.expect_ident("'on' or 'off'");
    if (state.text != "on" && state.text != "off") {
      ts.fail_at(state.col, "switchable mirror state must be 'on' or 'off'");
    }
    doc.layers.push_back(Element::switchable_mirror(m.wire, sink.wire, state.text == "on"));
    return finish();
  }
  if (kw == "waveplate") {
    ModeRef m = parse_mode_ref(ts);
    st.require_wire(ts, m);
    st.require_polarized(ts, m);
    double theta = parse_keyed_real(ts, "theta");
    doc.layers.push_back(Element::waveplate(m.wire, theta));
    return finish();
  }
  if (kw == "tag") {
    ModeRef m = parse_mode_ref(ts);
    st.require_wire(ts, m);
    double theta = parse_keyed_real(ts, "theta");
    doc.layers.push_back(Element::tag(m.wire, theta));
    st.saw_tag_element = true;
    return finish();
  }
  if (kw == "identity") {
    ModeRef m = parse_mode_ref(ts);
    st.require_wire(ts, m);
    doc.layers.push_back(Element::identity(m.wire));
    return finish();
  }
  if (kw == "segment") {
    Token name = ts.expect_ident("a segment name");
    int cut = parse_int(ts, "a cut index");
    ModeRef wire = parse_mode_ref(ts);
    st.require_wire(ts, wire);
    if (!st.segment_names.insert(name.text).second) {
      ts.fail_at(name.col, "duplicate segment '" + name.text + "'");
    }
    doc.segments.push_back(Segment{name.text, cut, wire.wire});
    return finish();
  }
  if (kw == "detector") {
    Token name = ts.expect_ident("a detector name");
    ModeRef m = parse_mode_ref(ts);
    st.require_wire(ts, m);
    if (!st.detector_names.insert(name.text).second) {
      ts.fail_at(name.col, "duplicate detector '" + name.text + "'");
    }
    doc.detectors.push_back(Detector{name.text, m.wire, m.pol});
    return finish();
  }
  if (kw == "input") {
    if (st.saw_input) ts.fail_at(head.col, "duplicate input line");
    ts.expect_punct(':');
    int col = ts.peek().col;
    ExprParser ep(ts);
    ExprValue v = ep.parse();
    if (!v.is_state) ts.fail_at(col, "input must be a state expression");
    doc.input = std::move(v.terms);
    st.saw_input = true;
    return finish();
  }
  if (kw == "postselect") {
    Token det = ts.expect_ident("a detector name");
    if (!st.detector_names.count(det.text)) {
      ts.fail_at(det.col, "postselect references unknown detector '" + det.text + "'");
    }
    ts.expect_punct(':');
    int col = ts.peek().col;
    ExprParser ep(ts);
    ExprValue v = ep.parse();
    if (!v.is_state) ts.fail_at(col, "postselection must be a state expression");
    for (const auto& p : doc.postselections) {
      if (p.detector == det.text) {
        ts.fail_at(det.col, "duplicate postselection for detector '" + det.text + "'");
      }
    }
    doc.postselections.push_back(PostselectDecl{det.text, std::move(v.terms)});
    return finish();
  }
  if (kw == "analyze") {
    Token kind = ts.expect_ident("an analysis kind");
    static const std::set<std::string> kinds = {"weakvalue", "trace-map", "pointer-sweep",
                                                "ensemble", "fringe-sweep"};
    std::string kind_name = kind.text;
    // allow "trace-map" style names: ident '-' ident
    while (ts.peek().kind == Tok::Punct && ts.peek().text == "-") {
      ts.take();
      kind_name += "-" + ts.expect_ident("analysis kind continuation").text;
    }
    if (!kinds.count(kind_name)) ts.fail_at(kind.col, "unknown analysis kind '" + kind_name + "'");
    AnalysisRequest req;
    req.kind = kind_name;
    while (!ts.at_end()) {
      Token key = ts.expect_ident("a parameter name");
      ts.expect_punct('=');
      std::string value;
      const Token& vt = ts.peek();
      if (vt.kind == Tok::Ident) {
        value = ts.take().text;
      } else if (vt.kind == Tok::Number || vt.kind == Tok::ImagNumber) {
        Token num = ts.take();
        value = format_double(num.number);
        if (num.kind == Tok::ImagNumber) value += "i";
      } else {
        ts.fail("expected a parameter value");
      }
      req.params.emplace_back(key.text, value);
    }
    doc.analyses.push_back(std::move(req));
    return;
  }
  ts.fail_at(head.col, "unknown statement '" + kw + "'");
}

}  // namespace

ScenarioDocument parse_scenario(std::string_view text) {
  ParserState st;
  int line_no = 0;
  bool any_statement = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
    if (!blank) {
      TokenStream ts(line, line_no);
      parse_statement(st, ts);
      any_statement = true;
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (!any_statement) throw ParseError(1, 1, "empty scenario document");
  if (!st.saw_version) throw ParseError(1, 1, "missing 'version' line");
  if (st.doc.modes.empty()) throw ParseError(1, 1, "no modes declared");
  return st.doc;
}

namespace {

std::string mode_ref_str(const std::string& wire, const std::optional<Pol>& pol) {
  return pol ? wire + "." + to_string(*pol) : wire;
}

std::string element_line(const Element& e) {
  switch (e.kind) {
    case ElementKind::BeamSplitter: {
      std::string s = "bs " + e.wire_a + " " + e.wire_b + " r=" + format_double(e.param);
      if (e.convention == BsConvention::RealRotation) s += " conv=real";
      return s;
    }
    case ElementKind::PhaseShift:
      return "phase " + mode_ref_str(e.wire_a, e.pol_filter) + " " + format_double(e.param);
    case ElementKind::Mirror:
      return "mirror " + e.wire_a;
    case ElementKind::PolarizingBS:
      return "pbs " + e.wire_a + " " + e.wire_b;
    case ElementKind::SwitchableMirror:
      return "swmirror " + e.wire_a + " " + e.wire_b + (e.on ? " on" : " off");
    case ElementKind::Tag:
      return "tag " + e.wire_a + " theta=" + format_double(e.param);
    case ElementKind::Waveplate:
      return "waveplate " + e.wire_a + " theta=" + format_double(e.param);
    case ElementKind::Identity:
      return "identity " + e.wire_a;
  }
  throw Error("unreachable element kind");
}

std::string state_expr(const std::vector<StateTerm>& terms) {
  std::string s;
  for (const auto& t : terms) {
    if (!s.empty()) s += " + ";
    s += "(" + format_complex(t.amp) + ")*|" + t.label.str() + ">";
  }
  return s;
}

}  // namespace

std::string print_scenario(const ScenarioDocument& doc) {
  std::ostringstream out;
  out << "version " << doc.version << "\n";
  if (!doc.name.empty()) out << "scenario " << doc.name << "\n";
  for (const auto& m : doc.modes) out << "mode " << mode_ref_str(m.path, m.pol) << "\n";
  for (const auto& e : doc.layers) out << element_line(e) << "\n";
  for (const auto& s : doc.segments) {
    out << "segment " << s.name << " " << s.cut << " " << s.wire << "\n";
  }
  for (const auto& d : doc.detectors) {
    out << "detector " << d.name << " " << mode_ref_str(d.wire, d.pol) << "\n";
  }
  if (!doc.input.empty()) out << "input : " << state_expr(doc.input) << "\n";
  for (const auto& p : doc.postselections) {
    out << "postselect " << p.detector << " : " << state_expr(p.terms) << "\n";
  }
  for (const auto& a : doc.analyses) {
    out << "analyze " << a.kind;
    for (const auto& [k, v] : a.params) out << " " << k << "=" << v;
    out << "\n";
  }
  return out.str();
}

Scenario build_document(const ScenarioDocument& doc) {
  if (doc.modes.empty()) throw InvalidArgumentError("scenario document declares no modes");
  bool tagged = false;
  for (const auto& e : doc.layers) {
    if (e.kind == ElementKind::Tag) tagged = true;
  }
  std::vector<ModeLabel> labels;
  for (const auto& m : doc.modes) {
    if (m.tag) {
      throw InvalidArgumentError("tag sublevels are implicit; declare modes without tags");
    }
    if (tagged) {
      labels.push_back(ModeLabel{m.path, m.pol, std::string("0")});
      labels.push_back(ModeLabel{m.path, m.pol, std::string("1")});
    } else {
      labels.push_back(m);
    }
  }
  Basis basis = Basis::lexicographic(std::move(labels));
  Circuit circuit(basis, doc.layers, doc.segments, doc.detectors);

  auto build_state = [&](const std::vector<StateTerm>& terms, const std::string& what) {
    Vector v = Vector::Zero(basis.dim());
    for (const auto& t : terms) {
      auto idx = basis.find(t.label);
      if (!idx) {
        throw InvalidArgumentError(what + " references mode '" + t.label.str() +
                                   "' not present in the basis");
      }
      v(*idx) += t.amp;
    }
    StateVector s(basis, std::move(v));
    if (std::abs(s.norm() - 1.0) > kNormTol) {
      throw InvalidArgumentError(what + " state is not normalized");
    }
    return s;
  };

  if (doc.input.empty()) throw InvalidArgumentError("scenario document has no input state");
  Scenario sc;
  sc.name = doc.name;
  sc.circuit = std::move(circuit);
  sc.input = build_state(doc.input, "input");
  for (const auto& p : doc.postselections) {
    sc.postselections.emplace(p.detector,
                              build_state(p.terms, "postselection for " + p.detector));
  }
  return sc;
}

ScenarioDocument document_from_scenario(const Scenario& sc) {
  ScenarioDocument doc;
  doc.version = 1;
  doc.name = sc.name;
  const Basis& basis = sc.circuit.basis();
  bool tagged = false;
  for (const auto& m : basis.labels()) {
    if (m.tag) tagged = true;
  }
  for (const auto& m : basis.labels()) {
    ModeLabel declared{m.path, m.pol, {}};
    if (tagged && m.tag != std::optional<std::string>("0")) continue;
    bool seen = false;
    for (const auto& d : doc.modes) {
      if (d == declared) seen = true;
    }
    if (!seen) doc.modes.push_back(declared);
  }
  doc.layers = sc.circuit.layers();
  doc.segments = sc.circuit.segments();
  doc.detectors = sc.circuit.detectors();
  for (Index i = 0; i < basis.dim(); ++i) {
    if (sc.input.amps(i) != Complex(0.0, 0.0)) {
      doc.input.push_back(StateTerm{basis.label(i), sc.input.amps(i)});
    }
  }
  for (const auto& [name, state] : sc.postselections) {
    PostselectDecl decl;
    decl.detector = name;
    for (Index i = 0; i < basis.dim(); ++i) {
      if (state.amps(i) != Complex(0.0, 0.0)) {
        decl.terms.push_back(StateTerm{basis.label(i), state.amps(i)});
      }
    }
    doc.postselections.push_back(std::move(decl));
  }
  return doc;
}

}  // namespace wvsim
