#include "ifm/layout_dsl.hpp"

#include "ifm/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace ifm::dsl {

namespace {

using mzi::ArmId;
using mzi::Detector;
using mzi::Port;
using mzi::Vertex;
using optics::Vec3;

constexpr double kUnitTolerance = 1e-12;

struct Token {
  std::string_view text;
  int column;
};

std::vector<Token> tokenize(std::string_view line) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) {
      tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
  }
  return tokens;
}

std::optional<double> to_number(std::string_view text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string number(double v) { return fmt::format("{:.17g}", v); }

std::string vec(const Vec3& v) {
  return fmt::format("{} {} {}", number(v.x()), number(v.y()), number(v.z()));
}

struct PendingElement {
  optics::ElementKind kind;
  Vec3 normal;
  int line;
  int column;
};

struct PendingBomb {
  std::string arm;
  double efficiency;
  int line;
  int column;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  LayoutDocument run() {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text_.size()) {
      const std::size_t nl = text_.find('\n', pos);
      const std::string_view line =
          text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      parse_line(tokenize(line), line_no);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    last_line_ = std::max(1, line_no);

    LayoutDocument doc;
    doc.source = std::string(text_);
    std::optional<mzi::Layout> layout = assemble();
    doc.diagnostics = std::move(errors_);
    doc.warnings = std::move(warnings_);
    if (doc.diagnostics.empty()) doc.layout = std::move(layout);
    return doc;
  }

 private:
  void error(int line, int column, std::string message) {
    errors_.push_back({line, column, Severity::error, std::move(message)});
  }
  void warning(int line, int column, std::string message) {
    warnings_.push_back({line, column, Severity::warning, std::move(message)});
  }

  // Reports a missing token one column past the end of the last token.
  int end_column(const std::vector<Token>& t) const {
    return t.back().column + static_cast<int>(t.back().text.size());
  }

  bool expect_keyword(const std::vector<Token>& t, std::size_t i, std::string_view keyword,
                      int line) {
    if (i >= t.size()) {
      error(line, end_column(t), fmt::format("expected '{}'", keyword));
      return false;
    }
    if (t[i].text != keyword) {
      error(line, t[i].column, fmt::format("expected '{}', found '{}'", keyword, t[i].text));
      return false;
    }
    return true;
  }

  std::optional<double> read_number(const std::vector<Token>& t, std::size_t i,
                                    std::string_view what, int line) {
    if (i >= t.size()) {
      error(line, end_column(t), fmt::format("missing {}", what));
      return std::nullopt;
    }
    auto v = to_number(t[i].text);
    if (!v) error(line, t[i].column, fmt::format("{} '{}' is not a finite number", what, t[i].text));
    return v;
  }

  std::optional<Vec3> read_vector(const std::vector<Token>& t, std::size_t i,
                                  std::string_view what, int line) {
    if (i + 3 > t.size()) {
      error(line, i < t.size() ? t[i].column : end_column(t),
            fmt::format("malformed {}: expected 3 components", what));
      return std::nullopt;
    }
    Vec3 v;
    for (int k = 0; k < 3; ++k) {
      const auto c = to_number(t[i + static_cast<std::size_t>(k)].text);
      if (!c) {
        error(line, t[i + static_cast<std::size_t>(k)].column,
              fmt::format("malformed {}: component '{}' is not a finite number", what,
                          t[i + static_cast<std::size_t>(k)].text));
        return std::nullopt;
      }
      v[k] = *c;
    }
    return v;
  }

  std::optional<Vertex> read_vertex(const std::vector<Token>& t, std::size_t i, int line) {
    if (i >= t.size()) {
      error(line, end_column(t), "missing vertex id");
      return std::nullopt;
    }
    auto v = mzi::parse_vertex(t[i].text);
    if (!v) {
      error(line, t[i].column,
            fmt::format("unknown vertex '{}', expected L11, L12, L21 or L22", t[i].text));
    }
    return v;
  }

  void no_trailing(const std::vector<Token>& t, std::size_t i, int line) {
    if (i < t.size()) error(line, t[i].column, fmt::format("unexpected '{}'", t[i].text));
  }

  // Normalizes a direction, warning when it was not already unit length.
  std::optional<Vec3> unit(const Vec3& v, std::string_view what, int line, int column) {
    const double n = v.norm();
    if (!(n > 0.0)) {
      error(line, column, fmt::format("degenerate {}: vector has zero length", what));
      return std::nullopt;
    }
    if (std::abs(n - 1.0) > kUnitTolerance) {
      warning(line, column, fmt::format("{} has length {}; normalized", what, n));
      return Vec3(v / n);
    }
    return v;
  }

  void parse_line(const std::vector<Token>& t, int line) {
    if (t.empty()) return;
    const std::string_view directive = t[0].text;
    if (directive == "vertex") {
      parse_vertex_line(t, line);
    } else if (directive == "beamsplitter") {
      parse_element(t, line, optics::ElementKind::beamsplitter);
    } else if (directive == "mirror") {
      parse_element(t, line, optics::ElementKind::mirror);
    } else if (directive == "arm") {
      parse_arm(t, line);
    } else if (directive == "source") {
      parse_source(t, line);
    } else if (directive == "bomb") {
      parse_bomb(t, line);
    } else if (directive == "detector") {
      parse_detector(t, line);
    } else {
      error(line, t[0].column, fmt::format("unknown directive '{}'", directive));
    }
  }

  void parse_vertex_line(const std::vector<Token>& t, int line) {
    const auto id = read_vertex(t, 1, line);
    const auto pos = read_vector(t, 2, "vertex position", line);
    if (!id || !pos) return;
    no_trailing(t, 5, line);
    if (vertices_.contains(*id)) {
      error(line, t[1].column, fmt::format("vertex {} is defined twice (first on line {})",
                                           t[1].text, vertex_lines_[*id]));
      return;
    }
    vertices_[*id] = *pos;
    vertex_lines_[*id] = line;
  }

  void parse_element(const std::vector<Token>& t, int line, optics::ElementKind kind) {
    const auto id = read_vertex(t, 1, line);
    if (!expect_keyword(t, 2, "normal", line)) return;
    const auto normal = read_vector(t, 3, "normal", line);
    if (!id || !normal) return;
    no_trailing(t, 6, line);
    const auto n = unit(*normal, "normal", line, t[3].column);
    if (!n) {
      rejected_elements_.insert(*id);
      return;
    }
    if (const auto it = elements_.find(*id); it != elements_.end()) {
      error(line, t[0].column, fmt::format("duplicate element at {} (first on line {})",
                                           t[1].text, it->second.line));
      return;
    }
    elements_[*id] = PendingElement{kind, *n, line, t[0].column};
  }

  void parse_arm(const std::vector<Token>& t, int line) {
    const auto from = read_vertex(t, 1, line);
    const auto to = read_vertex(t, 2, line);
    if (!expect_keyword(t, 3, "length", line)) return;
    const auto length = read_number(t, 4, "arm length", line);
    if (!from || !to || !length) return;
    std::string label;
    if (t.size() > 5) {
      if (!expect_keyword(t, 5, "label", line)) return;
      if (t.size() < 7) {
        error(line, end_column(t), "missing arm label");
        return;
      }
      label = std::string(t[6].text);
      no_trailing(t, 7, line);
    }
    const ArmId id{*from, *to};
    bool known = false;
    for (const ArmId& a : mzi::kArms) known = known || a == id;
    if (!known) {
      error(line, t[1].column,
            fmt::format("arm {} is not part of the interferometer; expected one of "
                        "L11->L12, L11->L21, L12->L22, L21->L22",
                        mzi::to_string(id)));
      return;
    }
    if (!(*length > 0.0)) {
      error(line, t[4].column, fmt::format("arm length {} must be positive", t[4].text));
      return;
    }
    if (const auto it = arm_lines_.find(id); it != arm_lines_.end()) {
      error(line, t[0].column, fmt::format("arm {} is defined twice (first on line {})",
                                           mzi::to_string(id), it->second));
      return;
    }
    if (!label.empty()) {
      for (const auto& [other, arm] : arms_) {
        if (arm.label == label) {
          error(line, t[6].column, fmt::format("arm label '{}' is already used", label));
          return;
        }
      }
    }
    arms_[id] = mzi::Arm{id, *length, label};
    arm_lines_[id] = line;
  }

  void parse_source(const std::vector<Token>& t, int line) {
    if (source_line_ != 0) {
      error(line, t[0].column, fmt::format("source is defined twice (first on line {})",
                                           source_line_));
      return;
    }
    if (!expect_keyword(t, 1, "momentum", line)) return;
    const auto p = read_vector(t, 2, "momentum", line);
    if (!p) return;
    if (!expect_keyword(t, 5, "polarization", line)) return;
    const auto eps = read_vector(t, 6, "polarization", line);
    if (!eps) return;
    if (!expect_keyword(t, 9, "width", line)) return;
    const auto width = read_number(t, 10, "packet width", line);
    if (!width) return;
    no_trailing(t, 11, line);

    if (!(p->norm() > 0.0)) {
      error(line, t[2].column, "degenerate momentum: vector has zero length");
      return;
    }
    const auto unit_eps = unit(*eps, "polarization", line, t[6].column);
    if (!unit_eps) return;
    if (!(*width > 0.0)) {
      error(line, t[10].column, fmt::format("packet width {} must be positive", t[10].text));
      return;
    }
    try {
      source_.emplace(mzi::Source{optics::PhotonMode(optics::Momentum3(*p), *unit_eps), *width});
      source_line_ = line;
    } catch (const ValidationError& e) {
      error(line, t[6].column, e.what());
    }
  }

  void parse_bomb(const std::vector<Token>& t, int line) {
    if (bomb_) {
      error(line, t[0].column, fmt::format("bomb is defined twice (first on line {})",
                                           bomb_->line));
      return;
    }
    if (!expect_keyword(t, 1, "arm", line)) return;
    if (t.size() < 3) {
      error(line, end_column(t), "missing arm label for the bomb");
      return;
    }
    double efficiency = 1.0;
    if (t.size() > 3) {
      if (!expect_keyword(t, 3, "efficiency", line)) return;
      const auto e = read_number(t, 4, "efficiency", line);
      if (!e) return;
      if (!(*e >= 0.0 && *e <= 1.0)) {
        error(line, t[4].column, fmt::format("efficiency {} is outside [0, 1]", t[4].text));
        return;
      }
      efficiency = *e;
      no_trailing(t, 5, line);
    }
    bomb_ = PendingBomb{std::string(t[2].text), efficiency, line, t[2].column};
  }

  void parse_detector(const std::vector<Token>& t, int line) {
    if (t.size() < 2) {
      error(line, end_column(t), "missing detector id");
      return;
    }
    std::optional<Detector> d;
    if (t[1].text == "D1") d = Detector::D1;
    if (t[1].text == "D2") d = Detector::D2;
    if (!d) {
      error(line, t[1].column, fmt::format("unknown detector '{}', expected D1 or D2", t[1].text));
      return;
    }
    if (!expect_keyword(t, 2, "port", line)) return;
    if (t.size() < 4) {
      error(line, end_column(t), "missing port");
      return;
    }
    std::optional<Port> port;
    if (t[3].text == "a") port = Port::a;
    if (t[3].text == "b") port = Port::b;
    if (!port) {
      error(line, t[3].column, fmt::format("unknown port '{}', expected a or b", t[3].text));
      return;
    }
    no_trailing(t, 4, line);
    if (detector_lines_.contains(*d)) {
      error(line, t[1].column, fmt::format("detector {} is defined twice (first on line {})",
                                           t[1].text, detector_lines_[*d]));
      return;
    }
    detectors_[*d] = *port;
    detector_lines_[*d] = line;
  }

  std::optional<mzi::Layout> assemble() {
    const int end = last_line_;
    for (Vertex v : {Vertex::L11, Vertex::L12, Vertex::L21, Vertex::L22}) {
      if (!vertices_.contains(v)) {
        error(end, 1, fmt::format("missing mandatory vertex {}", mzi::to_string(v)));
      }
    }

    const std::pair<Vertex, optics::ElementKind> expected[] = {
        {Vertex::L11, optics::ElementKind::beamsplitter},
        {Vertex::L12, optics::ElementKind::mirror},
        {Vertex::L21, optics::ElementKind::mirror},
        {Vertex::L22, optics::ElementKind::beamsplitter}};
    std::map<Vertex, optics::OpticalElement> elements;
    for (const auto& [v, kind] : expected) {
      const auto it = elements_.find(v);
      if (it == elements_.end()) {
        if (rejected_elements_.contains(v)) continue;
        error(end, 1, fmt::format("missing {} at {}", optics::to_string(kind), mzi::to_string(v)));
        continue;
      }
      if (it->second.kind != kind) {
        error(it->second.line, it->second.column,
              fmt::format("{} must hold a {}, not a {}", mzi::to_string(v),
                          optics::to_string(kind), optics::to_string(it->second.kind)));
        continue;
      }
      elements.emplace(v, optics::make_element(kind, it->second.normal, mzi::to_string(v)));
    }

    for (const ArmId& id : mzi::kArms) {
      if (!arms_.contains(id)) error(end, 1, fmt::format("missing arm {}", mzi::to_string(id)));
    }
    if (!source_) error(end, 1, "missing source line");

    std::map<Detector, Port> detectors = detectors_;
    if (!detectors.contains(Detector::D1)) {
      detectors[Detector::D1] =
          detectors.contains(Detector::D2) && detectors[Detector::D2] == Port::a ? Port::b
                                                                                 : Port::a;
    }
    if (!detectors.contains(Detector::D2)) {
      detectors[Detector::D2] = detectors[Detector::D1] == Port::a ? Port::b : Port::a;
    }
    if (detectors[Detector::D1] == detectors[Detector::D2]) {
      error(detector_lines_[Detector::D2], 1, "detectors D1 and D2 watch the same port");
    }

    std::optional<mzi::Obstruction> obstruction;
    if (bomb_) {
      std::optional<ArmId> arm;
      for (const auto& [id, a] : arms_) {
        if (a.label == bomb_->arm || mzi::to_string(id) == bomb_->arm) arm = id;
      }
      if (!arm) {
        error(bomb_->line, bomb_->column, fmt::format("bomb refers to unknown arm '{}'", bomb_->arm));
      } else {
        obstruction = mzi::Obstruction{*arm, bomb_->efficiency};
      }
    }

    if (!errors_.empty()) return std::nullopt;

    mzi::Layout layout{vertices_, std::move(elements), arms_, *source_, obstruction,
                       std::move(detectors)};
    try {
      mzi::validate_layout(layout);
    } catch (const Error& e) {
      error(end, 1, e.what());
      return std::nullopt;
    }
    return layout;
  }

  std::string_view text_;
  int last_line_ = 1;
  std::vector<Diagnostic> errors_;
  std::vector<Diagnostic> warnings_;

  std::map<Vertex, Vec3> vertices_;
  std::map<Vertex, int> vertex_lines_;
  std::map<Vertex, PendingElement> elements_;
  std::set<Vertex> rejected_elements_;  // already reported, not missing
  std::map<ArmId, mzi::Arm> arms_;
  std::map<ArmId, int> arm_lines_;
  std::optional<mzi::Source> source_;
  int source_line_ = 0;
  std::optional<PendingBomb> bomb_;
  std::map<Detector, Port> detectors_;
  std::map<Detector, int> detector_lines_;
};

}  // namespace

LayoutDocument parse_layout(std::string_view text) { return Parser(text).run(); }

std::string serialize_layout(const mzi::Layout& layout) {
  std::string out;
  for (const auto& [v, pos] : layout.vertices) {
    out += fmt::format("vertex {} {}\n", mzi::to_string(v), vec(pos));
  }
  for (const auto& [v, element] : layout.elements) {
    out += fmt::format("{} {} normal {}\n", optics::to_string(element.kind), mzi::to_string(v),
                       vec(element.reflection.normal()));
  }
  for (const auto& [id, arm] : layout.arms) {
    out += fmt::format("arm {} {} length {}", mzi::to_string(id.from), mzi::to_string(id.to),
                       number(arm.length));
    if (!arm.label.empty()) out += fmt::format(" label {}", arm.label);
    out += '\n';
  }
  const auto& mode = layout.source.mode;
  out += fmt::format("source momentum {} polarization {} width {}\n",
                     vec(mode.momentum().components()), vec(mode.polarization()),
                     number(layout.source.width));
  if (layout.obstruction) {
    const auto& arm = layout.arms.at(layout.obstruction->arm);
    out += fmt::format("bomb arm {} efficiency {}\n",
                       arm.label.empty() ? mzi::to_string(arm.id) : arm.label,
                       number(layout.obstruction->efficiency));
  }
  for (const auto& [d, port] : layout.detectors) {
    out += fmt::format("detector {} port {}\n", mzi::to_string(d), mzi::to_string(port));
  }
  return out;
}

std::string format_diagnostic(std::string_view origin, const Diagnostic& diagnostic) {
  return fmt::format("{}:{}:{}: {}: {}", origin, diagnostic.line, diagnostic.column,
                     diagnostic.severity == Severity::error ? "error" : "warning",
                     diagnostic.message);
}

}  // namespace ifm::dsl
