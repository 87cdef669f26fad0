#pragma once

// Line-oriented text format for interferometer layouts (`.ifm` files).
//
//   # comment
//   vertex <L11|L12|L21|L22> <x> <y> <z>
//   beamsplitter <vertex> normal <x> <y> <z>
//   mirror <vertex> normal <x> <y> <z>
//   arm <from> <to> length <L> [label <name>]
//   source momentum <x> <y> <z> polarization <x> <y> <z> width <sigma>
//   bomb arm <label | from->to> [efficiency <e>]
//   detector <D1|D2> port <a|b>
//
// Directives may appear in any order. Detector lines are optional and default
// to D1 on port a and D2 on port b.

#include "ifm/interferometer.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ifm::dsl {

enum class Severity { error, warning };

struct Diagnostic {
  int line;    // 1-based
  int column;  // 1-based, in bytes
  Severity severity;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Result of parsing. `layout` is set only when `diagnostics` is empty;
/// warnings (such as an auto-normalized vector) never block the layout.
struct LayoutDocument {
  std::string source;
  std::optional<mzi::Layout> layout;
  std::vector<Diagnostic> diagnostics;
  std::vector<Diagnostic> warnings;

  bool ok() const { return diagnostics.empty() && layout.has_value(); }
};

/// Parses the whole text, collecting every error rather than stopping at the first.
LayoutDocument parse_layout(std::string_view text);

/// Canonical text: vertices, elements, arms, source, bomb, detectors, each
/// sorted by identifier; numbers with 17 significant digits so that parsing
/// the output reproduces the layout bit for bit.
std::string serialize_layout(const mzi::Layout& layout);

/// "<origin>:<line>:<column>: error: <message>".
std::string format_diagnostic(std::string_view origin, const Diagnostic& diagnostic);

}  // namespace ifm::dsl
