#pragma once

// Textual diagram format (.gsr): parser and canonical printer.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/diagnostic.hpp"
#include "gsr/model.hpp"

namespace gsr {

struct ParseResult {
  std::optional<Diagram> diagram;  // set iff diagnostics hold no error
  std::vector<Diagnostic> diagnostics;
  SourceMap spans;

  bool ok() const { return diagram.has_value(); }
};

/// Parses UTF-8 source. LF and CRLF line endings are accepted.
ParseResult parse(std::string_view source, std::string file = "<input>");

/// Canonical text for a diagram; `parse(print(d))` yields `d` again.
std::string print(const Diagram& diagram);

}  // namespace gsr
