#include "gsr/diagnostic.hpp"

#include <algorithm>

namespace gsr {

std::string format_diagnostic(const Diagnostic& d) {
  return d.code + ":" + d.span.file + ":" + std::to_string(d.span.line) + ":" +
         std::to_string(d.span.column) + " " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

SourceSpan SourceMap::get(const std::string& key) const {
  auto it = spans_.find(key);
  if (it != spans_.end()) return it->second;
  return SourceSpan{file_, 1, 1, 1};
}

}  // namespace gsr
