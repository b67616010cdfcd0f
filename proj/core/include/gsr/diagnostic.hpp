#pragma once

#include <map>
#include <string>
#include <vector>

namespace gsr {

/// 1-based location in a source file.
struct SourceSpan {
  std::string file;
  int line = 1;
  int column = 1;
  int length = 1;
  bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;  // "P002", "V5", "W1", ...
  std::string message;
  SourceSpan span;
  bool operator==(const Diagnostic&) const = default;
};

/// `code:file:line:col message`
std::string format_diagnostic(const Diagnostic& diagnostic);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Where each entity of a parsed diagram was declared. Keys are entity ids,
/// `handler#<index>` for handlers and `<entity>.<param>` for parameters.
class SourceMap {
 public:
  explicit SourceMap(std::string file = {}) : file_(std::move(file)) {}

  void set(const std::string& key, SourceSpan span) { spans_.insert_or_assign(key, std::move(span)); }
  /// Span for `key`, or a span at 1:1 of the file when unknown.
  SourceSpan get(const std::string& key) const;
  bool contains(const std::string& key) const { return spans_.count(key) != 0; }
  const std::string& file() const { return file_; }

 private:
  std::string file_;
  std::map<std::string, SourceSpan> spans_;
};

}  // namespace gsr
