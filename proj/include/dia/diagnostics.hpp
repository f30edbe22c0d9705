#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dia {

enum class Severity { Error, Warning, Info };

inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "error";
}

// 1-based line/column, inclusive start, exclusive end.
struct SourceSpan {
  std::string file;
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // stable, e.g. "E002"
  std::string message;
  std::optional<SourceSpan> span;

  bool is_error() const { return severity == Severity::Error; }
};

inline Diagnostic error(std::string code, std::string message,
                        std::optional<SourceSpan> span = {}) {
  return {Severity::Error, std::move(code), std::move(message), std::move(span)};
}

inline Diagnostic warning(std::string code, std::string message,
                          std::optional<SourceSpan> span = {}) {
  return {Severity::Warning, std::move(code), std::move(message), std::move(span)};
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.is_error(); });
}

inline std::size_t count_errors(const std::vector<Diagnostic>& diags) {
  return std::count_if(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.is_error(); });
}

inline std::size_t count_warnings(const std::vector<Diagnostic>& diags) {
  return std::count_if(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Severity::Warning;
  });
}

// "file:line:col: severity[code]: message"; diagnostics produced from
// in-memory models have no span and fall back to the file name alone.
inline std::string render(const Diagnostic& d, std::string_view fallback_file = "") {
  std::string out;
  if (d.span) {
    out += d.span->file;
    out += ':';
    out += std::to_string(d.span->start_line);
    out += ':';
    out += std::to_string(d.span->start_col);
    out += ": ";
  } else if (!fallback_file.empty()) {
    out += fallback_file;
    out += ": ";
  }
  out += to_string(d.severity);
  out += '[';
  out += d.code;
  out += "]: ";
  out += d.message;
  return out;
}

struct DiagnosticCodeInfo {
  std::string_view code;
  std::string_view summary;
};

// Every code any operation can emit, one entry per rule. Tests enumerate
// this table and prove each code is both producible and unique.
inline const std::vector<DiagnosticCodeInfo>& diagnostic_registry() {
  static const std::vector<DiagnosticCodeInfo> table = {
      {"E001", "stereotype application targets an unknown element"},
      {"E002", "flow endpoint does not resolve to an element"},
      {"E003", "duplicate element id in model"},
      {"E004", "outgoing flow probability mass exceeds 1"},
      {"E005", "required annotation missing for element kind"},
      {"E006", "element is missing a required technology binding"},
      {"E007", "technology binding is not allowed at dpim level"},
      {"E008", "element kind is not allowed at the model's level"},
      {"E011", "unknown stereotype"},
      {"E012", "stereotype is not applicable to this kind or level"},
      {"E013", "tag value violates its declared type, unit, or range"},
      {"E014", "required tag is missing"},
      {"E015", "unknown tag for stereotype"},
      {"E100", "lexical error"},
      {"E101", "syntax error"},
      {"E102", "duplicate id in source text"},
      {"E103", "unknown keyword"},
      {"E105", "flow connects an element to itself"},
      {"E106", "flow probability out of (0, 1]"},
      {"E200", "transformation input is not a dpim model"},
      {"E201", "override names a technology absent from the catalog"},
      {"E202", "no catalog entry for element kind"},
      {"E203", "element id uses a reserved _svc/_host suffix"},
      {"E210", "transformation input is not a dtsm model"},
      {"E211", "element has no technology binding"},
      {"W212", "no deployment configuration for element; defaults applied"},
      {"W213", "override references an element absent from the model"},
      {"E220", "malformed configuration line"},
      {"E221", "configuration value has the wrong type"},
      {"E300", "emission input is not a ddsm model"},
      {"E301", "requirement targets an unknown node template"},
      {"E302", "duplicate node template name"},
      {"E303", "unexpected tosca definitions version"},
      {"E304", "hostedOn requirements form a cycle"},
      {"E400", "station has no service demand"},
      {"E401", "source has no outgoing flow"},
      {"E402", "flow routes traffic into something that is not a station"},
      {"E403", "analysis requires a dpim or dtsm model"},
      {"E410", "traffic equations are singular"},
      {"E420", "invalid simulation configuration"},
      {"E430", "predicted metric violates an SLA limit"},
      {"W431", "station is unstable; SLA cannot be evaluated"},
      {"E500", "unknown metric name"},
      {"E501", "malformed metrics row"},
      {"E502", "missing or bad metrics header"},
      {"W510", "metrics reference an element absent from the model"},
  };
  return table;
}

inline bool registry_contains(std::string_view code) {
  const auto& reg = diagnostic_registry();
  return std::any_of(reg.begin(), reg.end(),
                     [&](const DiagnosticCodeInfo& e) { return e.code == code; });
}

}  // namespace dia
