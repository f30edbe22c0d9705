#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/model.hpp"
#include "dia/parser.hpp"
#include "dia/profile.hpp"
#include "dia/validate.hpp"

namespace dia {

struct CheckResult {
  std::optional<Model> model;  // present iff no error diagnostics
  std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline bool same_diagnostic(const Diagnostic& a, const Diagnostic& b) {
  if (a.severity != b.severity || a.code != b.code || a.message != b.message)
    return false;
  if (a.span.has_value() != b.span.has_value()) return false;
  if (!a.span) return true;
  return a.span->file == b.span->file && a.span->start_line == b.span->start_line &&
         a.span->start_col == b.span->start_col &&
         a.span->end_line == b.span->end_line && a.span->end_col == b.span->end_col;
}

}  // namespace detail

// Parse + validate in one pass, keeping the first of any finding both
// stages report (the parser flags self-loops early; validate re-derives
// them for programmatic models).
inline CheckResult check_text(std::string_view text, std::string file = "<input>",
                              const Profile& profile = builtin_profile()) {
  CheckResult res;
  ParseResult parsed = parse(text, std::move(file));
  res.diagnostics = std::move(parsed.diagnostics);
  if (!parsed.model) return res;
  for (auto& d : validate(*parsed.model, profile)) {
    bool dup = false;
    for (const auto& seen : res.diagnostics)
      if (detail::same_diagnostic(seen, d)) {
        dup = true;
        break;
      }
    if (!dup) res.diagnostics.push_back(std::move(d));
  }
  if (!has_errors(res.diagnostics)) res.model = std::move(parsed.model);
  return res;
}

}  // namespace dia
