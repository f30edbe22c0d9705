#pragma once

#include <string>

#include "dia/model.hpp"
#include "dia/text.hpp"

namespace dia {

namespace detail {

inline std::string format_tagged_value(const TaggedValue& v) {
  if (auto* r = std::get_if<RealValue>(&v.v)) {
    std::string out = format_real(r->value);
    if (r->unit != Unit::None) out += " " + std::string(unit_suffix(r->unit));
    return out;
  }
  if (auto* i = std::get_if<std::int64_t>(&v.v)) return format_int(*i);
  if (auto* s = std::get_if<std::string>(&v.v)) return escape_string_literal(*s);
  return std::get<bool>(v.v) ? "true" : "false";
}

inline std::string format_annotation(const StereotypeApplication& ann) {
  std::string out = "@" + ann.stereotype + "(";
  bool first = true;
  for (const auto& tag : ann.tags) {
    if (!first) out += ", ";
    first = false;
    out += tag.name + " = " + format_tagged_value(tag.value);
  }
  out += ")";
  return out;
}

}  // namespace detail

// Canonical source text: 2-space indent, one statement per line, elements
// before flows, annotations on the declaration line, reals with minimal
// digits and at least one decimal. parse(format(m)) is structurally equal
// to m for every structurally valid model.
inline std::string format(const Model& m) {
  std::string out = "model " + escape_string_literal(m.name) + " level " +
                    std::string(to_keyword(m.level)) + " {\n";
  for (const auto& e : m.elements) {
    out += "  " + std::string(to_keyword(e.kind)) + " " + e.id;
    if (e.technology) out += ": " + *e.technology;
    for (const auto& ann : e.annotations) out += " " + detail::format_annotation(ann);
    out += "\n";
  }
  for (const auto& f : m.flows) {
    out += "  flow " + f.from + " -> " + f.to;
    if (f.probability != 1.0) out += " prob " + format_real(f.probability);
    out += "\n";
  }
  out += "}\n";
  return out;
}

}  // namespace dia
