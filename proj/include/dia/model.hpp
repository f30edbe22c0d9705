#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/text.hpp"

namespace dia {

// ---------------------------------------------------------------------------
// Abstraction levels and element kinds
// ---------------------------------------------------------------------------

enum class Level { Dpim, Dtsm, Ddsm };

inline std::string_view to_keyword(Level l) {
  switch (l) {
    case Level::Dpim: return "dpim";
    case Level::Dtsm: return "dtsm";
    case Level::Ddsm: return "ddsm";
  }
  return "dpim";
}

inline std::optional<Level> level_from_keyword(std::string_view kw) {
  if (kw == "dpim") return Level::Dpim;
  if (kw == "dtsm") return Level::Dtsm;
  if (kw == "ddsm") return Level::Ddsm;
  return std::nullopt;
}

enum class Kind {
  SourceNode,
  ComputeNode,
  StorageNode,
  Host,
  PlatformService,
  DeployedComponent,
};

inline std::string_view to_keyword(Kind k) {
  switch (k) {
    case Kind::SourceNode: return "source";
    case Kind::ComputeNode: return "compute";
    case Kind::StorageNode: return "storage";
    case Kind::Host: return "host";
    case Kind::PlatformService: return "service";
    case Kind::DeployedComponent: return "component";
  }
  return "source";
}

inline std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::SourceNode: return "SourceNode";
    case Kind::ComputeNode: return "ComputeNode";
    case Kind::StorageNode: return "StorageNode";
    case Kind::Host: return "Host";
    case Kind::PlatformService: return "PlatformService";
    case Kind::DeployedComponent: return "DeployedComponent";
  }
  return "SourceNode";
}

inline std::optional<Kind> kind_from_keyword(std::string_view kw) {
  if (kw == "source") return Kind::SourceNode;
  if (kw == "compute") return Kind::ComputeNode;
  if (kw == "storage") return Kind::StorageNode;
  if (kw == "host") return Kind::Host;
  if (kw == "service") return Kind::PlatformService;
  if (kw == "component") return Kind::DeployedComponent;
  return std::nullopt;
}

inline bool kind_allowed_at(Kind k, Level l) {
  switch (k) {
    case Kind::SourceNode:
    case Kind::ComputeNode:
    case Kind::StorageNode:
      return l == Level::Dpim || l == Level::Dtsm;
    case Kind::Host:
    case Kind::PlatformService:
    case Kind::DeployedComponent:
      return l == Level::Ddsm;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Tagged values
// ---------------------------------------------------------------------------

enum class Unit { None, PerSecond, Milliseconds, Kilobytes, Gigabytes };

inline std::string_view unit_suffix(Unit u) {
  switch (u) {
    case Unit::None: return "";
    case Unit::PerSecond: return "/s";
    case Unit::Milliseconds: return "ms";
    case Unit::Kilobytes: return "Kb";
    case Unit::Gigabytes: return "Gb";
  }
  return "";
}

inline std::optional<Unit> unit_from_suffix(std::string_view s) {
  if (s == "/s") return Unit::PerSecond;
  if (s == "ms") return Unit::Milliseconds;
  if (s == "Kb") return Unit::Kilobytes;
  if (s == "Gb") return Unit::Gigabytes;
  return std::nullopt;
}

struct RealValue {
  double value = 0.0;
  Unit unit = Unit::None;

  friend bool operator==(const RealValue&, const RealValue&) = default;
};

// One of: real with unit, integer, string, boolean.
struct TaggedValue {
  std::variant<RealValue, std::int64_t, std::string, bool> v;

  static TaggedValue real(double value, Unit unit = Unit::None) {
    return {RealValue{value, unit}};
  }
  static TaggedValue integer(std::int64_t value) { return {value}; }
  static TaggedValue str(std::string value) { return {std::move(value)}; }
  static TaggedValue boolean(bool value) { return {value}; }

  bool is_real() const { return std::holds_alternative<RealValue>(v); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }

  // Integers promote to reals where a real is consumed.
  std::optional<double> as_real() const {
    if (auto* r = std::get_if<RealValue>(&v)) return r->value;
    if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::nullopt;
  }
  std::optional<std::int64_t> as_int() const {
    if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
    return std::nullopt;
  }
  const std::string* as_string() const { return std::get_if<std::string>(&v); }
  std::optional<bool> as_bool() const {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    return std::nullopt;
  }
  Unit unit() const {
    if (auto* r = std::get_if<RealValue>(&v)) return r->unit;
    return Unit::None;
  }

  std::string describe() const {
    if (auto* r = std::get_if<RealValue>(&v)) {
      std::string s = format_real(r->value);
      if (r->unit != Unit::None) {
        s += ' ';
        s += unit_suffix(r->unit);
      }
      return s;
    }
    if (auto* i = std::get_if<std::int64_t>(&v)) return format_int(*i);
    if (auto* s = std::get_if<std::string>(&v)) return escape_string_literal(*s);
    return *std::get_if<bool>(&v) ? "true" : "false";
  }

  friend bool operator==(const TaggedValue&, const TaggedValue&) = default;
};

// ---------------------------------------------------------------------------
// Annotations
// ---------------------------------------------------------------------------

struct TagAssignment {
  std::string name;
  TaggedValue value;
  std::optional<SourceSpan> span;  // ignored by equality

  friend bool operator==(const TagAssignment& a, const TagAssignment& b) {
    return a.name == b.name && a.value == b.value;
  }
};

struct StereotypeApplication {
  std::string stereotype;
  std::vector<TagAssignment> tags;
  std::optional<SourceSpan> span;  // ignored by equality

  const TagAssignment* find_tag(std::string_view name) const {
    for (const auto& t : tags)
      if (t.name == name) return &t;
    return nullptr;
  }

  friend bool operator==(const StereotypeApplication& a,
                         const StereotypeApplication& b) {
    return a.stereotype == b.stereotype && a.tags == b.tags;
  }
};

// ---------------------------------------------------------------------------
// Elements, flows, models
// ---------------------------------------------------------------------------

struct Element {
  std::string id;
  std::string name;
  Kind kind = Kind::SourceNode;
  std::optional<std::string> technology;
  std::vector<StereotypeApplication> annotations;
  std::optional<SourceSpan> span;  // ignored by equality

  const StereotypeApplication* annotation(std::string_view stereotype) const {
    for (const auto& a : annotations)
      if (a.stereotype == stereotype) return &a;
    return nullptr;
  }

  friend bool operator==(const Element& a, const Element& b) {
    return a.id == b.id && a.name == b.name && a.kind == b.kind &&
           a.technology == b.technology && a.annotations == b.annotations;
  }
};

struct Flow {
  std::string from;
  std::string to;
  double probability = 1.0;
  std::optional<SourceSpan> span;  // ignored by equality

  friend bool operator==(const Flow& a, const Flow& b) {
    return a.from == b.from && a.to == b.to && a.probability == b.probability;
  }
};

struct Model {
  std::string name;
  Level level = Level::Dpim;
  std::vector<Element> elements;
  std::vector<Flow> flows;

  const Element* find_element(std::string_view id) const {
    for (const auto& e : elements)
      if (e.id == id) return &e;
    return nullptr;
  }
  Element* find_element(std::string_view id) {
    for (auto& e : elements)
      if (e.id == id) return &e;
    return nullptr;
  }

  friend bool operator==(const Model& a, const Model& b) {
    return a.name == b.name && a.level == b.level && a.elements == b.elements &&
           a.flows == b.flows;
  }
};

// Provenance record tying transformation outputs to their inputs.
struct TraceLink {
  std::string rule;
  std::vector<std::string> sources;
  std::vector<std::string> targets;

  friend bool operator==(const TraceLink&, const TraceLink&) = default;
};

}  // namespace dia
