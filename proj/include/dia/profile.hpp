#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dia/model.hpp"

namespace dia {

enum class TagType { Real, Int, String, Bool };

inline std::string_view to_string(TagType t) {
  switch (t) {
    case TagType::Real: return "real";
    case TagType::Int: return "int";
    case TagType::String: return "string";
    case TagType::Bool: return "bool";
  }
  return "real";
}

// Admissible numeric interval; either bound may be open or absent.
struct Range {
  std::optional<double> min;
  std::optional<double> max;
  bool min_inclusive = true;
  bool max_inclusive = true;

  bool contains(double v) const {
    if (min && (min_inclusive ? v < *min : v <= *min)) return false;
    if (max && (max_inclusive ? v > *max : v >= *max)) return false;
    return true;
  }

  std::string describe() const {
    std::string s = min ? (min_inclusive ? "[" : "(") + format_real(*min) : std::string("(-inf");
    s += ", ";
    s += max ? format_real(*max) + (max_inclusive ? "]" : ")") : std::string("inf)");
    return s;
  }
};

struct TagSpec {
  std::string name;
  TagType type = TagType::Real;
  Unit unit = Unit::None;
  Range range;                       // numeric types only
  std::vector<std::string> one_of;   // string enumerations, empty = any
  bool required = false;
  std::optional<TaggedValue> default_value;
};

struct StereotypeDef {
  std::string name;
  std::vector<Kind> kinds;
  std::vector<Level> levels;
  std::vector<TagSpec> tags;

  bool applies_to(Kind k) const {
    for (Kind kk : kinds)
      if (kk == k) return true;
    return false;
  }
  bool applies_at(Level l) const {
    for (Level ll : levels)
      if (ll == l) return true;
    return false;
  }
  const TagSpec* find_tag(std::string_view tag) const {
    for (const auto& t : tags)
      if (t.name == tag) return &t;
    return nullptr;
  }
};

struct Profile {
  std::string name;
  std::vector<StereotypeDef> stereotypes;

  const StereotypeDef* find(std::string_view stereotype) const {
    for (const auto& d : stereotypes)
      if (d.name == stereotype) return &d;
    return nullptr;
  }
};

namespace detail {

inline TagSpec real_tag(std::string name, Unit unit, Range range, bool required,
                        std::optional<double> def = std::nullopt) {
  TagSpec t;
  t.name = std::move(name);
  t.type = TagType::Real;
  t.unit = unit;
  t.range = range;
  t.required = required;
  if (def) t.default_value = TaggedValue::real(*def, unit);
  return t;
}

inline TagSpec int_tag(std::string name, Range range, bool required,
                       std::optional<std::int64_t> def = std::nullopt) {
  TagSpec t;
  t.name = std::move(name);
  t.type = TagType::Int;
  t.range = range;
  t.required = required;
  if (def) t.default_value = TaggedValue::integer(*def);
  return t;
}

inline TagSpec string_tag(std::string name, std::vector<std::string> one_of,
                          bool required, std::optional<std::string> def = std::nullopt) {
  TagSpec t;
  t.name = std::move(name);
  t.type = TagType::String;
  t.one_of = std::move(one_of);
  t.required = required;
  if (def) t.default_value = TaggedValue::str(std::move(*def));
  return t;
}

}  // namespace detail

// The built-in annotation profile. Each tag it declares is consumed by the
// transformation, emission, or analysis stage; there is deliberately nothing
// here that nothing reads.
inline const Profile& builtin_profile() {
  using detail::int_tag;
  using detail::real_tag;
  using detail::string_tag;

  static const Profile profile = [] {
    const Range nonneg{0.0, std::nullopt, true, true};
    const Range positive{0.0, std::nullopt, false, true};
    const Range fraction{0.0, 1.0, true, true};
    const Range at_least_one{1.0, std::nullopt, true, true};
    const Range any{};

    Profile p;
    p.name = "dia-quality/1";

    StereotypeDef data_source;
    data_source.name = "DataSource";
    data_source.kinds = {Kind::SourceNode};
    data_source.levels = {Level::Dpim, Level::Dtsm};
    data_source.tags = {real_tag("rate", Unit::PerSecond, nonneg, true)};
    p.stereotypes.push_back(std::move(data_source));

    StereotypeDef compute;
    compute.name = "Compute";
    compute.kinds = {Kind::ComputeNode};
    compute.levels = {Level::Dpim, Level::Dtsm};
    compute.tags = {
        real_tag("serviceDemandMs", Unit::Milliseconds, positive, true),
        int_tag("servers", at_least_one, false, 1),
        string_tag("processing", {"stream", "batch"}, false, "stream"),
        real_tag("availability", Unit::None, fraction, false),
    };
    p.stereotypes.push_back(std::move(compute));

    StereotypeDef storage;
    storage.name = "Storage";
    storage.kinds = {Kind::StorageNode};
    storage.levels = {Level::Dpim, Level::Dtsm};
    storage.tags = {
        real_tag("availability", Unit::None, fraction, false),
        real_tag("serviceDemandMs", Unit::Milliseconds, positive, false, 2.0),
        real_tag("capacityGb", Unit::Gigabytes, positive, false),
    };
    p.stereotypes.push_back(std::move(storage));

    StereotypeDef sla;
    sla.name = "SLA";
    sla.kinds = {Kind::ComputeNode, Kind::StorageNode};
    sla.levels = {Level::Dpim, Level::Dtsm};
    sla.tags = {
        real_tag("responseTimeMaxMs", Unit::Milliseconds, positive, false),
        real_tag("utilizationMax", Unit::None, fraction, false),
    };
    p.stereotypes.push_back(std::move(sla));

    // QoD carrier: carried through every stage, analyzed by none.
    StereotypeDef data;
    data.name = "Data";
    data.kinds = {Kind::SourceNode,      Kind::ComputeNode,
                  Kind::StorageNode,     Kind::Host,
                  Kind::PlatformService, Kind::DeployedComponent};
    data.levels = {Level::Dpim, Level::Dtsm, Level::Ddsm};
    data.tags = {
        real_tag("avgMessageSizeKb", Unit::Kilobytes, positive, false),
        real_tag("freshnessMaxMs", Unit::Milliseconds, positive, false),
    };
    p.stereotypes.push_back(std::move(data));

    StereotypeDef deploy;
    deploy.name = "Deploy";
    deploy.kinds = {Kind::SourceNode,      Kind::ComputeNode,
                    Kind::StorageNode,     Kind::Host,
                    Kind::PlatformService, Kind::DeployedComponent};
    deploy.levels = {Level::Dtsm, Level::Ddsm};
    deploy.tags = {
        int_tag("replicas", at_least_one, false, 1),
        string_tag("instanceType", {}, false, "medium"),
        string_tag("provider", {}, false, "openstack"),
        string_tag("image", {}, false),
    };
    p.stereotypes.push_back(std::move(deploy));

    return p;
  }();
  return profile;
}

// ---------------------------------------------------------------------------
// Effective value lookup: written tag if present, else the tag's declared
// default. The default applies whether or not the stereotype is applied, so
// e.g. a bare storage node still has a 2 ms service demand.
// ---------------------------------------------------------------------------

inline std::optional<TaggedValue> effective_tag(const Profile& profile,
                                                const Element& element,
                                                std::string_view stereotype,
                                                std::string_view tag) {
  if (const StereotypeApplication* app = element.annotation(stereotype)) {
    if (const TagAssignment* t = app->find_tag(tag)) return t->value;
  }
  if (const StereotypeDef* def = profile.find(stereotype)) {
    if (const TagSpec* spec = def->find_tag(tag)) {
      if (spec->default_value) return *spec->default_value;
    }
  }
  return std::nullopt;
}

inline std::optional<double> effective_real(const Profile& profile,
                                            const Element& element,
                                            std::string_view stereotype,
                                            std::string_view tag) {
  if (auto v = effective_tag(profile, element, stereotype, tag)) return v->as_real();
  return std::nullopt;
}

inline std::optional<std::int64_t> effective_int(const Profile& profile,
                                                 const Element& element,
                                                 std::string_view stereotype,
                                                 std::string_view tag) {
  if (auto v = effective_tag(profile, element, stereotype, tag)) return v->as_int();
  return std::nullopt;
}

inline std::optional<std::string> effective_string(const Profile& profile,
                                                   const Element& element,
                                                   std::string_view stereotype,
                                                   std::string_view tag) {
  if (auto v = effective_tag(profile, element, stereotype, tag)) {
    if (const std::string* s = v->as_string()) return *s;
  }
  return std::nullopt;
}

}  // namespace dia
