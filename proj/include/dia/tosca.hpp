#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/model.hpp"
#include "dia/profile.hpp"
#include "dia/text.hpp"
#include "dia/transform.hpp"

namespace dia {

inline constexpr std::string_view kToscaVersion = "tosca_simple_yaml_1_3";
inline constexpr std::string_view kComputeType = "tosca.nodes.Compute";
inline constexpr std::string_view kHostedOn = "tosca.relationships.HostedOn";
inline constexpr std::string_view kConnectsTo = "tosca.relationships.ConnectsTo";

// ---------------------------------------------------------------------------
// Document model
// ---------------------------------------------------------------------------

struct ToscaScalar {
  std::variant<std::string, std::int64_t, double, bool> storage;

  static ToscaScalar str(std::string s) { return {std::move(s)}; }
  static ToscaScalar integer(std::int64_t i) { return {i}; }
  static ToscaScalar real(double d) { return {d}; }
  static ToscaScalar boolean(bool b) { return {b}; }

  friend bool operator==(const ToscaScalar&, const ToscaScalar&) = default;
};

struct ToscaRequirement {
  std::string name;  // "host" or "connection"
  std::string node;
  std::string relationship;
  std::optional<double> routing_probability;  // emitted only when < 1.0

  friend bool operator==(const ToscaRequirement&, const ToscaRequirement&) = default;
};

struct NodeTemplate {
  std::string name;
  std::string type;
  std::vector<std::pair<std::string, ToscaScalar>> properties;
  std::vector<ToscaRequirement> requirements;

  friend bool operator==(const NodeTemplate&, const NodeTemplate&) = default;
};

struct ToscaDocument {
  std::string definitions_version = std::string(kToscaVersion);
  std::string description;
  std::vector<NodeTemplate> node_templates;

  const NodeTemplate* find(std::string_view name) const {
    for (const auto& t : node_templates)
      if (t.name == name) return &t;
    return nullptr;
  }

  friend bool operator==(const ToscaDocument&, const ToscaDocument&) = default;
};

// ---------------------------------------------------------------------------
// DDSM -> document
// ---------------------------------------------------------------------------

namespace detail {

inline std::string snake_case(std::string_view camel) {
  std::string out;
  for (char c : camel) {
    if (c >= 'A' && c <= 'Z') {
      out += '_';
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      out += c;
    }
  }
  return out;
}

inline ToscaScalar scalar_of(const TaggedValue& v) {
  if (auto* r = std::get_if<RealValue>(&v.v)) return ToscaScalar::real(r->value);
  if (auto* i = std::get_if<std::int64_t>(&v.v)) return ToscaScalar::integer(*i);
  if (auto* s = std::get_if<std::string>(&v.v)) return ToscaScalar::str(*s);
  return ToscaScalar::boolean(std::get<bool>(v.v));
}

}  // namespace detail

struct ToscaResult {
  std::optional<ToscaDocument> document;  // present iff no error diagnostics
  std::vector<Diagnostic> diagnostics;
};

// Map a validated DDSM model to a TOSCA document. Hosts become
// `tosca.nodes.Compute` templates; platform services take their type from
// the technology catalog; flows become host/connection requirements on the
// source template, in flow order.
inline ToscaResult to_tosca(const Model& model,
                            const TechnologyCatalog& catalog = default_catalog(),
                            const Profile& profile = builtin_profile()) {
  ToscaResult res;
  if (model.level != Level::Ddsm) {
    res.diagnostics.push_back(error(
        "E300", "tosca emission input must be a ddsm model, got " +
                    std::string(to_keyword(model.level))));
    return res;
  }

  ToscaDocument doc;
  doc.description = model.name;

  for (const auto& e : model.elements) {
    NodeTemplate t;
    t.name = e.id;
    if (e.kind == Kind::Host) {
      t.type = std::string(kComputeType);
      t.properties.emplace_back(
          "instance_type",
          ToscaScalar::str(
              effective_string(profile, e, "Deploy", "instanceType").value_or("medium")));
      t.properties.emplace_back(
          "provider",
          ToscaScalar::str(
              effective_string(profile, e, "Deploy", "provider").value_or("openstack")));
    } else {
      if (e.technology)
        t.type = tosca_node_type(catalog, *e.technology);
      else
        t.type = "tosca.nodes.SoftwareComponent";
      t.properties.emplace_back(
          "replicas",
          ToscaScalar::integer(
              effective_int(profile, e, "Deploy", "replicas").value_or(1)));
      if (const auto* deploy = e.annotation("Deploy"))
        if (const auto* image = deploy->find_tag("image"))
          t.properties.emplace_back("image", detail::scalar_of(image->value));
      if (const auto* data = e.annotation("Data"))
        for (const auto& tag : data->tags)
          t.properties.emplace_back(detail::snake_case(tag.name),
                                    detail::scalar_of(tag.value));
    }
    doc.node_templates.push_back(std::move(t));
  }

  auto find_mutable = [&doc](std::string_view name) -> NodeTemplate* {
    for (auto& t : doc.node_templates)
      if (t.name == name) return &t;
    return nullptr;
  };
  for (const auto& f : model.flows) {
    NodeTemplate* src = find_mutable(f.from);
    const Element* target = model.find_element(f.to);
    if (!src || !target) {
      res.diagnostics.push_back(error(
          "E301", "flow requirement references unknown template '" +
                      (src ? f.to : f.from) + "'",
          f.span));
      continue;
    }
    ToscaRequirement req;
    if (target->kind == Kind::Host) {
      req.name = "host";
      req.relationship = std::string(kHostedOn);
    } else {
      req.name = "connection";
      req.relationship = std::string(kConnectsTo);
      if (f.probability < 1.0) req.routing_probability = f.probability;
    }
    req.node = f.to;
    src->requirements.push_back(std::move(req));
  }

  if (!has_errors(res.diagnostics)) res.document = std::move(doc);
  return res;
}

// ---------------------------------------------------------------------------
// Structural validation
// ---------------------------------------------------------------------------

inline std::vector<Diagnostic> validate_tosca(const ToscaDocument& doc) {
  std::vector<Diagnostic> out;
  if (doc.definitions_version != kToscaVersion)
    out.push_back(error("E303", "unexpected tosca_definitions_version '" +
                                    doc.definitions_version + "'"));

  std::set<std::string> names;
  for (const auto& t : doc.node_templates)
    if (!names.insert(t.name).second)
      out.push_back(error("E302", "duplicate node template name '" + t.name + "'"));

  for (const auto& t : doc.node_templates)
    for (const auto& r : t.requirements)
      if (!names.count(r.node))
        out.push_back(error("E301", "requirement '" + r.name + "' of '" + t.name +
                                        "' targets unknown template '" + r.node + "'"));

  // hostedOn acyclicity via depth-first search over host requirements.
  std::map<std::string, std::vector<std::string>> host_edges;
  for (const auto& t : doc.node_templates)
    for (const auto& r : t.requirements)
      if (r.relationship == kHostedOn && names.count(r.node))
        host_edges[t.name].push_back(r.node);
  std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
  bool cycle = false;
  auto dfs = [&](auto&& self, const std::string& n) -> void {
    int& s = state[n];
    if (s == 1) {
      cycle = true;
      return;
    }
    if (s == 2) return;
    s = 1;
    if (auto it = host_edges.find(n); it != host_edges.end())
      for (const auto& m : it->second) self(self, m);
    s = 2;
  };
  for (const auto& t : doc.node_templates) {
    dfs(dfs, t.name);
    if (cycle) break;
  }
  if (cycle)
    out.push_back(error("E304", "hostedOn requirements form a cycle"));
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic YAML serialization
// ---------------------------------------------------------------------------

namespace detail {

inline bool plain_scalar_safe(std::string_view s) {
  if (s.empty()) return false;
  char first = s.front();
  if (!((first >= 'A' && first <= 'Z') || (first >= 'a' && first <= 'z') ||
        (first >= '0' && first <= '9') || first == '_'))
    return false;
  for (char c : s) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' ||
              c == ':' || c == '/';
    if (!ok) return false;
  }
  if (s.back() == ':') return false;
  static constexpr std::string_view reserved[] = {
      "true", "false", "null", "yes", "no", "on", "off",
      "True", "False", "Null", "Yes", "No", "On", "Off", "NULL", "YES", "NO"};
  for (auto r : reserved)
    if (s == r) return false;
  double d = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec == std::errc{} && p == s.data() + s.size()) return false;  // numeric-looking
  return true;
}

inline std::string yaml_string(std::string_view s) {
  if (plain_scalar_safe(s)) return std::string(s);
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += "'";
  return out;
}

inline std::string yaml_scalar(const ToscaScalar& v) {
  if (auto* s = std::get_if<std::string>(&v.storage)) return yaml_string(*s);
  if (auto* i = std::get_if<std::int64_t>(&v.storage)) return format_int(*i);
  if (auto* d = std::get_if<double>(&v.storage)) return format_real(*d);
  return std::get<bool>(v.storage) ? "true" : "false";
}

inline bool template_order(const NodeTemplate& a, const NodeTemplate& b) {
  bool ac = a.type == kComputeType, bc = b.type == kComputeType;
  if (ac != bc) return ac;  // Compute-typed templates first
  if (ac) return a.name < b.name;
  if (a.type != b.type) return a.type < b.type;
  return a.name < b.name;
}

}  // namespace detail

// Canonical bytes: 2-space indent, fixed key order, templates sorted
// (Compute first by name, then by type then name), property keys sorted,
// requirements in input order, plain scalars, LF, trailing newline.
inline std::string serialize(const ToscaDocument& doc) {
  std::string out = "tosca_definitions_version: " + doc.definitions_version + "\n";
  out += "description: " + detail::yaml_string(doc.description) + "\n";
  if (doc.node_templates.empty()) {
    out += "topology_template: {node_templates: {}}\n";
    return out;
  }
  out += "topology_template:\n  node_templates:\n";

  std::vector<const NodeTemplate*> order;
  order.reserve(doc.node_templates.size());
  for (const auto& t : doc.node_templates) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const NodeTemplate* a, const NodeTemplate* b) {
              return detail::template_order(*a, *b);
            });

  for (const NodeTemplate* t : order) {
    out += "    " + detail::yaml_string(t->name) + ":\n";
    out += "      type: " + t->type + "\n";
    if (!t->properties.empty()) {
      auto props = t->properties;
      std::stable_sort(props.begin(), props.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      out += "      properties:\n";
      for (const auto& [key, value] : props)
        out += "        " + detail::yaml_string(key) + ": " +
               detail::yaml_scalar(value) + "\n";
    }
    if (!t->requirements.empty()) {
      out += "      requirements:\n";
      for (const auto& r : t->requirements) {
        out += "        - " + r.name + ":\n";
        out += "            node: " + detail::yaml_string(r.node) + "\n";
        out += "            relationship: " + r.relationship + "\n";
        if (r.routing_probability)
          out += "            routing_probability: " +
                 format_real(*r.routing_probability) + "\n";
      }
    }
  }
  return out;
}

}  // namespace dia
