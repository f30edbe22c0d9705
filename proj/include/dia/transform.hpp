#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/model.hpp"
#include "dia/profile.hpp"
#include "dia/text.hpp"

namespace dia {

// ---------------------------------------------------------------------------
// Technology catalog
// ---------------------------------------------------------------------------

struct CatalogEntry {
  Kind kind = Kind::ComputeNode;
  std::string processing;  // "" for non-compute kinds
  std::string technology;
  std::string node_type;
};

struct TechnologyCatalog {
  std::vector<CatalogEntry> entries;

  const CatalogEntry* lookup(Kind kind, std::string_view processing) const {
    for (const auto& e : entries)
      if (e.kind == kind && e.processing == processing) return &e;
    return nullptr;
  }
  const CatalogEntry* by_technology(std::string_view tech) const {
    for (const auto& e : entries)
      if (e.technology == tech) return &e;
    return nullptr;
  }
};

inline const TechnologyCatalog& default_catalog() {
  static const TechnologyCatalog catalog = {{
      {Kind::SourceNode, "", "kafka", "dice.nodes.Kafka"},
      {Kind::ComputeNode, "stream", "storm", "dice.nodes.Storm"},
      {Kind::ComputeNode, "batch", "spark", "dice.nodes.Spark"},
      {Kind::StorageNode, "", "cassandra", "dice.nodes.Cassandra"},
  }};
  return catalog;
}

// TOSCA node type for a technology: catalog entry if known, otherwise
// `dice.nodes.<Capitalized>` so hand-written DTSM bindings still emit.
inline std::string tosca_node_type(const TechnologyCatalog& catalog,
                                   const std::string& technology) {
  if (const auto* e = catalog.by_technology(technology)) return e->node_type;
  std::string cap = technology;
  if (!cap.empty() && cap[0] >= 'a' && cap[0] <= 'z')
    cap[0] = static_cast<char>(cap[0] - 'a' + 'A');
  return "dice.nodes." + cap;
}

// ---------------------------------------------------------------------------
// Override / deployment configuration files
//
// Flat key-value text: one `element.key = value` entry per line, `#`
// comments, keys case-sensitive, values typed by key.
// ---------------------------------------------------------------------------

struct DeployOverride {
  std::optional<std::int64_t> replicas;
  std::optional<std::string> instance_type;
  std::optional<std::string> provider;
  std::optional<std::string> image;
};

struct DeploymentConfig {
  std::optional<std::string> default_provider;
  std::map<std::string, DeployOverride> overrides;
};

using TechnologyOverrides = std::map<std::string, std::string>;

namespace detail {

struct ConfigLine {
  std::string key;
  std::string value;
  SourceSpan span;
};

// Shared line splitter: yields trimmed key/value pairs, E220 on lines
// without '=' or with an empty key.
inline std::vector<ConfigLine> split_config_lines(std::string_view text,
                                                  const std::string& file,
                                                  std::vector<Diagnostic>& diags) {
  std::vector<ConfigLine> out;
  std::string normalized = normalize_newlines(text);
  int lineno = 0;
  std::size_t start = 0;
  while (start <= normalized.size()) {
    std::size_t nl = normalized.find('\n', start);
    std::string_view line(normalized.data() + start,
                          (nl == std::string::npos ? normalized.size() : nl) - start);
    ++lineno;
    std::size_t next = nl == std::string::npos ? normalized.size() + 1 : nl + 1;
    start = next;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    SourceSpan span{file, lineno, 1, lineno, static_cast<int>(line.size()) + 1};
    std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      diags.push_back(error("E220", "malformed configuration line (missing '=')", span));
      continue;
    }
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) {
      diags.push_back(error("E220", "malformed configuration line (empty key)", span));
      continue;
    }
    out.push_back({std::move(key), std::move(value), span});
  }
  return out;
}

}  // namespace detail

struct TechnologyOverridesResult {
  TechnologyOverrides overrides;
  std::vector<Diagnostic> diagnostics;
};

// Catalog override file: `<elementId>.technology = <name>` lines only.
inline TechnologyOverridesResult parse_technology_overrides(
    std::string_view text, const std::string& file = "<catalog>") {
  TechnologyOverridesResult res;
  for (auto& line : detail::split_config_lines(text, file, res.diagnostics)) {
    std::size_t dot = line.key.find('.');
    if (dot == std::string::npos || line.key.substr(dot + 1) != "technology") {
      res.diagnostics.push_back(error(
          "E220", "malformed configuration line (expected '<element>.technology')",
          line.span));
      continue;
    }
    if (line.value.empty() || !is_identifier(line.value)) {
      res.diagnostics.push_back(error(
          "E221", "technology name '" + line.value + "' is not an identifier",
          line.span));
      continue;
    }
    res.overrides[line.key.substr(0, dot)] = line.value;
  }
  return res;
}

struct DeploymentConfigResult {
  DeploymentConfig config;
  std::vector<Diagnostic> diagnostics;
};

// Deployment config file: `provider = <name>` (global default) and
// `<elementId>.(replicas|instanceType|provider|image) = <value>` lines.
inline DeploymentConfigResult parse_deployment_config(
    std::string_view text, const std::string& file = "<deploy>") {
  DeploymentConfigResult res;
  for (auto& line : detail::split_config_lines(text, file, res.diagnostics)) {
    std::size_t dot = line.key.find('.');
    if (dot == std::string::npos) {
      if (line.key == "provider") {
        res.config.default_provider = line.value;
      } else {
        res.diagnostics.push_back(error(
            "E220", "unknown configuration key '" + line.key + "'", line.span));
      }
      continue;
    }
    std::string id = line.key.substr(0, dot);
    std::string field = line.key.substr(dot + 1);
    DeployOverride& ov = res.config.overrides[id];
    if (field == "replicas") {
      std::int64_t n = 0;
      bool ok = !line.value.empty();
      for (char c : line.value)
        if (c < '0' || c > '9') ok = false;
      if (ok) n = std::strtoll(line.value.c_str(), nullptr, 10);
      if (!ok || n < 1) {
        res.diagnostics.push_back(error(
            "E221", "replicas must be an integer >= 1, got '" + line.value + "'",
            line.span));
        continue;
      }
      ov.replicas = n;
    } else if (field == "instanceType") {
      ov.instance_type = line.value;
    } else if (field == "provider") {
      ov.provider = line.value;
    } else if (field == "image") {
      ov.image = line.value;
    } else {
      res.diagnostics.push_back(error(
          "E220", "unknown configuration key '" + line.key + "'", line.span));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

struct TransformResult {
  std::optional<Model> model;  // present iff diagnostics carry no errors
  std::vector<TraceLink> trace;
  std::vector<Diagnostic> diagnostics;
};

inline std::string flow_trace_id(const Flow& f) { return f.from + "->" + f.to; }

// DPIM -> DTSM: identity plus technology binding. Overrides take precedence
// over the catalog; annotations are preserved unchanged. One trace link per
// element (rule "assign-technology") then one per flow (rule "copy-flow").
inline TransformResult dpim_to_dtsm(const Model& input,
                                    const TechnologyCatalog& catalog = default_catalog(),
                                    const TechnologyOverrides& overrides = {},
                                    const Profile& profile = builtin_profile()) {
  TransformResult res;
  if (input.level != Level::Dpim) {
    res.diagnostics.push_back(error(
        "E200", "transformation input must be a dpim model, got " +
                    std::string(to_keyword(input.level))));
    return res;
  }
  for (const auto& [id, tech] : overrides) {
    if (!input.find_element(id))
      res.diagnostics.push_back(warning(
          "W213", "override references unknown element '" + id + "'"));
    if (!catalog.by_technology(tech))
      res.diagnostics.push_back(error(
          "E201", "override technology '" + tech + "' is not in the catalog"));
  }

  Model out;
  out.name = input.name;
  out.level = Level::Dtsm;
  out.flows = input.flows;
  for (const auto& e : input.elements) {
    Element img = e;
    if (auto it = overrides.find(e.id); it != overrides.end()) {
      img.technology = it->second;
    } else {
      std::string hint;
      if (e.kind == Kind::ComputeNode)
        hint = effective_string(profile, e, "Compute", "processing").value_or("stream");
      const CatalogEntry* entry = catalog.lookup(e.kind, hint);
      if (!entry) {
        res.diagnostics.push_back(error(
            "E202", "no catalog entry for " + std::string(kind_name(e.kind)) +
                        (hint.empty() ? "" : " with processing '" + hint + "'"),
            e.span));
        continue;
      }
      img.technology = entry->technology;
    }
    out.elements.push_back(std::move(img));
  }

  for (const auto& e : input.elements)
    res.trace.push_back({"assign-technology", {e.id}, {e.id}});
  for (const auto& f : input.flows)
    res.trace.push_back({"copy-flow", {flow_trace_id(f)}, {flow_trace_id(f)}});

  if (!has_errors(res.diagnostics)) res.model = std::move(out);
  return res;
}

// DTSM -> DDSM: each element E expands to a PlatformService `E_svc`
// (technology, resolved @Deploy replicas/image, carried @Data) hosted on a
// Host `E_host` (resolved instanceType/provider); input flows become
// service-to-service flows with their probabilities. Trace rules:
// "service-of" and "host-of" per element, then "connects" per flow.
inline TransformResult dtsm_to_ddsm(const Model& input,
                                    const DeploymentConfig& deploy = {},
                                    const Profile& profile = builtin_profile()) {
  TransformResult res;
  if (input.level != Level::Dtsm) {
    res.diagnostics.push_back(error(
        "E210", "transformation input must be a dtsm model, got " +
                    std::string(to_keyword(input.level))));
    return res;
  }
  for (const auto& [id, ov] : deploy.overrides) {
    if (!input.find_element(id))
      res.diagnostics.push_back(warning(
          "W213", "deployment override references unknown element '" + id + "'"));
  }

  Model out;
  out.name = input.name;
  out.level = Level::Ddsm;
  std::vector<Flow> connects;

  for (const auto& e : input.elements) {
    if (ends_with(e.id, "_svc") || ends_with(e.id, "_host")) {
      res.diagnostics.push_back(error(
          "E203", "element id '" + e.id + "' uses a reserved _svc/_host suffix",
          e.span));
      continue;
    }
    if (!e.technology) {
      res.diagnostics.push_back(error(
          "E211", "element '" + e.id + "' has no technology binding", e.span));
      continue;
    }

    auto it = deploy.overrides.find(e.id);
    const DeployOverride* ov = it == deploy.overrides.end() ? nullptr : &it->second;
    const StereotypeApplication* ann = e.annotation("Deploy");
    if (!ov && !ann)
      res.diagnostics.push_back(warning(
          "W212", "no deployment configuration for '" + e.id +
                      "'; defaults applied",
          e.span));

    std::int64_t replicas =
        ov && ov->replicas ? *ov->replicas
                           : effective_int(profile, e, "Deploy", "replicas").value_or(1);
    std::string instance_type =
        ov && ov->instance_type
            ? *ov->instance_type
            : effective_string(profile, e, "Deploy", "instanceType").value_or("medium");
    std::optional<std::string> provider;
    if (ov && ov->provider) provider = *ov->provider;
    if (!provider && ann)
      if (const auto* tag = ann->find_tag("provider"))
        if (const auto* s = tag->value.as_string()) provider = *s;
    if (!provider) provider = deploy.default_provider;
    if (!provider) provider = "openstack";
    std::optional<std::string> image;
    if (ov && ov->image) image = *ov->image;
    if (!image && ann)
      if (const auto* tag = ann->find_tag("image"))
        if (const auto* s = tag->value.as_string()) image = *s;

    Element svc;
    svc.id = e.id + "_svc";
    svc.name = svc.id;
    svc.kind = Kind::PlatformService;
    svc.technology = e.technology;
    StereotypeApplication svc_deploy;
    svc_deploy.stereotype = "Deploy";
    svc_deploy.tags.push_back({"replicas", TaggedValue::integer(replicas), {}});
    if (image)
      svc_deploy.tags.push_back({"image", TaggedValue::str(*image), {}});
    svc.annotations.push_back(std::move(svc_deploy));
    for (const auto& a : e.annotations)
      if (a.stereotype == "Data") svc.annotations.push_back(a);
    svc.span = e.span;

    Element host;
    host.id = e.id + "_host";
    host.name = host.id;
    host.kind = Kind::Host;
    StereotypeApplication host_deploy;
    host_deploy.stereotype = "Deploy";
    host_deploy.tags.push_back({"instanceType", TaggedValue::str(instance_type), {}});
    host_deploy.tags.push_back({"provider", TaggedValue::str(*provider), {}});
    host.annotations.push_back(std::move(host_deploy));
    host.span = e.span;

    Flow hosted;
    hosted.from = svc.id;
    hosted.to = host.id;
    hosted.probability = 1.0;

    out.elements.push_back(std::move(svc));
    out.elements.push_back(std::move(host));
    out.flows.push_back(std::move(hosted));
    res.trace.push_back({"service-of", {e.id}, {e.id + "_svc"}});
    res.trace.push_back({"host-of", {e.id}, {e.id + "_host"}});
  }

  for (const auto& f : input.flows) {
    Flow c;
    c.from = f.from + "_svc";
    c.to = f.to + "_svc";
    c.probability = f.probability;
    c.span = f.span;
    connects.push_back(c);
    res.trace.push_back(
        {"connects", {flow_trace_id(f)}, {c.from + "->" + c.to}});
  }
  for (auto& c : connects) out.flows.push_back(std::move(c));

  if (!has_errors(res.diagnostics)) res.model = std::move(out);
  return res;
}

// ---------------------------------------------------------------------------
// Trace queries and sidecar serialization
// ---------------------------------------------------------------------------

struct TraceStep {
  std::string rule;
  std::vector<std::string> sources;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

// Direct origins of targetId: every link whose targets include it, in
// application order. Empty when nothing produced the id.
inline std::vector<TraceStep> trace_origin(const std::vector<TraceLink>& trace,
                                           const std::string& target_id) {
  std::vector<TraceStep> out;
  for (const auto& link : trace)
    if (std::find(link.targets.begin(), link.targets.end(), target_id) !=
        link.targets.end())
      out.push_back({link.rule, link.sources});
  return out;
}

// Sidecar format: header line, then one tab-separated link per line with
// comma-joined id lists. Composing stages = earlier stage's lines first.
inline std::string serialize_trace(const std::vector<TraceLink>& trace) {
  std::string out = "# dia-trace v1\n";
  auto join = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ",";
      s += ids[i];
    }
    return s;
  };
  for (const auto& link : trace)
    out += link.rule + "\t" + join(link.sources) + "\t" + join(link.targets) + "\n";
  return out;
}

struct TraceParseResult {
  std::vector<TraceLink> trace;
  std::vector<Diagnostic> diagnostics;
};

inline TraceParseResult parse_trace(std::string_view text,
                                    const std::string& file = "<trace>") {
  TraceParseResult res;
  std::string normalized = normalize_newlines(text);
  int lineno = 0;
  std::size_t start = 0;
  auto split_ids = [](std::string_view s) {
    std::vector<std::string> ids;
    std::size_t p = 0;
    while (p <= s.size()) {
      std::size_t comma = s.find(',', p);
      std::string_view part =
          s.substr(p, (comma == std::string_view::npos ? s.size() : comma) - p);
      if (!part.empty()) ids.emplace_back(part);
      if (comma == std::string_view::npos) break;
      p = comma + 1;
    }
    return ids;
  };
  while (start <= normalized.size()) {
    std::size_t nl = normalized.find('\n', start);
    std::string_view line(normalized.data() + start,
                          (nl == std::string::npos ? normalized.size() : nl) - start);
    ++lineno;
    start = nl == std::string::npos ? normalized.size() + 1 : nl + 1;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::size_t t1 = body.find('\t');
    std::size_t t2 = t1 == std::string_view::npos ? std::string_view::npos
                                                  : body.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      res.diagnostics.push_back(error(
          "E220", "malformed trace line (expected rule\\tsources\\ttargets)",
          SourceSpan{file, lineno, 1, lineno, static_cast<int>(line.size()) + 1}));
      continue;
    }
    TraceLink link;
    link.rule = std::string(body.substr(0, t1));
    link.sources = split_ids(body.substr(t1 + 1, t2 - t1 - 1));
    link.targets = split_ids(body.substr(t2 + 1));
    res.trace.push_back(std::move(link));
  }
  return res;
}

}  // namespace dia
