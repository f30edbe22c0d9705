#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/model.hpp"
#include "dia/profile.hpp"

namespace dia {

namespace detail {

// Conformance of one application against the profile, in isolation: depends
// only on the application, the carrying element's kind, and the model level.
inline void conformance_diags(const StereotypeApplication& app,
                              const Element& element, Level level,
                              const Profile& profile,
                              std::vector<Diagnostic>& out) {
  const StereotypeDef* def = profile.find(app.stereotype);
  if (!def) {
    out.push_back(error("E011", "unknown stereotype @" + app.stereotype, app.span));
    return;
  }
  if (!def->applies_to(element.kind) || !def->applies_at(level)) {
    out.push_back(error(
        "E012",
        "@" + app.stereotype + " is not applicable to " +
            std::string(kind_name(element.kind)) + " at " +
            std::string(to_keyword(level)) + " level",
        app.span));
    return;
  }

  for (const TagAssignment& tag : app.tags) {
    const TagSpec* spec = def->find_tag(tag.name);
    if (!spec) {
      out.push_back(error("E015", "@" + app.stereotype + " has no tag '" + tag.name + "'",
                          tag.span ? tag.span : app.span));
      continue;
    }
    const auto where = tag.span ? tag.span : app.span;
    const std::string label = "@" + app.stereotype + "." + tag.name;
    switch (spec->type) {
      case TagType::Real: {
        auto v = tag.value.as_real();
        if (!v) {
          out.push_back(error("E013", label + " expects a real value", where));
          break;
        }
        // Dimensional tags must be written with their unit; unitless tags
        // must not carry one. Promoted integers count as unitless.
        Unit written = tag.value.unit();
        if (written != spec->unit) {
          if (spec->unit == Unit::None) {
            out.push_back(error("E013",
                                label + " is unitless but was written with '" +
                                    std::string(unit_suffix(written)) + "'",
                                where));
          } else {
            out.push_back(error("E013",
                                label + " must be written in '" +
                                    std::string(unit_suffix(spec->unit)) + "'",
                                where));
          }
          break;
        }
        if (!spec->range.contains(*v)) {
          out.push_back(error("E013",
                              label + " = " + format_real(*v) +
                                  " is outside " + spec->range.describe(),
                              where));
        }
        break;
      }
      case TagType::Int: {
        auto v = tag.value.as_int();
        if (!v) {
          out.push_back(error("E013", label + " expects an integer", where));
          break;
        }
        if (!spec->range.contains(static_cast<double>(*v))) {
          out.push_back(error("E013",
                              label + " = " + format_int(*v) + " is outside " +
                                  spec->range.describe(),
                              where));
        }
        break;
      }
      case TagType::String: {
        const std::string* s = tag.value.as_string();
        if (!s) {
          out.push_back(error("E013", label + " expects a string", where));
          break;
        }
        if (!spec->one_of.empty()) {
          bool ok = false;
          for (const auto& allowed : spec->one_of) ok = ok || allowed == *s;
          if (!ok) {
            std::string choices;
            for (const auto& allowed : spec->one_of) {
              if (!choices.empty()) choices += ", ";
              choices += allowed;
            }
            out.push_back(error("E013", label + " must be one of {" + choices + "}", where));
          }
        }
        break;
      }
      case TagType::Bool: {
        if (!tag.value.as_bool())
          out.push_back(error("E013", label + " expects a boolean", where));
        break;
      }
    }
  }

  for (const TagSpec& spec : def->tags) {
    if (spec.required && !app.find_tag(spec.name)) {
      out.push_back(error("E014",
                          "@" + app.stereotype + " requires tag '" + spec.name + "'",
                          app.span));
    }
  }
}

inline void element_diags(const Element& e, Level level, const Profile& profile,
                          std::vector<Diagnostic>& out) {
  if (!kind_allowed_at(e.kind, level)) {
    out.push_back(error("E008",
                        std::string(kind_name(e.kind)) + " '" + e.id +
                            "' is not allowed in a " +
                            std::string(to_keyword(level)) + " model",
                        e.span));
  }

  for (const auto& app : e.annotations) conformance_diags(app, e, level, profile, out);

  // Annotations the downstream stages cannot do without.
  if (level == Level::Dpim || level == Level::Dtsm) {
    if (e.kind == Kind::SourceNode && !e.annotation("DataSource")) {
      out.push_back(error("E005", "source '" + e.id + "' is missing @DataSource", e.span));
    }
    if (e.kind == Kind::ComputeNode && !e.annotation("Compute")) {
      out.push_back(error("E005", "compute '" + e.id + "' is missing @Compute", e.span));
    }
  }

  switch (level) {
    case Level::Dpim:
      if (e.technology) {
        out.push_back(error("E007",
                            "'" + e.id + "' binds technology '" + *e.technology +
                                "' but dpim models are technology-free",
                            e.span));
      }
      break;
    case Level::Dtsm:
      if (!e.technology) {
        out.push_back(error("E006", "'" + e.id + "' has no technology binding", e.span));
      }
      break;
    case Level::Ddsm:
      if (e.kind == Kind::PlatformService && !e.technology) {
        out.push_back(error("E006",
                            "service '" + e.id + "' has no technology binding", e.span));
      }
      break;
  }
}

}  // namespace detail

// Full structural and profile validation. Total: every finding is returned
// as a diagnostic, nothing throws.
inline std::vector<Diagnostic> validate(const Model& model,
                                        const Profile& profile = builtin_profile()) {
  std::vector<Diagnostic> out;

  std::set<std::string_view> seen;
  for (const Element& e : model.elements) {
    if (!seen.insert(e.id).second) {
      out.push_back(error("E003", "duplicate element id '" + e.id + "'", e.span));
    }
  }

  for (const Element& e : model.elements) detail::element_diags(e, model.level, profile, out);

  for (const Flow& f : model.flows) {
    bool resolvable = true;
    if (!model.find_element(f.from)) {
      out.push_back(error("E002", "flow endpoint '" + f.from + "' does not exist", f.span));
      resolvable = false;
    }
    if (!model.find_element(f.to)) {
      out.push_back(error("E002", "flow endpoint '" + f.to + "' does not exist", f.span));
      resolvable = false;
    }
    if (resolvable && f.from == f.to) {
      out.push_back(error("E105", "flow '" + f.from + " -> " + f.to + "' is a self-loop", f.span));
    }
    if (!(f.probability > 0.0 && f.probability <= 1.0)) {
      out.push_back(error("E106",
                          "flow '" + f.from + " -> " + f.to + "' has probability " +
                              format_real(f.probability) + ", expected (0, 1]",
                          f.span));
    }
  }

  // Residual mass below 1 is departure from the system; above 1 is a bug.
  // Flows into hosts are structural (hostedOn), not routing, and carry no
  // probability mass.
  for (const Element& e : model.elements) {
    double mass = 0.0;
    const Flow* last = nullptr;
    for (const Flow& f : model.flows) {
      if (f.from != e.id) continue;
      const Element* target = model.find_element(f.to);
      if (target && target->kind == Kind::Host) continue;
      mass += f.probability;
      last = &f;
    }
    if (mass > 1.0 + 1e-9) {
      out.push_back(error("E004",
                          "outgoing probability mass of '" + e.id + "' is " +
                              format_real(mass) + " > 1",
                          last ? last->span : e.span));
    }
  }

  return out;
}

struct ApplyResult {
  std::optional<Model> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

// Returns a new model carrying the application; the input is untouched.
inline ApplyResult apply_stereotype(const Model& model, std::string_view element_id,
                                    const StereotypeApplication& app,
                                    const Profile& profile = builtin_profile()) {
  ApplyResult result;
  const Element* target = model.find_element(element_id);
  if (!target) {
    result.diagnostics.push_back(
        error("E001", "no element '" + std::string(element_id) + "' in model"));
    return result;
  }
  detail::conformance_diags(app, *target, model.level, profile, result.diagnostics);
  if (has_errors(result.diagnostics)) return result;

  Model next = model;
  next.find_element(element_id)->annotations.push_back(app);
  result.model = std::move(next);
  return result;
}

}  // namespace dia
