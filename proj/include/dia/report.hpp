#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dia/feedback.hpp"
#include "dia/qn.hpp"
#include "dia/simulate.hpp"
#include "dia/text.hpp"

namespace dia {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// analyze reports
// ---------------------------------------------------------------------------

inline ordered_json performance_json(const PerformanceReport& perf,
                                     const ReliabilityReport& rel,
                                     const SimulationReport* sim = nullptr,
                                     const SimConfig* cfg = nullptr) {
  ordered_json root;
  root["stations"] = ordered_json::array();
  for (const auto& st : perf.stations) {
    ordered_json s;
    s["id"] = st.id;
    s["lambda"] = st.lambda;
    s["rho"] = st.rho;
    if (st.stable) {
      s["wq_s"] = *st.wq_s;
      s["w_s"] = *st.w_s;
      s["lq"] = *st.lq;
      s["l"] = *st.l;
    }
    s["stable"] = st.stable;
    root["stations"].push_back(std::move(s));
  }
  root["system"]["throughput_per_s"] = perf.throughput_per_s;
  if (perf.w_e2e_s) root["system"]["w_e2e_s"] = *perf.w_e2e_s;
  root["reliability"]["system_availability"] = rel.system_availability;
  root["reliability"]["unannotated_elements"] = rel.unannotated_count;
  if (sim && cfg) {
    ordered_json js;
    js["seed"] = cfg->seed;
    js["replications"] = cfg->replications;
    js["horizon"] = cfg->horizon;
    js["warmup_fraction"] = cfg->warmup_fraction;
    js["stations"] = ordered_json::array();
    for (const auto& st : sim->stations) {
      ordered_json s;
      s["id"] = st.id;
      s["w_s"] = st.w_mean;
      s["w_halfwidth_s"] = st.w_halfwidth;
      s["l"] = st.l_mean;
      s["l_halfwidth"] = st.l_halfwidth;
      js["stations"].push_back(std::move(s));
    }
    root["simulation"] = std::move(js);
  }
  return root;
}

inline std::string performance_text(const PerformanceReport& perf,
                                    const ReliabilityReport& rel,
                                    const SimulationReport* sim = nullptr,
                                    const SimConfig* cfg = nullptr) {
  std::string out = "Performance (analytic, open Jackson network)\n";
  out += "  station             lambda/s       rho      Wq_ms       W_ms         Lq          L\n";
  for (const auto& st : perf.stations) {
    char line[256];
    if (st.stable) {
      std::snprintf(line, sizeof line,
                    "  %-18s %9s %9s %10s %10s %10s %10s\n", st.id.c_str(),
                    detail::fixed(st.lambda, 3).c_str(),
                    detail::fixed(st.rho, 4).c_str(),
                    detail::fixed(*st.wq_s * 1000.0, 3).c_str(),
                    detail::fixed(*st.w_s * 1000.0, 3).c_str(),
                    detail::fixed(*st.lq, 3).c_str(),
                    detail::fixed(*st.l, 3).c_str());
    } else {
      std::snprintf(line, sizeof line, "  %-18s %9s %9s   UNSTABLE\n",
                    st.id.c_str(), detail::fixed(st.lambda, 3).c_str(),
                    detail::fixed(st.rho, 4).c_str());
    }
    out += line;
  }
  out += "  system throughput: " + detail::fixed(perf.throughput_per_s, 3) + " /s\n";
  if (perf.w_e2e_s)
    out += "  end-to-end W: " + detail::fixed(*perf.w_e2e_s * 1000.0, 3) + " ms\n";
  else
    out += "  end-to-end W: n/a (unstable station or no traffic)\n";

  if (sim && cfg) {
    out += "Simulation (seed=" + format_int(static_cast<std::int64_t>(cfg->seed)) +
           ", " + format_int(cfg->replications) + " x " +
           format_int(cfg->horizon) + " jobs, warmup " +
           format_real(cfg->warmup_fraction) + ")\n";
    out += "  station                 W_ms   +/-95%          L   +/-95%\n";
    for (const auto& st : sim->stations) {
      char line[256];
      std::snprintf(line, sizeof line, "  %-18s %9s %8s %10s %8s\n",
                    st.id.c_str(),
                    detail::fixed(st.w_mean * 1000.0, 3).c_str(),
                    detail::fixed(st.w_halfwidth * 1000.0, 3).c_str(),
                    detail::fixed(st.l_mean, 3).c_str(),
                    detail::fixed(st.l_halfwidth, 3).c_str());
      out += line;
    }
  }

  out += "Reliability\n";
  out += "  system availability: " + format_real(rel.system_availability);
  out += " (" + format_int(rel.unannotated_count) +
         " element(s) without availability annotations)\n";
  return out;
}

// ---------------------------------------------------------------------------
// feedback reports
// ---------------------------------------------------------------------------

inline ordered_json feedback_json(const std::vector<Incident>& incidents,
                                  const std::vector<AntiPatternFinding>& findings) {
  ordered_json root;
  root["incidents"] = ordered_json::array();
  for (const auto& inc : incidents) {
    ordered_json j;
    j["element"] = inc.element;
    j["kind"] = std::string(incident_name(inc.kind));
    j["observed"] = inc.observed;
    j["reference"] = inc.reference;
    j["severity"] = inc.severity == Severity::Error ? "error" : "warning";
    root["incidents"].push_back(std::move(j));
  }
  root["antipatterns"] = ordered_json::array();
  for (const auto& f : findings) {
    ordered_json j;
    j["pattern"] = f.pattern;
    j["elements"] = f.elements;
    j["evidence"] = f.evidence;
    root["antipatterns"].push_back(std::move(j));
  }
  return root;
}

inline std::string feedback_text(const std::vector<Incident>& incidents,
                                 const std::vector<AntiPatternFinding>& findings,
                                 bool with_antipatterns) {
  std::string out = "Incidents\n";
  if (incidents.empty()) out += "  none\n";
  for (const auto& inc : incidents) {
    out += "  ";
    out += inc.severity == Severity::Error ? "error" : "warning";
    out += " " + std::string(incident_name(inc.kind)) + " " + inc.element +
           ": observed " + format_real(inc.observed) + " vs " +
           format_real(inc.reference) + "\n";
  }
  if (with_antipatterns) {
    out += "Anti-patterns\n";
    if (findings.empty()) out += "  none\n";
    for (const auto& f : findings) {
      out += "  " + f.pattern + " [";
      for (std::size_t i = 0; i < f.elements.size(); ++i) {
        if (i) out += ", ";
        out += f.elements[i];
      }
      out += "]: " + f.evidence + "\n";
    }
  }
  return out;
}

}  // namespace dia
