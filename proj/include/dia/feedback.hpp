#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/model.hpp"
#include "dia/profile.hpp"
#include "dia/qn.hpp"
#include "dia/text.hpp"

namespace dia {

// ---------------------------------------------------------------------------
// Metrics ingestion
// ---------------------------------------------------------------------------

enum class MetricKind { ResponseTimeMs, Utilization, ThroughputPerS, Availability };

inline std::string_view metric_name(MetricKind m) {
  switch (m) {
    case MetricKind::ResponseTimeMs: return "responseTimeMs";
    case MetricKind::Utilization: return "utilization";
    case MetricKind::ThroughputPerS: return "throughputPerS";
    case MetricKind::Availability: return "availability";
  }
  return "";
}

inline std::optional<MetricKind> metric_from_name(std::string_view s) {
  if (s == "responseTimeMs") return MetricKind::ResponseTimeMs;
  if (s == "utilization") return MetricKind::Utilization;
  if (s == "throughputPerS") return MetricKind::ThroughputPerS;
  if (s == "availability") return MetricKind::Availability;
  return std::nullopt;
}

struct MetricsRecord {
  std::string element;
  MetricKind metric = MetricKind::ResponseTimeMs;
  double value = 0.0;
  std::string timestamp;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct IngestResult {
  std::vector<MetricsRecord> records;
  std::vector<Diagnostic> diagnostics;
};

inline constexpr std::string_view kMetricsHeader = "element,metric,value,timestamp";

// CSV with header exactly `element,metric,value,timestamp`. Bad rows are
// skipped with diagnostics; good rows around them are kept. Never aborts.
inline IngestResult ingest(std::string_view text,
                           const std::string& file = "<metrics>") {
  IngestResult res;
  std::string normalized = normalize_newlines(text);

  std::vector<std::pair<int, std::string_view>> lines;
  {
    int lineno = 0;
    std::size_t start = 0;
    while (start <= normalized.size()) {
      std::size_t nl = normalized.find('\n', start);
      std::string_view line(normalized.data() + start,
                            (nl == std::string::npos ? normalized.size() : nl) - start);
      ++lineno;
      lines.emplace_back(lineno, line);
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }
  auto span_of = [&](int lineno, std::string_view line) {
    return SourceSpan{file, lineno, 1, lineno, static_cast<int>(line.size()) + 1};
  };

  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first].second).empty()) ++first;
  if (first >= lines.size() || trim(lines[first].second) != kMetricsHeader) {
    SourceSpan sp = first < lines.size()
                        ? span_of(lines[first].first, lines[first].second)
                        : SourceSpan{file, 1, 1, 1, 1};
    res.diagnostics.push_back(error(
        "E502", "expected header '" + std::string(kMetricsHeader) + "'", sp));
    return res;
  }

  for (std::size_t li = first + 1; li < lines.size(); ++li) {
    auto [lineno, raw] = lines[li];
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    SourceSpan sp = span_of(lineno, raw);

    std::vector<std::string_view> fields;
    std::size_t p = 0;
    while (p <= line.size()) {
      std::size_t comma = line.find(',', p);
      fields.push_back(line.substr(p, (comma == std::string_view::npos ? line.size() : comma) - p));
      if (comma == std::string_view::npos) break;
      p = comma + 1;
    }
    if (fields.size() != 4) {
      res.diagnostics.push_back(error(
          "E501", "malformed row: expected 4 comma-separated fields, got " +
                      format_int(static_cast<std::int64_t>(fields.size())),
          sp));
      continue;
    }

    MetricsRecord rec;
    rec.element = std::string(trim(fields[0]));
    std::string_view metric = trim(fields[1]);
    std::string_view value = trim(fields[2]);
    rec.timestamp = std::string(trim(fields[3]));

    if (rec.element.empty()) {
      res.diagnostics.push_back(error("E501", "malformed row: empty element id", sp));
      continue;
    }
    auto kind = metric_from_name(metric);
    if (!kind) {
      res.diagnostics.push_back(error(
          "E500", "unknown metric '" + std::string(metric) + "'", sp));
      continue;
    }
    rec.metric = *kind;
    double v = 0.0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || end != value.data() + value.size() || !(v >= 0.0)) {
      res.diagnostics.push_back(error(
          "E501", "malformed row: bad value '" + std::string(value) + "'", sp));
      continue;
    }
    if ((rec.metric == MetricKind::Utilization ||
         rec.metric == MetricKind::Availability) &&
        v > 1.0) {
      res.diagnostics.push_back(error(
          "E501", "malformed row: " + std::string(metric) + " must lie in [0, 1]",
          sp));
      continue;
    }
    rec.value = v;
    res.records.push_back(std::move(rec));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Incident detection
// ---------------------------------------------------------------------------

enum class IncidentKind { SlaViolation, PredictionDrift, Saturation };

inline std::string_view incident_name(IncidentKind k) {
  switch (k) {
    case IncidentKind::SlaViolation: return "SLA_VIOLATION";
    case IncidentKind::PredictionDrift: return "PREDICTION_DRIFT";
    case IncidentKind::Saturation: return "SATURATION";
  }
  return "";
}

struct Incident {
  std::string element;
  IncidentKind kind = IncidentKind::SlaViolation;
  double observed = 0.0;
  double reference = 0.0;  // SLA limit or prediction
  Severity severity = Severity::Error;

  friend bool operator==(const Incident&, const Incident&) = default;
};

inline constexpr double kSaturationThreshold = 0.95;
inline constexpr double kDriftThreshold = 0.25;

struct DetectResult {
  std::vector<Incident> incidents;  // ordered by element id, then kind
  std::vector<Diagnostic> diagnostics;
};

// Aggregation is the arithmetic mean per (element, metric); incidents are
// emitted in (element id, kind) order. Records for elements absent from the
// model yield W510 warnings here, never during ingest.
inline DetectResult detect_incidents(const Model& model,
                                     const std::vector<MetricsRecord>& records,
                                     const PerformanceReport* report = nullptr) {
  DetectResult res;

  std::map<std::string, std::map<MetricKind, std::pair<double, std::int64_t>>> agg;
  std::set<std::string> unknown;
  for (const auto& r : records) {
    if (!model.find_element(r.element)) {
      unknown.insert(r.element);
      continue;
    }
    auto& [sum, count] = agg[r.element][r.metric];
    sum += r.value;
    ++count;
  }
  for (const auto& id : unknown)  // std::set: already sorted
    res.diagnostics.push_back(warning(
        "W510", "metrics reference unknown element '" + id + "'"));

  auto mean_of = [&](const std::string& id, MetricKind m) -> std::optional<double> {
    auto it = agg.find(id);
    if (it == agg.end()) return std::nullopt;
    auto mt = it->second.find(m);
    if (mt == it->second.end()) return std::nullopt;
    return mt->second.first / static_cast<double>(mt->second.second);
  };

  for (const auto& [id, metrics] : agg) {  // std::map: element id order
    const Element* e = model.find_element(id);
    auto observed_rt = mean_of(id, MetricKind::ResponseTimeMs);

    if (observed_rt) {
      if (const auto* sla = e->annotation("SLA"))
        if (const auto* tag = sla->find_tag("responseTimeMaxMs")) {
          double limit = tag->value.as_real().value_or(0.0);
          if (*observed_rt > limit)
            res.incidents.push_back({id, IncidentKind::SlaViolation, *observed_rt,
                                     limit, Severity::Error});
        }
      if (report) {
        for (const auto& st : report->stations) {
          if (st.id != id || !st.w_s) continue;
          double predicted_ms = *st.w_s * 1000.0;
          if (predicted_ms > 0.0 &&
              std::fabs(*observed_rt - predicted_ms) / predicted_ms > kDriftThreshold)
            res.incidents.push_back({id, IncidentKind::PredictionDrift,
                                     *observed_rt, predicted_ms, Severity::Warning});
        }
      }
    }
    if (auto util = mean_of(id, MetricKind::Utilization);
        util && *util >= kSaturationThreshold)
      res.incidents.push_back(
          {id, IncidentKind::Saturation, *util, kSaturationThreshold,
           Severity::Warning});
  }
  return res;
}

// ---------------------------------------------------------------------------
// Anti-pattern detection
// ---------------------------------------------------------------------------

struct AntiPatternFinding {
  std::string pattern;  // "Bottleneck" or "OverProvisioned"
  std::vector<std::string> elements;
  std::string evidence;

  friend bool operator==(const AntiPatternFinding&, const AntiPatternFinding&) = default;
};

inline constexpr double kBottleneckRho = 0.9;
inline constexpr double kContrastRho = 0.5;
inline constexpr double kOverProvisionedRho = 0.1;

// Bottleneck: station at rho >= 0.9 while another sits at rho <= 0.5.
// OverProvisioned: station at rho <= 0.1 running more than one server in
// total (servers x replicas). The two rules are disjoint by construction.
inline std::vector<AntiPatternFinding> detect_antipatterns(
    const Model& model, const PerformanceReport& report,
    const Profile& profile = builtin_profile()) {
  std::vector<AntiPatternFinding> out;

  const StationMetrics* coldest = nullptr;
  for (const auto& st : report.stations)
    if (!coldest || st.rho < coldest->rho) coldest = &st;

  for (const auto& st : report.stations) {
    if (st.rho < kBottleneckRho || !coldest || coldest == &st) continue;
    if (coldest->rho <= kContrastRho)
      out.push_back({"Bottleneck",
                     {st.id},
                     "rho=" + format_real(st.rho) + " while '" + coldest->id +
                         "' sits at rho=" + format_real(coldest->rho)});
  }

  for (const auto& st : report.stations) {
    if (st.rho > kOverProvisionedRho) continue;
    std::int64_t capacity = 1;
    if (const Element* e = model.find_element(st.id)) {
      std::int64_t replicas =
          effective_int(profile, *e, "Deploy", "replicas").value_or(1);
      std::int64_t servers =
          e->kind == Kind::ComputeNode
              ? effective_int(profile, *e, "Compute", "servers").value_or(1)
              : 1;
      capacity = servers * replicas;
    }
    if (capacity > 1)
      out.push_back({"OverProvisioned",
                     {st.id},
                     "rho=" + format_real(st.rho) + " with servers*replicas=" +
                         format_int(capacity)});
  }
  return out;
}

}  // namespace dia
