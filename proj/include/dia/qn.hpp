#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/model.hpp"
#include "dia/profile.hpp"
#include "dia/text.hpp"

namespace dia {

// ---------------------------------------------------------------------------
// Network types
// ---------------------------------------------------------------------------

struct QueueingStation {
  std::string id;
  double service_rate = 1.0;   // mu, jobs/s (= 1000 / serviceDemandMs)
  std::int64_t servers = 1;    // c (= servers x replicas)

  friend bool operator==(const QueueingStation&, const QueueingStation&) = default;
};

struct QueueingNetwork {
  std::vector<QueueingStation> stations;
  std::vector<double> external_arrivals;        // lambda0 per station
  std::vector<std::vector<double>> routing;     // P[i][j]; row sums <= 1

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < stations.size(); ++i)
      if (stations[i].id == id) return i;
    return std::nullopt;
  }
};

struct StationMetrics {
  std::string id;
  double lambda = 0.0;
  double rho = 0.0;
  bool stable = true;
  // Present only for stable stations.
  std::optional<double> wq_s;
  std::optional<double> w_s;
  std::optional<double> lq;
  std::optional<double> l;
};

struct PerformanceReport {
  std::vector<StationMetrics> stations;
  double throughput_per_s = 0.0;        // X = sum of external arrivals
  std::optional<double> w_e2e_s;        // (sum L_i)/X; absent unless all stable, X>0
};

struct ElementAvailability {
  std::string id;
  double availability = 1.0;
  std::int64_t replicas = 1;
  double effective = 1.0;  // 1 - (1-a)^replicas
};

struct ReliabilityReport {
  std::vector<ElementAvailability> elements;  // annotated elements only
  double system_availability = 1.0;           // product of effective values
  std::int64_t unannotated_count = 0;
};

// ---------------------------------------------------------------------------
// Model -> network
// ---------------------------------------------------------------------------

struct QnResult {
  std::optional<QueueingNetwork> network;  // present iff no error diagnostics
  std::vector<Diagnostic> diagnostics;
};

// Sources inject external arrivals into their flow targets (split by
// probability); compute and storage elements become M/M/c stations; flows
// among stations populate the routing matrix.
inline QnResult model_to_qn(const Model& model,
                            const Profile& profile = builtin_profile()) {
  QnResult res;
  if (model.level == Level::Ddsm) {
    res.diagnostics.push_back(error(
        "E403", "analysis requires a dpim or dtsm model, got ddsm"));
    return res;
  }
  QueueingNetwork qn;

  for (const auto& e : model.elements) {
    if (e.kind != Kind::ComputeNode && e.kind != Kind::StorageNode) continue;
    QueueingStation st;
    st.id = e.id;
    std::int64_t replicas =
        effective_int(profile, e, "Deploy", "replicas").value_or(1);
    if (e.kind == Kind::ComputeNode) {
      auto demand = effective_real(profile, e, "Compute", "serviceDemandMs");
      if (!demand || *demand <= 0.0) {
        res.diagnostics.push_back(error(
            "E400", "station '" + e.id + "' has no service demand", e.span));
        continue;
      }
      st.service_rate = 1000.0 / *demand;
      st.servers = effective_int(profile, e, "Compute", "servers").value_or(1) * replicas;
    } else {
      double demand =
          effective_real(profile, e, "Storage", "serviceDemandMs").value_or(2.0);
      if (demand <= 0.0) {
        res.diagnostics.push_back(error(
            "E400", "station '" + e.id + "' has no service demand", e.span));
        continue;
      }
      st.service_rate = 1000.0 / demand;
      st.servers = replicas;
    }
    qn.stations.push_back(std::move(st));
  }

  std::size_t n = qn.stations.size();
  qn.external_arrivals.assign(n, 0.0);
  qn.routing.assign(n, std::vector<double>(n, 0.0));

  for (const auto& e : model.elements) {
    if (e.kind != Kind::SourceNode) continue;
    double rate = effective_real(profile, e, "DataSource", "rate").value_or(0.0);
    bool any = false;
    for (const auto& f : model.flows) {
      if (f.from != e.id) continue;
      any = true;
      auto j = qn.index_of(f.to);
      if (!j) {
        res.diagnostics.push_back(error(
            "E402", "arrival from '" + e.id + "' targets '" + f.to +
                        "', which is not a station",
            f.span));
        continue;
      }
      qn.external_arrivals[*j] += rate * f.probability;
    }
    if (!any)
      res.diagnostics.push_back(error(
          "E401", "source '" + e.id + "' has no out-flow", e.span));
  }

  for (const auto& f : model.flows) {
    auto i = qn.index_of(f.from);
    if (!i) continue;  // source out-flows handled above
    auto j = qn.index_of(f.to);
    if (!j) {
      res.diagnostics.push_back(error(
          "E402", "flow from '" + f.from + "' targets '" + f.to +
                      "', which is not a station",
          f.span));
      continue;
    }
    qn.routing[*i][*j] += f.probability;
  }

  if (!has_errors(res.diagnostics)) res.network = std::move(qn);
  return res;
}

// ---------------------------------------------------------------------------
// Traffic equations: lambda = lambda0 + P^T lambda
// ---------------------------------------------------------------------------

struct TrafficResult {
  std::optional<std::vector<double>> arrivals;
  std::vector<Diagnostic> diagnostics;
};

// Direct solve of (I - P^T) lambda = lambda0 by Gaussian elimination with
// partial pivoting. E410 when the system is singular (routing traps flow).
inline TrafficResult solve_traffic(const QueueingNetwork& qn) {
  TrafficResult res;
  std::size_t n = qn.stations.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = (i == j ? 1.0 : 0.0) - qn.routing[j][i];
    a[i][n] = qn.external_arrivals[i];
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-12) {
      res.diagnostics.push_back(error(
          "E410", "traffic equations are singular (routing traps flow)"));
      return res;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t k = col; k <= n; ++k) a[r][k] -= factor * a[col][k];
    }
  }

  std::vector<double> lambda(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = a[i][n] / a[i][i];
  res.arrivals = std::move(lambda);
  return res;
}

// ---------------------------------------------------------------------------
// Analytic M/M/c metrics
// ---------------------------------------------------------------------------

// Erlang-C: probability an arriving job waits, for offered load a = lambda/mu
// and c servers; requires rho = a/c < 1.
inline double erlang_c(std::int64_t c, double a) {
  if (a <= 0.0) return 0.0;
  double rho = a / static_cast<double>(c);
  double term = 1.0;  // a^k / k! running term, k = 0
  double sum = 0.0;   // sum_{k=0}^{c-1} a^k / k!
  for (std::int64_t k = 0; k < c; ++k) {
    sum += term;
    term *= a / static_cast<double>(k + 1);
  }
  // term now holds a^c / c!
  double tail = term / (1.0 - rho);
  return tail / (sum + tail);
}

struct AnalysisResult {
  std::optional<PerformanceReport> report;
  std::vector<Diagnostic> diagnostics;
};

inline AnalysisResult analyze_qn(const QueueingNetwork& qn) {
  AnalysisResult res;
  TrafficResult traffic = solve_traffic(qn);
  res.diagnostics = traffic.diagnostics;
  if (!traffic.arrivals) return res;

  PerformanceReport report;
  bool all_stable = true;
  double total_l = 0.0;
  for (std::size_t i = 0; i < qn.stations.size(); ++i) {
    const QueueingStation& st = qn.stations[i];
    StationMetrics m;
    m.id = st.id;
    m.lambda = (*traffic.arrivals)[i];
    double mu = st.service_rate;
    double c = static_cast<double>(st.servers);
    m.rho = m.lambda / (c * mu);
    m.stable = m.rho < 1.0;
    if (m.stable) {
      double prob_wait = erlang_c(st.servers, m.lambda / mu);
      double wq = m.lambda > 0.0 ? prob_wait / (c * mu - m.lambda) : 0.0;
      m.wq_s = wq;
      m.w_s = wq + 1.0 / mu;
      m.lq = m.lambda * wq;
      m.l = m.lambda * *m.w_s;
      total_l += *m.l;
    } else {
      all_stable = false;
    }
    report.throughput_per_s += qn.external_arrivals[i];
    report.stations.push_back(std::move(m));
  }
  if (all_stable && report.throughput_per_s > 0.0)
    report.w_e2e_s = total_l / report.throughput_per_s;
  res.report = std::move(report);
  return res;
}

// ---------------------------------------------------------------------------
// Reliability
// ---------------------------------------------------------------------------

inline ReliabilityReport availability(const Model& model,
                                      const Profile& profile = builtin_profile()) {
  ReliabilityReport report;
  for (const auto& e : model.elements) {
    std::optional<double> a;
    if (const auto* ann = e.annotation("Compute"))
      if (const auto* tag = ann->find_tag("availability"))
        a = tag->value.as_real();
    if (!a)
      if (const auto* ann = e.annotation("Storage"))
        if (const auto* tag = ann->find_tag("availability"))
          a = tag->value.as_real();
    if (!a) {
      ++report.unannotated_count;
      continue;
    }
    ElementAvailability ea;
    ea.id = e.id;
    ea.availability = *a;
    ea.replicas = effective_int(profile, e, "Deploy", "replicas").value_or(1);
    double failure = 1.0;
    for (std::int64_t r = 0; r < ea.replicas; ++r) failure *= 1.0 - *a;
    ea.effective = 1.0 - failure;
    report.system_availability *= ea.effective;
    report.elements.push_back(std::move(ea));
  }
  return report;
}

// ---------------------------------------------------------------------------
// SLA checking
// ---------------------------------------------------------------------------

inline std::vector<Diagnostic> check_sla(const Model& model,
                                         const PerformanceReport& report) {
  std::vector<Diagnostic> out;
  for (const auto& e : model.elements) {
    const auto* sla = e.annotation("SLA");
    if (!sla) continue;
    const StationMetrics* m = nullptr;
    for (const auto& s : report.stations)
      if (s.id == e.id) m = &s;
    if (!m) continue;
    if (!m->stable) {
      out.push_back(warning(
          "W431", "station '" + e.id + "' is unstable; SLA not evaluable",
          e.span));
      continue;
    }
    if (const auto* tag = sla->find_tag("responseTimeMaxMs")) {
      double limit = tag->value.as_real().value_or(0.0);
      double predicted_ms = *m->w_s * 1000.0;
      if (predicted_ms > limit)
        out.push_back(error(
            "E430", "element '" + e.id + "' violates responseTimeMaxMs: predicted " +
                        format_real(predicted_ms) + " ms > limit " +
                        format_real(limit) + " ms",
            e.span));
    }
    if (const auto* tag = sla->find_tag("utilizationMax")) {
      double limit = tag->value.as_real().value_or(1.0);
      if (m->rho > limit)
        out.push_back(error(
            "E430", "element '" + e.id + "' violates utilizationMax: predicted " +
                        format_real(m->rho) + " > limit " + format_real(limit),
            e.span));
    }
  }
  return out;
}

}  // namespace dia
