#pragma once

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/qn.hpp"

namespace dia {

// ---------------------------------------------------------------------------
// RNG: SplitMix64. Replication r of master seed S draws from an independent
// stream seeded with mix64(S + (r+1) * 0x9E3779B97F4A7C15). Uniforms take
// the top 53 bits; exponentials use inversion (-log1p(-u)/rate). This scheme
// is part of the report contract: identical (network, config) inputs yield
// byte-identical simulation reports.
// ---------------------------------------------------------------------------

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }
  double uniform() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t replication_seed(std::uint64_t master, int replication) {
  return mix64(master + static_cast<std::uint64_t>(replication + 1) *
                             0x9E3779B97F4A7C15ull);
}

// ---------------------------------------------------------------------------
// Configuration and report
// ---------------------------------------------------------------------------

struct SimConfig {
  std::uint64_t seed = 0;
  int replications = 10;
  std::int64_t horizon = 10000;     // completed jobs per replication
  double warmup_fraction = 0.2;     // completed-job fraction discarded
};

struct SimStationEstimate {
  std::string id;
  double w_mean = 0.0;        // seconds
  double w_halfwidth = 0.0;   // 95% CI half-width over replication means
  double l_mean = 0.0;
  double l_halfwidth = 0.0;
  std::int64_t visits = 0;    // total post-warmup visits across replications
};

struct SimulationReport {
  std::vector<SimStationEstimate> stations;
};

struct SimulateResult {
  std::optional<SimulationReport> report;
  std::vector<Diagnostic> diagnostics;
};

// ---------------------------------------------------------------------------
// Event-driven core
// ---------------------------------------------------------------------------

namespace detail {

struct SimEvent {
  double time = 0.0;
  std::uint64_t seq = 0;  // FIFO tie-break
  enum class Type { ExternalArrival, Departure } type = Type::ExternalArrival;
  std::size_t station = 0;
  double visit_start = 0.0;  // Departure: when the job arrived at the station
};

struct SimEventLater {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct StationState {
  std::int64_t busy = 0;
  std::deque<double> waiting;   // visit start times, FIFO
  std::int64_t n = 0;           // jobs present (queue + service)
  double area = 0.0;            // integral of n over the measured window
  double last_change = 0.0;
  double sojourn_sum = 0.0;
  std::int64_t visit_count = 0;
};

struct ReplicationStats {
  std::vector<double> w;  // per station
  std::vector<double> l;
  std::vector<std::int64_t> visits;
  bool ok = false;
};

inline ReplicationStats run_replication(const QueueingNetwork& qn,
                                        const SimConfig& cfg, int replication) {
  std::size_t n_st = qn.stations.size();
  ReplicationStats stats;
  stats.w.assign(n_st, 0.0);
  stats.l.assign(n_st, 0.0);
  stats.visits.assign(n_st, 0);

  SplitMix64 rng(replication_seed(cfg.seed, replication));
  std::priority_queue<SimEvent, std::vector<SimEvent>, SimEventLater> events;
  std::uint64_t seq = 0;
  std::vector<StationState> st(n_st);

  auto touch = [&](std::size_t i, double t) {
    st[i].area += static_cast<double>(st[i].n) * (t - st[i].last_change);
    st[i].last_change = t;
  };

  auto begin_service = [&](std::size_t i, double now, double visit_start) {
    ++st[i].busy;
    events.push({now + rng.exponential(qn.stations[i].service_rate), seq++,
                 SimEvent::Type::Departure, i, visit_start});
  };

  auto arrive = [&](std::size_t i, double now) {
    touch(i, now);
    ++st[i].n;
    if (st[i].busy < qn.stations[i].servers)
      begin_service(i, now, now);
    else
      st[i].waiting.push_back(now);
  };

  for (std::size_t i = 0; i < n_st; ++i)
    if (qn.external_arrivals[i] > 0.0)
      events.push({rng.exponential(qn.external_arrivals[i]), seq++,
                   SimEvent::Type::ExternalArrival, i, 0.0});
  if (events.empty()) return stats;  // nothing drives the system

  std::int64_t completed = 0;
  std::int64_t warmup_jobs = static_cast<std::int64_t>(
      cfg.warmup_fraction * static_cast<double>(cfg.horizon));
  double window_start = 0.0;
  double end_time = 0.0;
  // Safety valve: routing that never releases jobs would stall completions.
  std::uint64_t max_events =
      1000000ull + 1000ull * static_cast<std::uint64_t>(cfg.horizon);

  for (std::uint64_t processed = 0; processed < max_events; ++processed) {
    if (events.empty()) return stats;  // drained without reaching the horizon
    SimEvent ev = events.top();
    events.pop();

    if (ev.type == SimEvent::Type::ExternalArrival) {
      events.push({ev.time + rng.exponential(qn.external_arrivals[ev.station]),
                   seq++, SimEvent::Type::ExternalArrival, ev.station, 0.0});
      arrive(ev.station, ev.time);
      continue;
    }

    // Departure from ev.station.
    std::size_t i = ev.station;
    touch(i, ev.time);
    --st[i].n;
    --st[i].busy;
    st[i].sojourn_sum += ev.time - ev.visit_start;
    ++st[i].visit_count;
    if (!st[i].waiting.empty()) {
      double visit_start = st[i].waiting.front();
      st[i].waiting.pop_front();
      begin_service(i, ev.time, visit_start);
    }

    // Route onward: cumulative scan of P[i]; residual departs the network.
    double u = rng.uniform();
    double cum = 0.0;
    bool routed = false;
    for (std::size_t j = 0; j < n_st; ++j) {
      cum += qn.routing[i][j];
      if (u < cum) {
        arrive(j, ev.time);
        routed = true;
        break;
      }
    }
    if (routed) continue;

    ++completed;
    if (completed == warmup_jobs) {
      window_start = ev.time;
      for (std::size_t k = 0; k < n_st; ++k) {
        st[k].area = 0.0;
        st[k].last_change = ev.time;
        st[k].sojourn_sum = 0.0;
        st[k].visit_count = 0;
      }
    }
    if (completed == cfg.horizon) {
      end_time = ev.time;
      break;
    }
  }
  if (end_time <= window_start) return stats;  // horizon never reached

  for (std::size_t i = 0; i < n_st; ++i) {
    touch(i, end_time);
    stats.w[i] = st[i].visit_count > 0
                     ? st[i].sojourn_sum / static_cast<double>(st[i].visit_count)
                     : 0.0;
    stats.l[i] = st[i].area / (end_time - window_start);
    stats.visits[i] = st[i].visit_count;
  }
  stats.ok = true;
  return stats;
}

}  // namespace detail

// Poisson arrivals, exponential FIFO service on c identical servers,
// probabilistic routing (residual departs). Replications use independent
// derived streams and aggregate in replication-index order; 95% confidence
// half-widths use Student-t over replication means.
inline SimulateResult simulate(const QueueingNetwork& qn, const SimConfig& cfg) {
  SimulateResult res;
  if (cfg.replications < 2) {
    res.diagnostics.push_back(error(
        "E420", "simulation requires at least 2 replications"));
    return res;
  }
  if (cfg.horizon < 1) {
    res.diagnostics.push_back(error(
        "E420", "simulation horizon must be at least 1 job"));
    return res;
  }
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) {
    res.diagnostics.push_back(error(
        "E420", "warmup fraction must lie in [0, 1)"));
    return res;
  }
  double total_arrivals = 0.0;
  for (double a : qn.external_arrivals) total_arrivals += a;
  if (!(total_arrivals > 0.0)) {
    res.diagnostics.push_back(error(
        "E420", "network has no external arrivals; nothing to simulate"));
    return res;
  }

  std::size_t n_st = qn.stations.size();
  std::vector<std::vector<double>> w_means(n_st), l_means(n_st);
  std::vector<std::int64_t> visits(n_st, 0);
  for (int r = 0; r < cfg.replications; ++r) {
    detail::ReplicationStats stats = detail::run_replication(qn, cfg, r);
    if (!stats.ok) {
      res.diagnostics.push_back(error(
          "E420", "replication " + format_int(r) +
                      " did not reach the completion horizon"));
      return res;
    }
    for (std::size_t i = 0; i < n_st; ++i) {
      w_means[i].push_back(stats.w[i]);
      l_means[i].push_back(stats.l[i]);
      visits[i] += stats.visits[i];
    }
  }

  boost::math::students_t dist(cfg.replications - 1);
  double t = boost::math::quantile(dist, 0.975);
  auto summarize = [&](const std::vector<double>& xs, double& mean, double& half) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    half = t * sd / std::sqrt(static_cast<double>(xs.size()));
  };

  SimulationReport report;
  for (std::size_t i = 0; i < n_st; ++i) {
    SimStationEstimate est;
    est.id = qn.stations[i].id;
    est.visits = visits[i];
    summarize(w_means[i], est.w_mean, est.w_halfwidth);
    summarize(l_means[i], est.l_mean, est.l_halfwidth);
    report.stations.push_back(std::move(est));
  }
  res.report = std::move(report);
  return res;
}

}  // namespace dia
