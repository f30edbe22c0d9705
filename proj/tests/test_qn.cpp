// Queueing analysis tests. Every pinned numeric value below was computed
// independently by tests/oracle/erlang_c_oracle.py (50-digit arithmetic)
// before the analyzer was written; see tests/oracle/frozen_values.txt.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace dia;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::count_code;
using testutil::has_code;
using testutil::parse_or_throw;

namespace {

Model wikistats() {
  return parse_or_throw(testutil::read_file(testutil::sample("wikistats.dia")));
}

QueueingNetwork single_station(double lambda, double mu, std::int64_t c) {
  QueueingNetwork qn;
  qn.stations.push_back({"s", mu, c});
  qn.external_arrivals = {lambda};
  qn.routing = {{0.0}};
  return qn;
}

}  // namespace

TEST_CASE("model_to_qn builds the wikistats network") {
  QnResult res = model_to_qn(wikistats());
  REQUIRE(res.network.has_value());
  CHECK(res.diagnostics.empty());

  const QueueingNetwork& qn = *res.network;
  REQUIRE(qn.stations.size() == 2);  // sources are not stations
  REQUIRE(qn.index_of("Enrich") == 0);
  REQUIRE(qn.index_of("Store") == 1);
  CHECK(qn.stations[0].service_rate == 125.0);  // 1000 / 8 ms
  CHECK(qn.stations[0].servers == 2);
  CHECK(qn.stations[1].service_rate == 500.0);  // default 2 ms demand
  CHECK(qn.stations[1].servers == 1);
  CHECK(qn.external_arrivals[0] == 100.0);
  CHECK(qn.external_arrivals[1] == 0.0);
  CHECK(qn.routing[0][1] == 1.0);
  CHECK(qn.routing[1][0] == 0.0);
}

TEST_CASE("model_to_qn splits source rates by probability") {
  Model m = parse_or_throw(testutil::read_file(testutil::sample("corpus/m03_branch.dia")));
  QnResult res = model_to_qn(m);
  REQUIRE(res.network.has_value());
  const QueueingNetwork& qn = *res.network;
  // Feed 50/s -> Classify 1.0; Classify -> Hot 0.5 / Cold 0.3
  auto classify = qn.index_of("Classify");
  auto hot = qn.index_of("Hot");
  auto cold = qn.index_of("Cold");
  REQUIRE(classify.has_value());
  REQUIRE(hot.has_value());
  REQUIRE(cold.has_value());
  CHECK(qn.external_arrivals[*classify] == 50.0);
  CHECK(qn.routing[*classify][*hot] == 0.5);
  CHECK(qn.routing[*classify][*cold] == 0.3);

  // replicas multiply server counts: Deploy is a dtsm concern, so check via
  // a dtsm model instead.
  Model dtsm = *dpim_to_dtsm(m).model;
  StereotypeApplication dep;
  dep.stereotype = "Deploy";
  dep.tags.push_back({"replicas", TaggedValue::integer(3), {}});
  dtsm.find_element("Classify")->annotations.push_back(dep);
  QnResult res2 = model_to_qn(dtsm);
  REQUIRE(res2.network.has_value());
  CHECK(res2.network->stations[*qn.index_of("Classify")].servers == 3);  // 1 x 3
}

TEST_CASE("model_to_qn diagnostics") {
  SECTION("E400 missing service demand") {
    Model m;
    m.level = Level::Dpim;
    Element c;
    c.id = c.name = "C";
    c.kind = Kind::ComputeNode;
    m.elements.push_back(c);
    QnResult res = model_to_qn(m);
    CHECK_FALSE(res.network.has_value());
    REQUIRE(count_code(res.diagnostics, "E400") == 1);
    CHECK(res.diagnostics[0].message == "station 'C' has no service demand");
  }
  SECTION("E401 source without outgoing flow") {
    Model m = parse_or_throw(
        "model \"t\" level dpim {\n  source S @DataSource(rate = 1.0 /s)\n}\n");
    QnResult res = model_to_qn(m);
    CHECK_FALSE(res.network.has_value());
    REQUIRE(count_code(res.diagnostics, "E401") == 1);
    CHECK(res.diagnostics[0].message == "source 'S' has no out-flow");
  }
  SECTION("E402 flow into a non-station") {
    Model m = parse_or_throw(
        "model \"t\" level dpim {\n"
        "  source A @DataSource(rate = 1.0 /s)\n"
        "  source B @DataSource(rate = 1.0 /s)\n"
        "  compute C @Compute(serviceDemandMs = 1.0 ms)\n"
        "  flow A -> B\n"
        "  flow B -> C\n"
        "}\n");
    QnResult res = model_to_qn(m);
    CHECK_FALSE(res.network.has_value());
    REQUIRE(count_code(res.diagnostics, "E402") == 1);
    CHECK(res.diagnostics[0].message ==
          "arrival from 'A' targets 'B', which is not a station");
  }
  SECTION("E403 ddsm models are not analyzable") {
    Model ddsm = *dtsm_to_ddsm(*dpim_to_dtsm(wikistats()).model).model;
    QnResult res = model_to_qn(ddsm);
    CHECK_FALSE(res.network.has_value());
    REQUIRE(count_code(res.diagnostics, "E403") == 1);
    CHECK(res.diagnostics[0].message ==
          "analysis requires a dpim or dtsm model, got ddsm");
  }
}

TEST_CASE("traffic equations") {
  SECTION("tandem") {
    QueueingNetwork qn;
    qn.stations = {{"a", 10.0, 1}, {"b", 10.0, 1}};
    qn.external_arrivals = {2.0, 0.0};
    qn.routing = {{0.0, 1.0}, {0.0, 0.0}};
    TrafficResult res = solve_traffic(qn);
    REQUIRE(res.arrivals.has_value());
    CHECK_THAT((*res.arrivals)[0], WithinAbs(2.0, 1e-12));
    CHECK_THAT((*res.arrivals)[1], WithinAbs(2.0, 1e-12));
  }
  SECTION("feedback loop: lambda0=[1,0], P12=1, P21=0.5 -> [2,2]") {
    QueueingNetwork qn;
    qn.stations = {{"a", 10.0, 1}, {"b", 10.0, 1}};
    qn.external_arrivals = {1.0, 0.0};
    qn.routing = {{0.0, 1.0}, {0.5, 0.0}};
    TrafficResult res = solve_traffic(qn);
    REQUIRE(res.arrivals.has_value());
    CHECK_THAT((*res.arrivals)[0], WithinAbs(2.0, 1e-12));
    CHECK_THAT((*res.arrivals)[1], WithinAbs(2.0, 1e-12));
  }
  SECTION("zero input, zero output") {
    QueueingNetwork qn;
    qn.stations = {{"a", 10.0, 1}};
    qn.external_arrivals = {0.0};
    qn.routing = {{0.0}};
    TrafficResult res = solve_traffic(qn);
    REQUIRE(res.arrivals.has_value());
    CHECK((*res.arrivals)[0] == 0.0);
  }
  SECTION("E410 singular when routing traps flow") {
    QueueingNetwork qn;
    qn.stations = {{"a", 10.0, 1}, {"b", 10.0, 1}};
    qn.external_arrivals = {1.0, 0.0};
    qn.routing = {{0.0, 1.0}, {1.0, 0.0}};  // closed 2-cycle
    TrafficResult res = solve_traffic(qn);
    CHECK_FALSE(res.arrivals.has_value());
    REQUIRE(count_code(res.diagnostics, "E410") == 1);
    CHECK(res.diagnostics[0].message ==
          "traffic equations are singular (routing traps flow)");
  }
  SECTION("flow conservation on random substochastic networks") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      CAPTURE(seed);
      QueueingNetwork qn = testutil::random_network(seed);
      TrafficResult res = solve_traffic(qn);
      REQUIRE(res.arrivals.has_value());
      const auto& lambda = *res.arrivals;
      for (std::size_t i = 0; i < qn.stations.size(); ++i) {
        double rhs = qn.external_arrivals[i];
        for (std::size_t j = 0; j < qn.stations.size(); ++j)
          rhs += qn.routing[j][i] * lambda[j];
        REQUIRE_THAT(lambda[i], WithinRel(rhs, 1e-9));
      }
    }
  }
}

TEST_CASE("erlang_c basics") {
  CHECK(erlang_c(1, 0.0) == 0.0);
  CHECK(erlang_c(4, -1.0) == 0.0);
  // With one server the waiting probability equals the utilization.
  for (double a : {0.1, 0.25, 0.5, 0.9, 0.999})
    CHECK_THAT(erlang_c(1, a), WithinAbs(a, 1e-15));
  // Oracle: C(2, 1.5) = 0.64285714285714285714
  CHECK_THAT(erlang_c(2, 1.5), WithinAbs(0.64285714285714285714, 1e-15));
  // Bounded in [0, 1] across a sweep.
  for (std::int64_t c = 1; c <= 8; ++c)
    for (double rho = 0.05; rho < 1.0; rho += 0.05) {
      double v = erlang_c(c, rho * static_cast<double>(c));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
}

TEST_CASE("analytic station metrics match the oracle") {
  SECTION("M/M/1, lambda=0.5, mu=1: W=2.0") {
    AnalysisResult res = analyze_qn(single_station(0.5, 1.0, 1));
    REQUIRE(res.report.has_value());
    const StationMetrics& s = res.report->stations[0];
    CHECK(s.stable);
    CHECK_THAT(s.rho, WithinAbs(0.5, 1e-15));
    REQUIRE(s.w_s.has_value());
    CHECK_THAT(*s.w_s, WithinAbs(2.0, 1e-12));
    CHECK_THAT(*s.wq_s, WithinAbs(1.0, 1e-12));
    CHECK_THAT(*s.l, WithinAbs(1.0, 1e-12));
    CHECK_THAT(*s.lq, WithinAbs(0.5, 1e-12));
  }
  SECTION("M/M/2, lambda=1.5, mu=1: W=2.2857142857142857143") {
    AnalysisResult res = analyze_qn(single_station(1.5, 1.0, 2));
    REQUIRE(res.report.has_value());
    const StationMetrics& s = res.report->stations[0];
    CHECK_THAT(s.rho, WithinAbs(0.75, 1e-15));
    REQUIRE(s.w_s.has_value());
    CHECK_THAT(*s.w_s, WithinAbs(2.2857142857142857143, 1e-9));
    CHECK_THAT(*s.wq_s, WithinAbs(1.2857142857142857143, 1e-9));
    CHECK_THAT(*s.l, WithinAbs(3.4285714285714285714, 1e-9));
  }
  SECTION("wikistats: Enrich M/M/2 and Store M/M/1") {
    QnResult qn = model_to_qn(wikistats());
    AnalysisResult res = analyze_qn(*qn.network);
    REQUIRE(res.report.has_value());
    const PerformanceReport& rep = *res.report;
    REQUIRE(rep.stations.size() == 2);

    const StationMetrics& enrich = rep.stations[0];
    CHECK(enrich.id == "Enrich");
    CHECK_THAT(enrich.lambda, WithinAbs(100.0, 1e-12));
    CHECK_THAT(enrich.rho, WithinAbs(0.4, 1e-15));
    // Oracle: W = 0.0095238095238095238095 s (9.52 ms), not 9.14.
    CHECK_THAT(*enrich.w_s, WithinAbs(0.0095238095238095238095, 1e-15));
    CHECK_THAT(*enrich.wq_s, WithinAbs(0.0015238095238095238095, 1e-15));

    const StationMetrics& store = rep.stations[1];
    CHECK_THAT(*store.w_s, WithinAbs(0.0025, 1e-15));
    CHECK_THAT(store.rho, WithinAbs(0.2, 1e-15));

    CHECK(rep.throughput_per_s == 100.0);
    REQUIRE(rep.w_e2e_s.has_value());
    // (L_Enrich + L_Store) / X = (0.95238... + 0.25) / 100
    CHECK_THAT(*rep.w_e2e_s, WithinAbs(0.012023809523809523809, 1e-15));
  }
  SECTION("oracle grid: mu=1, rho x c") {
    struct Case {
      std::int64_t c;
      double rho;
      double w;
    };
    // Values frozen from the oracle script.
    const Case grid[] = {
        {1, 0.1, 1.1111111111111111111}, {1, 0.3, 1.4285714285714285714},
        {1, 0.5, 2.0},                   {1, 0.7, 3.3333333333333333333},
        {1, 0.9, 10.0},                  {2, 0.1, 1.010101010101010101},
        {2, 0.3, 1.0989010989010989011}, {2, 0.5, 1.3333333333333333333},
        {2, 0.7, 1.9607843137254901961}, {2, 0.9, 5.2631578947368421053},
        {4, 0.1, 1.00022067747986318},   {4, 0.3, 1.0132320509679000245},
        {4, 0.5, 1.0869565217391304348}, {4, 0.7, 1.3572119318604478167},
        {4, 0.9, 2.9693831607384061234},
    };
    for (const Case& g : grid) {
      CAPTURE(g.c, g.rho);
      double lambda = g.rho * static_cast<double>(g.c);
      AnalysisResult res = analyze_qn(single_station(lambda, 1.0, g.c));
      REQUIRE(res.report.has_value());
      REQUIRE_THAT(*res.report->stations[0].w_s, WithinRel(g.w, 1e-12));
    }
  }
  SECTION("W grows with lambda") {
    double prev = 0.0;
    for (double lambda = 0.1; lambda < 2.0; lambda += 0.1) {
      AnalysisResult res = analyze_qn(single_station(lambda, 1.0, 2));
      REQUIRE(res.report.has_value());
      double w = *res.report->stations[0].w_s;
      CHECK(w > prev);
      prev = w;
    }
  }
  SECTION("L matches the birth-death distribution") {
    // M/M/1 rho=0.5: L = sum k rho^k (1-rho) = rho/(1-rho) = 1.0
    double l = 0.0;
    for (int k = 1; k <= 1000000; ++k)
      l += k * std::pow(0.5, k) * 0.5;
    AnalysisResult res = analyze_qn(single_station(0.5, 1.0, 1));
    CHECK_THAT(*res.report->stations[0].l, WithinAbs(l, 1e-9));
  }
  SECTION("unstable stations carry no point metrics") {
    AnalysisResult res = analyze_qn(single_station(2.0, 1.0, 1));
    REQUIRE(res.report.has_value());
    const StationMetrics& s = res.report->stations[0];
    CHECK_FALSE(s.stable);
    CHECK(s.rho == 2.0);
    CHECK_FALSE(s.w_s.has_value());
    CHECK_FALSE(s.l.has_value());
    CHECK_FALSE(res.report->w_e2e_s.has_value());
  }
  SECTION("zero arrivals mean zero wait") {
    AnalysisResult res = analyze_qn(single_station(0.0, 1.0, 1));
    REQUIRE(res.report.has_value());
    const StationMetrics& s = res.report->stations[0];
    CHECK(s.stable);
    CHECK(*s.wq_s == 0.0);
    CHECK_THAT(*s.w_s, WithinAbs(1.0, 1e-15));  // just the service time
    CHECK_FALSE(res.report->w_e2e_s.has_value());  // X = 0
  }
}

TEST_CASE("reliability") {
  SECTION("two elements 0.99 and 0.98 multiply to 0.9702 exactly") {
    Model m = parse_or_throw(
        "model \"t\" level dpim {\n"
        "  source S @DataSource(rate = 1.0 /s)\n"
        "  compute C @Compute(serviceDemandMs = 1.0 ms, availability = 0.99)\n"
        "  storage D @Storage(availability = 0.98)\n"
        "  flow S -> C\n"
        "  flow C -> D\n"
        "}\n");
    ReliabilityReport rep = availability(m);
    REQUIRE(rep.elements.size() == 2);
    CHECK(rep.system_availability == 0.9702);  // exact in double precision
    CHECK(rep.unannotated_count == 1);         // the source
  }
  SECTION("replicas=2 at a=0.99 gives 0.9999 exactly") {
    Model m = parse_or_throw(
        "model \"t\" level dtsm {\n"
        "  source S: kafka @DataSource(rate = 1.0 /s)\n"
        "  compute C: storm @Compute(serviceDemandMs = 1.0 ms, availability = 0.99)"
        " @Deploy(replicas = 2)\n"
        "  flow S -> C\n"
        "}\n");
    ReliabilityReport rep = availability(m);
    REQUIRE(rep.elements.size() == 1);
    CHECK(rep.elements[0].effective == 0.9999);
    CHECK(rep.system_availability == 0.9999);
    CHECK(rep.elements[0].replicas == 2);
  }
  SECTION("replication never hurts") {
    for (double a : {0.5, 0.9, 0.99}) {
      double prev = 0.0;
      for (std::int64_t r = 1; r <= 5; ++r) {
        double failure = 1.0;
        for (std::int64_t k = 0; k < r; ++k) failure *= 1.0 - a;
        double eff = 1.0 - failure;
        CHECK(eff >= prev);
        CHECK(eff <= 1.0);
        prev = eff;
      }
    }
  }
  SECTION("wikistats: only Store is annotated") {
    ReliabilityReport rep = availability(wikistats());
    REQUIRE(rep.elements.size() == 1);
    CHECK(rep.elements[0].id == "Store");
    CHECK(rep.system_availability == 0.999);
    CHECK(rep.unannotated_count == 2);
  }
}

TEST_CASE("SLA checking") {
  SECTION("violation raises E430") {
    // Enrich W = 9.524 ms; an SLA of 9 ms must trip, 50 ms must not.
    Model tight = wikistats();
    Element* enrich = tight.find_element("Enrich");
    for (auto& annot : enrich->annotations)
      if (annot.stereotype == "SLA")
        annot.tags[0].value = TaggedValue::real(9.0, Unit::Milliseconds);
    QnResult qn = model_to_qn(tight);
    AnalysisResult res = analyze_qn(*qn.network);
    auto diags = check_sla(tight, *res.report);
    REQUIRE(count_code(diags, "E430") == 1);
    double predicted_ms = *res.report->stations[0].w_s * 1000.0;
    CHECK(diags[0].message == "element 'Enrich' violates responseTimeMaxMs: "
                              "predicted " + format_real(predicted_ms) +
                              " ms > limit 9.0 ms");

    auto clean = check_sla(wikistats(), *res.report);
    CHECK(clean.empty());
  }
  SECTION("utilization limit") {
    Model m = parse_or_throw(
        "model \"t\" level dpim {\n"
        "  source S @DataSource(rate = 90.0 /s)\n"
        "  compute C @Compute(serviceDemandMs = 10.0 ms) @SLA(utilizationMax = 0.8)\n"
        "  flow S -> C\n"
        "}\n");
    QnResult qn = model_to_qn(m);
    AnalysisResult res = analyze_qn(*qn.network);
    auto diags = check_sla(m, *res.report);
    REQUIRE(count_code(diags, "E430") == 1);
    CHECK(diags[0].message ==
          "element 'C' violates utilizationMax: predicted 0.9 > limit 0.8");
  }
  SECTION("W431 on unstable stations") {
    Model m = parse_or_throw(
        "model \"t\" level dpim {\n"
        "  source S @DataSource(rate = 200.0 /s)\n"
        "  compute C @Compute(serviceDemandMs = 10.0 ms) @SLA(responseTimeMaxMs = 50.0 ms)\n"
        "  flow S -> C\n"
        "}\n");
    QnResult qn = model_to_qn(m);
    AnalysisResult res = analyze_qn(*qn.network);
    auto diags = check_sla(m, *res.report);
    REQUIRE(count_code(diags, "W431") == 1);
    CHECK(diags[0].severity == Severity::Warning);
    CHECK(diags[0].message == "station 'C' is unstable; SLA not evaluable");
    CHECK(count_code(diags, "E430") == 0);
  }
}

TEST_CASE("analysis is deterministic") {
  QnResult a = model_to_qn(wikistats());
  QnResult b = model_to_qn(wikistats());
  AnalysisResult ra = analyze_qn(*a.network);
  AnalysisResult rb = analyze_qn(*b.network);
  REQUIRE(ra.report.has_value());
  REQUIRE(rb.report.has_value());
  REQUIRE(ra.report->stations.size() == rb.report->stations.size());
  for (std::size_t i = 0; i < ra.report->stations.size(); ++i) {
    CHECK(ra.report->stations[i].lambda == rb.report->stations[i].lambda);
    CHECK(*ra.report->stations[i].w_s == *rb.report->stations[i].w_s);
  }
}
