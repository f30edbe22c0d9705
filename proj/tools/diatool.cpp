// diatool: model the pipeline, refine it, emit TOSCA, predict and observe.
//
// Methodology order: check -> transform --to dtsm -> transform --to ddsm
// -> tosca -> analyze -> feedback. Exit codes: 0 success, 1 diagnostics
// with errors, 2 usage, 3 I/O, 4 analysis infeasible.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dia/dia.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInfeasible = 4;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  return static_cast<bool>(out.flush());
}

int io_error(const std::string& verb, const std::string& path) {
  std::cerr << "diatool: error: cannot " << verb << " '" << path << "'\n";
  return kExitIo;
}

void print_diagnostics(const std::vector<dia::Diagnostic>& diags,
                       const std::string& fallback_file) {
  for (const auto& d : diags) std::cerr << dia::render(d, fallback_file) << "\n";
}

struct CheckedModel {
  std::optional<dia::Model> model;
  std::vector<dia::Diagnostic> diagnostics;
};

// Load, parse, and validate one .dia file; diagnostics go to stderr.
std::optional<dia::Model> load_model(const std::string& path, int& exit_code) {
  auto text = read_file(path);
  if (!text) {
    exit_code = io_error("read", path);
    return std::nullopt;
  }
  dia::CheckResult checked = dia::check_text(*text, path);
  print_diagnostics(checked.diagnostics, path);
  if (!checked.model) {
    exit_code = kExitDiagnostics;
    return std::nullopt;
  }
  exit_code = kExitOk;
  return std::move(checked.model);
}

// ---------------------------------------------------------------------------

int run_check(const std::string& path) {
  auto text = read_file(path);
  if (!text) return io_error("read", path);
  dia::CheckResult res = dia::check_text(*text, path);
  print_diagnostics(res.diagnostics, path);
  std::size_t errors = dia::count_errors(res.diagnostics);
  std::size_t warnings = dia::count_warnings(res.diagnostics);
  if (errors > 0) return kExitDiagnostics;
  std::cout << "OK (" << errors << " errors, " << warnings << " warnings)\n";
  return kExitOk;
}

int run_transform(const std::string& target, const std::string& in_path,
                  const std::string& catalog_path, const std::string& deploy_path,
                  const std::string& out_path) {
  int code = kExitOk;
  auto model = load_model(in_path, code);
  if (!model) return code;

  dia::TransformResult result;
  if (target == "dtsm") {
    dia::TechnologyOverrides overrides;
    if (!catalog_path.empty()) {
      auto text = read_file(catalog_path);
      if (!text) return io_error("read", catalog_path);
      auto parsed = dia::parse_technology_overrides(*text, catalog_path);
      print_diagnostics(parsed.diagnostics, catalog_path);
      if (dia::has_errors(parsed.diagnostics)) return kExitDiagnostics;
      overrides = std::move(parsed.overrides);
    }
    result = dia::dpim_to_dtsm(*model, dia::default_catalog(), overrides);
  } else {
    dia::DeploymentConfig deploy;
    if (!deploy_path.empty()) {
      auto text = read_file(deploy_path);
      if (!text) return io_error("read", deploy_path);
      auto parsed = dia::parse_deployment_config(*text, deploy_path);
      print_diagnostics(parsed.diagnostics, deploy_path);
      if (dia::has_errors(parsed.diagnostics)) return kExitDiagnostics;
      deploy = std::move(parsed.config);
    }
    result = dia::dtsm_to_ddsm(*model, deploy);
  }
  print_diagnostics(result.diagnostics, in_path);
  if (!result.model) return kExitDiagnostics;

  if (!write_file(out_path, dia::format(*result.model)))
    return io_error("write", out_path);

  // Sidecar: compose with the input's trace when one exists, so queries on
  // the final model walk back to the original elements.
  std::vector<dia::TraceLink> links;
  if (auto prior = read_file(in_path + ".trace")) {
    auto parsed = dia::parse_trace(*prior, in_path + ".trace");
    print_diagnostics(parsed.diagnostics, in_path + ".trace");
    if (dia::has_errors(parsed.diagnostics)) return kExitDiagnostics;
    links = std::move(parsed.trace);
  }
  links.insert(links.end(), result.trace.begin(), result.trace.end());
  if (!write_file(out_path + ".trace", dia::serialize_trace(links)))
    return io_error("write", out_path + ".trace");
  return kExitOk;
}

int run_tosca(const std::string& in_path, const std::string& out_path) {
  int code = kExitOk;
  auto model = load_model(in_path, code);
  if (!model) return code;
  dia::ToscaResult result = dia::to_tosca(*model);
  print_diagnostics(result.diagnostics, in_path);
  if (!result.document) return kExitDiagnostics;
  auto structural = dia::validate_tosca(*result.document);
  print_diagnostics(structural, in_path);
  if (dia::has_errors(structural)) return kExitDiagnostics;
  if (!write_file(out_path, dia::serialize(*result.document)))
    return io_error("write", out_path);
  return kExitOk;
}

int run_analyze(const std::string& in_path, bool with_sim, std::uint64_t seed,
                int reps, std::int64_t horizon, const std::string& report_format) {
  int code = kExitOk;
  auto model = load_model(in_path, code);
  if (!model) return code;

  dia::QnResult qn = dia::model_to_qn(*model);
  print_diagnostics(qn.diagnostics, in_path);
  if (!qn.network) return kExitDiagnostics;

  dia::AnalysisResult analysis = dia::analyze_qn(*qn.network);
  print_diagnostics(analysis.diagnostics, in_path);
  if (!analysis.report) return kExitInfeasible;  // singular traffic equations

  bool unstable = false;
  for (const auto& st : analysis.report->stations)
    if (!st.stable) unstable = true;

  auto sla = dia::check_sla(*model, *analysis.report);
  print_diagnostics(sla, in_path);

  dia::ReliabilityReport reliability = dia::availability(*model);

  std::optional<dia::SimulationReport> sim;
  dia::SimConfig cfg{seed, reps, horizon, 0.2};
  if (with_sim) {
    dia::SimulateResult sim_res = dia::simulate(*qn.network, cfg);
    print_diagnostics(sim_res.diagnostics, in_path);
    if (!sim_res.report) return kExitDiagnostics;
    sim = std::move(sim_res.report);
  }

  if (report_format == "json") {
    std::cout << dia::performance_json(*analysis.report, reliability,
                                       sim ? &*sim : nullptr,
                                       with_sim ? &cfg : nullptr)
                     .dump(2)
              << "\n";
  } else {
    std::cout << dia::performance_text(*analysis.report, reliability,
                                       sim ? &*sim : nullptr,
                                       with_sim ? &cfg : nullptr);
  }

  if (unstable) return kExitInfeasible;  // trumps SLA errors
  if (dia::has_errors(sla)) return kExitDiagnostics;
  return kExitOk;
}

int run_feedback(const std::string& in_path, const std::string& metrics_path,
                 bool with_prediction, const std::string& report_format) {
  int code = kExitOk;
  auto model = load_model(in_path, code);
  if (!model) return code;

  auto metrics_text = read_file(metrics_path);
  if (!metrics_text) return io_error("read", metrics_path);
  dia::IngestResult ingested = dia::ingest(*metrics_text, metrics_path);
  print_diagnostics(ingested.diagnostics, metrics_path);

  std::optional<dia::PerformanceReport> prediction;
  if (with_prediction) {
    dia::QnResult qn = dia::model_to_qn(*model);
    print_diagnostics(qn.diagnostics, in_path);
    if (!qn.network) return kExitDiagnostics;
    dia::AnalysisResult analysis = dia::analyze_qn(*qn.network);
    print_diagnostics(analysis.diagnostics, in_path);
    if (!analysis.report) return kExitInfeasible;
    prediction = std::move(analysis.report);
  }

  dia::DetectResult detected = dia::detect_incidents(
      *model, ingested.records, prediction ? &*prediction : nullptr);
  print_diagnostics(detected.diagnostics, metrics_path);

  std::vector<dia::AntiPatternFinding> findings;
  if (prediction) findings = dia::detect_antipatterns(*model, *prediction);

  if (report_format == "json") {
    std::cout << dia::feedback_json(detected.incidents, findings).dump(2) << "\n";
  } else {
    std::cout << dia::feedback_text(detected.incidents, findings,
                                    with_prediction);
  }
  return dia::has_errors(ingested.diagnostics) ? kExitDiagnostics : kExitOk;
}

int run_trace(const std::string& in_path, const std::string& id) {
  auto text = read_file(in_path + ".trace");
  if (!text) return io_error("read", in_path + ".trace");
  dia::TraceParseResult parsed = dia::parse_trace(*text, in_path + ".trace");
  print_diagnostics(parsed.diagnostics, in_path + ".trace");
  if (dia::has_errors(parsed.diagnostics)) return kExitDiagnostics;

  // Walk the direct origins transitively; each line is one applied rule.
  std::vector<std::string> pending{id};
  std::vector<std::string> visited;
  bool any = false;
  while (!pending.empty()) {
    std::string current = pending.front();
    pending.erase(pending.begin());
    if (std::find(visited.begin(), visited.end(), current) != visited.end())
      continue;
    visited.push_back(current);
    for (const auto& step : dia::trace_origin(parsed.trace, current)) {
      any = true;
      std::cout << current << " <- " << step.rule << " <-";
      for (const auto& src : step.sources) std::cout << " " << src;
      std::cout << "\n";
      for (const auto& src : step.sources)
        if (src != current) pending.push_back(src);
    }
  }
  if (!any) std::cout << "no trace links target '" << id << "'\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "diatool - model-driven toolchain for data-intensive applications.\n"
      "Methodology order: check -> transform --to dtsm -> transform --to ddsm\n"
      "-> tosca -> analyze -> feedback."};
  app.require_subcommand(1);

  std::string in_path, out_path, target, catalog_path, deploy_path;
  std::string metrics_path, trace_id, report_format = "text";
  bool with_sim = false, with_prediction = false;
  std::uint64_t seed = 42;
  int reps = 10;
  std::int64_t horizon = 10000;

  auto* check = app.add_subcommand("check", "Parse and validate a .dia model");
  check->add_option("file", in_path, "model file")->required();

  auto* transform = app.add_subcommand(
      "transform", "Refine dpim -> dtsm (technologies) or dtsm -> ddsm (deployment)");
  transform->add_option("--to", target, "target level")
      ->required()
      ->check(CLI::IsMember({"dtsm", "ddsm"}));
  transform->add_option("file", in_path, "model file")->required();
  transform->add_option("--catalog", catalog_path,
                        "technology override file (<element>.technology = <name>)");
  transform->add_option("--deploy", deploy_path,
                        "deployment config file (<element>.<key> = <value>)");
  transform->add_option("-o,--output", out_path, "output model file")->required();

  auto* tosca = app.add_subcommand("tosca", "Emit TOSCA YAML from a ddsm model");
  tosca->add_option("file", in_path, "ddsm model file")->required();
  tosca->add_option("-o,--output", out_path, "output YAML file")->required();

  auto* analyze = app.add_subcommand(
      "analyze", "Predict performance and reliability from a dpim/dtsm model");
  analyze->add_option("file", in_path, "model file")->required();
  analyze->add_flag("--simulate", with_sim, "cross-check with discrete-event simulation");
  analyze->add_option("--seed", seed, "simulation master seed");
  analyze->add_option("--reps", reps, "simulation replications")
      ->check(CLI::Range(2, 1000000));
  analyze->add_option("--horizon", horizon, "completed jobs per replication")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
  analyze->add_option("--report", report_format, "report format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* feedback = app.add_subcommand(
      "feedback", "Detect quality incidents and anti-patterns from runtime metrics");
  feedback->add_option("file", in_path, "model file")->required();
  feedback->add_option("--metrics", metrics_path, "metrics CSV file")->required();
  feedback->add_flag("--with-prediction", with_prediction,
                     "compare observations against analytic predictions");
  feedback->add_option("--report", report_format, "report format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* trace = app.add_subcommand(
      "trace", "Show which rules produced an element (needs <file>.trace)");
  trace->add_option("file", in_path, "transformed model file")->required();
  trace->add_option("--id", trace_id, "element id to trace")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (check->parsed()) return run_check(in_path);
    if (transform->parsed())
      return run_transform(target, in_path, catalog_path, deploy_path, out_path);
    if (tosca->parsed()) return run_tosca(in_path, out_path);
    if (analyze->parsed())
      return run_analyze(in_path, with_sim, seed, reps, horizon, report_format);
    if (feedback->parsed())
      return run_feedback(in_path, metrics_path, with_prediction, report_format);
    if (trace->parsed()) return run_trace(in_path, trace_id);
  } catch (const std::exception& e) {
    std::cerr << "diatool: internal error: " << e.what() << "\n";
    return kExitDiagnostics;
  }
  return kExitUsage;
}
