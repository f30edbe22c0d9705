#pragma once

// Shared test scaffolding: fixture paths, scratch files, subprocess capture,
// and deterministic random-model generators for the property tests. Kept
// framework-free so both the Catch2 suite and the acceptance binary use it.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dia/dia.hpp"

#ifndef DIA_SAMPLES_DIR
#error "DIA_SAMPLES_DIR must be defined by the build"
#endif
#ifndef DIA_CLI_BIN
#error "DIA_CLI_BIN must be defined by the build"
#endif

namespace testutil {

inline std::string samples_dir() { return DIA_SAMPLES_DIR; }
inline std::string sample(const std::string& rel) { return samples_dir() + "/" + rel; }
inline std::string cli_bin() { return DIA_CLI_BIN; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + path);
}

// One scratch directory per test process, removed by the OS tmp cleaner.
inline const std::string& scratch_dir() {
  static const std::string dir = [] {
    char tmpl[] = "/tmp/diatest.XXXXXX";
    if (!mkdtemp(tmpl)) throw std::runtime_error("mkdtemp failed");
    return std::string(tmpl);
  }();
  return dir;
}

inline std::string scratch_path(const std::string& name) {
  return scratch_dir() + "/" + name;
}

// ---------------------------------------------------------------------------
// Subprocess capture
// ---------------------------------------------------------------------------

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the built diatool with a raw argument string; callers quote paths
// themselves when they contain spaces (scratch paths never do).
inline CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const int n = ++counter;
  std::string out_path = scratch_path("cli_out_" + std::to_string(n));
  std::string err_path = scratch_path("cli_err_" + std::to_string(n));
  std::string cmd = "'" + cli_bin() + "' " + args + " >" + out_path + " 2>" + err_path;
  int rc = std::system(cmd.c_str());
  CliResult res;
  if (rc != -1 && WIFEXITED(rc)) res.exit_code = WEXITSTATUS(rc);
  res.out = read_file(out_path);
  res.err = read_file(err_path);
  return res;
}

// ---------------------------------------------------------------------------
// Random model generation
// ---------------------------------------------------------------------------

// Thin deterministic RNG wrapper over the library's own stream so the
// generators stay reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() { return s_.next(); }
  std::uint64_t below(std::uint64_t n) { return n ? s_.next() % n : 0; }
  double uniform() { return s_.uniform(); }
  bool chance(double p) { return uniform() < p; }

 private:
  dia::SplitMix64 s_;
};

// Arbitrary structurally well-formed model: unique identifier ids, no
// self-loops, units from the grammar, strings without newlines. Exercises
// every value type and level; conformance to the profile is NOT guaranteed
// (parse/format round-trips do not consult the profile).
inline dia::Model random_model(std::uint64_t seed) {
  Rng rng(seed);
  dia::Model m;

  static const std::string name_chars = "abcXYZ 09_\"\\-";
  std::size_t name_len = 1 + rng.below(10);
  for (std::size_t i = 0; i < name_len; ++i)
    m.name += name_chars[rng.below(name_chars.size())];

  m.level = static_cast<dia::Level>(rng.below(3));

  static const dia::Kind kinds[] = {
      dia::Kind::SourceNode, dia::Kind::ComputeNode,     dia::Kind::StorageNode,
      dia::Kind::Host,       dia::Kind::PlatformService, dia::Kind::DeployedComponent,
  };
  static const dia::Unit units[] = {dia::Unit::None, dia::Unit::PerSecond,
                                    dia::Unit::Milliseconds, dia::Unit::Kilobytes,
                                    dia::Unit::Gigabytes};

  std::size_t n_elements = 1 + rng.below(12);
  for (std::size_t i = 0; i < n_elements; ++i) {
    dia::Element e;
    e.kind = kinds[rng.below(6)];
    e.id = "el" + std::to_string(i);
    if (rng.chance(0.3)) e.id += "_x";
    e.name = e.id;  // the concrete syntax writes a single identifier
    if (rng.chance(0.4)) e.technology = "tech" + std::to_string(rng.below(4));

    std::size_t n_anns = rng.below(3);
    for (std::size_t a = 0; a < n_anns; ++a) {
      dia::StereotypeApplication ann;
      ann.stereotype = "St" + std::to_string(rng.below(5));
      std::size_t n_tags = rng.below(4);
      for (std::size_t t = 0; t < n_tags; ++t) {
        dia::TagAssignment tag;
        tag.name = "tag" + std::to_string(t);
        switch (rng.below(4)) {
          case 0:
            tag.value = dia::TaggedValue::real(rng.uniform() * 1000.0,
                                               units[rng.below(5)]);
            break;
          case 1:
            tag.value = dia::TaggedValue::integer(
                static_cast<std::int64_t>(rng.below(100000)));
            break;
          case 2: {
            std::string s;
            std::size_t len = rng.below(8);
            for (std::size_t c = 0; c < len; ++c)
              s += name_chars[rng.below(name_chars.size())];
            tag.value = dia::TaggedValue::str(s);
            break;
          }
          default:
            tag.value = dia::TaggedValue::boolean(rng.chance(0.5));
        }
        ann.tags.push_back(std::move(tag));
      }
      e.annotations.push_back(std::move(ann));
    }
    m.elements.push_back(std::move(e));
  }

  std::size_t n_flows = rng.below(2 * n_elements);
  for (std::size_t i = 0; i < n_flows && n_elements >= 2; ++i) {
    dia::Flow f;
    std::size_t from = rng.below(n_elements);
    std::size_t to = rng.below(n_elements);
    if (from == to) to = (to + 1) % n_elements;
    f.from = m.elements[from].id;
    f.to = m.elements[to].id;
    // Half the flows keep the implicit probability 1; the rest draw from
    // (0, 1] so the `prob` clause round-trips.
    if (rng.chance(0.5)) f.probability = 1.0 - rng.uniform() * 0.999;
    m.flows.push_back(std::move(f));
  }
  return m;
}

// Profile-conformant DPIM pipeline: sources feed a chain of computes ending
// in optional storages, with substochastic routing. check_text(format(m))
// yields no diagnostics, so these drive the full pipeline in properties.
inline dia::Model random_valid_dpim(std::uint64_t seed) {
  Rng rng(seed);
  dia::Model m;
  m.name = "gen" + std::to_string(seed);
  m.level = dia::Level::Dpim;

  std::size_t n_sources = 1 + rng.below(3);
  std::size_t n_computes = 1 + rng.below(4);
  std::size_t n_storages = rng.below(3);

  auto real_tag = [](const char* name, double v, dia::Unit u) {
    return dia::TagAssignment{name, dia::TaggedValue::real(v, u), {}};
  };

  std::vector<std::string> compute_ids, storage_ids;
  for (std::size_t i = 0; i < n_sources; ++i) {
    dia::Element e;
    e.kind = dia::Kind::SourceNode;
    e.id = e.name = "Src" + std::to_string(i);
    dia::StereotypeApplication ds;
    ds.stereotype = "DataSource";
    ds.tags.push_back(real_tag("rate", 1.0 + rng.uniform() * 50.0, dia::Unit::PerSecond));
    e.annotations.push_back(std::move(ds));
    if (rng.chance(0.3)) {
      dia::StereotypeApplication qod;
      qod.stereotype = "Data";
      qod.tags.push_back(real_tag("avgMessageSizeKb", 0.5 + rng.uniform() * 64.0,
                                  dia::Unit::Kilobytes));
      e.annotations.push_back(std::move(qod));
    }
    m.elements.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < n_computes; ++i) {
    dia::Element e;
    e.kind = dia::Kind::ComputeNode;
    e.id = e.name = "Job" + std::to_string(i);
    dia::StereotypeApplication c;
    c.stereotype = "Compute";
    c.tags.push_back(real_tag("serviceDemandMs", 0.5 + rng.uniform() * 20.0,
                              dia::Unit::Milliseconds));
    if (rng.chance(0.5))
      c.tags.push_back({"servers",
                        dia::TaggedValue::integer(1 + static_cast<std::int64_t>(rng.below(4))),
                        {}});
    if (rng.chance(0.3))
      c.tags.push_back({"processing",
                        dia::TaggedValue::str(rng.chance(0.5) ? "stream" : "batch"),
                        {}});
    e.annotations.push_back(std::move(c));
    if (rng.chance(0.3)) {
      dia::StereotypeApplication sla;
      sla.stereotype = "SLA";
      sla.tags.push_back(real_tag("responseTimeMaxMs", 10.0 + rng.uniform() * 500.0,
                                  dia::Unit::Milliseconds));
      e.annotations.push_back(std::move(sla));
    }
    compute_ids.push_back(e.id);
    m.elements.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < n_storages; ++i) {
    dia::Element e;
    e.kind = dia::Kind::StorageNode;
    e.id = e.name = "Db" + std::to_string(i);
    if (rng.chance(0.7)) {
      dia::StereotypeApplication s;
      s.stereotype = "Storage";
      s.tags.push_back(real_tag("availability", 0.9 + rng.uniform() * 0.0999, dia::Unit::None));
      if (rng.chance(0.5))
        s.tags.push_back(real_tag("serviceDemandMs", 0.5 + rng.uniform() * 8.0,
                                  dia::Unit::Milliseconds));
      e.annotations.push_back(std::move(s));
    }
    storage_ids.push_back(e.id);
    m.elements.push_back(std::move(e));
  }

  // Sources feed the first compute; computes chain forward and may tap a
  // storage with leftover probability, keeping every row substochastic.
  for (std::size_t i = 0; i < n_sources; ++i)
    m.flows.push_back({"Src" + std::to_string(i), compute_ids[0], 1.0, {}});
  for (std::size_t i = 0; i < n_computes; ++i) {
    double budget = 1.0;
    if (i + 1 < n_computes) {
      double p = rng.chance(0.5) ? 1.0 : 0.4 + rng.uniform() * 0.5;
      m.flows.push_back({compute_ids[i], compute_ids[i + 1], p, {}});
      budget -= p;
    }
    if (!storage_ids.empty() && budget > 0.05) {
      double p = budget * (0.3 + rng.uniform() * 0.6);
      m.flows.push_back(
          {compute_ids[i], storage_ids[rng.below(storage_ids.size())], p, {}});
    }
  }
  return m;
}

// Random substochastic open network for traffic-equation properties.
inline dia::QueueingNetwork random_network(std::uint64_t seed) {
  Rng rng(seed);
  dia::QueueingNetwork qn;
  std::size_t n = 1 + rng.below(10);
  for (std::size_t i = 0; i < n; ++i)
    qn.stations.push_back({"s" + std::to_string(i), 1.0 + rng.uniform() * 10.0,
                           static_cast<std::int64_t>(1 + rng.below(4))});
  qn.external_arrivals.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (rng.chance(0.6)) qn.external_arrivals[i] = rng.uniform() * 5.0;
  if (qn.external_arrivals[0] == 0.0) qn.external_arrivals[0] = 1.0;
  qn.routing.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    // Row mass strictly below 1 guarantees an open (nonsingular) system.
    double mass = rng.uniform() * 0.9;
    std::size_t targets = 1 + rng.below(3);
    for (std::size_t t = 0; t < targets; ++t)
      qn.routing[i][rng.below(n)] += mass / static_cast<double>(targets);
  }
  return qn;
}

// ---------------------------------------------------------------------------
// Small conveniences
// ---------------------------------------------------------------------------

inline std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = hay.find(needle); p != std::string::npos;
       p = hay.find(needle, p + needle.size()))
    ++n;
  return n;
}

inline bool has_code(const std::vector<dia::Diagnostic>& diags, std::string_view code) {
  for (const auto& d : diags)
    if (d.code == code) return true;
  return false;
}

inline std::size_t count_code(const std::vector<dia::Diagnostic>& diags,
                              std::string_view code) {
  std::size_t n = 0;
  for (const auto& d : diags)
    if (d.code == code) ++n;
  return n;
}

inline dia::Model parse_or_throw(const std::string& text) {
  dia::ParseResult res = dia::parse(text);
  if (!res.model) throw std::runtime_error("parse failed: " + text);
  return *res.model;
}

}  // namespace testutil
