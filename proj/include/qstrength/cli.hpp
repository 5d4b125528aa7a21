// Copyright 2026 The qstrength Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The `qstrength` command line: strength, props, lowerbound, synth, fern.
//
// Exit codes:
//   0  success
//   1  props: a locality or constructive-chaining check failed
//   2  bad flags or malformed input
//   3  input matrix is not unitary
//   4  CNOT strength degenerated (lowerbound)
//   5  gate is not entangling (synth)
//   6  output path not writable
//
// Environment: QSTRENGTH_SEED and QSTRENGTH_RESTARTS replace the default
// seed and restart count; explicit flags take precedence.

#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qstrength/fern.hpp"
#include "qstrength/local_opt.hpp"
#include "qstrength/matrix_io.hpp"
#include "qstrength/records.hpp"
#include "qstrength/strength.hpp"
#include "qstrength/synth.hpp"
#include "qstrength/unitary.hpp"

namespace qstrength::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kNotUnitary = 3,
  kDegenerate = 4,
  kNotEntangling = 5,
  kUnwritable = 6,
};

inline constexpr const char* kSeedEnv = "QSTRENGTH_SEED";
inline constexpr const char* kRestartsEnv = "QSTRENGTH_RESTARTS";

enum class OutputFormat { Human, Records };

/// Everything a subcommand needs; identical configs give identical output.
struct RunConfig {
  std::string subcommand;
  std::string gate;
  std::string matrix_path;
  std::string metric = "frobenius";
  OptimizerOptions opts;
  std::uint64_t seed = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::Records;

  // strength
  std::string witness_path;
  // props
  int qubits = 2;
  int locality_samples = 100;
  int chaining_samples = 100;
  int stability_samples = 50;
  // synth
  int max_uses = 3;
  std::string plan_path;
  // fern
  long points = 100000;
  long burn_in = 20;
  std::string raster = "200x200";
  std::string csv_path;
  std::string image_path = "fern.pgm";
};

class UnwritablePath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::optional<std::uint64_t> env_u64(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != std::string(v).size()) return std::nullopt;
    return x;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline UnitaryOperator load_target(const RunConfig& cfg) {
  if (!cfg.gate.empty()) return named_gate(cfg.gate);
  std::ifstream in(cfg.matrix_path);
  if (!in) throw ParseError("cannot read matrix file '" + cfg.matrix_path + "'");
  return read_unitary(in);
}

inline std::string target_label(const RunConfig& cfg) {
  return cfg.gate.empty() ? cfg.matrix_path : cfg.gate;
}

inline std::vector<MetricKind> metrics_for(const std::string& sel) {
  if (sel == "all") {
    return {MetricKind::frobenius(false), MetricKind::frobenius(true),
            MetricKind::operator_norm()};
  }
  const auto m = parse_metric(sel);
  if (!m) throw std::invalid_argument("unknown metric '" + sel + "'");
  return {*m};
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UnwritablePath("cannot write '" + path + "'");
  return f;
}

inline std::vector<double> flatten(const LocalUnitaryProduct& l) {
  std::vector<double> out;
  for (const auto& f : l.factors()) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        out.push_back(f(r, c).real());
        out.push_back(f(r, c).imag());
      }
    }
  }
  return out;
}

inline Record report_record(const PropertyReport& rep, int qubits) {
  Record r("property");
  r.add("property", to_string(rep.property))
      .add("metric", to_string(rep.metric))
      .add("qubits", qubits)
      .add("instances_tested", rep.instances_tested)
      .add("max_violation", rep.max_violation)
      .add("tolerance", rep.tolerance)
      .add("holds", rep.holds);
  if (rep.secondary) {
    Record s("_");
    s.add("name", rep.secondary->name)
        .add("max_violation", rep.secondary->max_violation)
        .add("tolerance", rep.secondary->tolerance)
        .add("holds", rep.secondary->holds);
    r.add("secondary", s);
  } else {
    r.add_null("secondary");
  }
  r.add("per_instance", std::span<const double>(rep.per_instance));
  return r;
}

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : format_(cfg.format), out_(&out) {
    if (!cfg.output_path.empty()) {
      file_ = std::make_unique<std::ofstream>(open_for_write(cfg.output_path));
      out_ = file_.get();
    }
  }
  bool records() const { return format_ == OutputFormat::Records; }
  void record(const Record& r) {
    if (records()) *out_ << r;
  }
  std::ostream& human() { return *out_; }

 private:
  OutputFormat format_;
  std::ostream* out_;
  std::unique_ptr<std::ofstream> file_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_strength(const RunConfig& cfg, std::ostream& out) {
  const UnitaryOperator u = detail::load_target(cfg);
  detail::Emitter em(cfg, out);
  std::optional<std::ofstream> witness;
  if (!cfg.witness_path.empty()) witness = detail::open_for_write(cfg.witness_path);
  for (const MetricKind& m : detail::metrics_for(cfg.metric)) {
    const StrengthResult s = strength(m, u, cfg.opts);
    if (witness) {
      write_matrix(*witness, expand(s.argmin),
                   "nearest local product for " + detail::target_label(cfg) +
                       " under " + to_string(m));
    }
    Record r("strength");
    r.add("target", detail::target_label(cfg))
        .add("qubits", u.num_qubits())
        .add("metric", to_string(m))
        .add("value", s.value)
        .add("restarts_used", s.restarts_used)
        .add("best_restart", s.best_restart)
        .add("converged", s.converged)
        .add("per_restart_values", std::span<const double>(s.per_restart_values))
        .add("witness_factors", std::span<const double>(detail::flatten(s.argmin)));
    if (cfg.witness_path.empty()) {
      r.add_null("witness_path");
    } else {
      r.add("witness_path", cfg.witness_path);
    }
    em.record(r);
    if (!em.records()) {
      em.human() << "K_" << to_string(m) << "(" << detail::target_label(cfg)
                 << ") <= " << format_double(s.value) << "  (best of "
                 << s.restarts_used << " starts, restart " << s.best_restart
                 << (s.converged ? ", converged" : ", not converged") << ")\n";
    }
  }
  return kOk;
}

inline int cmd_props(const RunConfig& cfg, std::ostream& out) {
  detail::Emitter em(cfg, out);
  bool gate_ok = true;
  for (const MetricKind& m : detail::metrics_for(cfg.metric)) {
    const auto loc = check_locality(m, cfg.locality_samples, derive_seed(cfg.seed, 1),
                                    cfg.qubits, cfg.opts);
    const auto chain = check_chaining(m, cfg.chaining_samples, derive_seed(cfg.seed, 2),
                                      cfg.opts, cfg.qubits);
    const auto stab = check_stability(m, cfg.stability_samples, derive_seed(cfg.seed, 3),
                                      cfg.opts, cfg.qubits);
    const auto cnot = stability_instance(m, embedded_cnot(std::max(2, cfg.qubits)), cfg.opts);
    gate_ok = gate_ok && loc.holds && chain.holds;
    for (const auto* rep : {&loc, &chain, &stab}) {
      em.record(detail::report_record(*rep, cfg.qubits));
      if (!em.records()) {
        em.human() << to_string(rep->property) << " [" << to_string(m) << "]: "
                   << (rep->holds ? "holds" : "fails") << ", max violation "
                   << format_double(rep->max_violation) << " over "
                   << rep->instances_tested << " instances (tol "
                   << format_double(rep->tolerance) << ")";
        if (rep->secondary) {
          em.human() << "; " << rep->secondary->name << " check "
                     << (rep->secondary->holds ? "holds" : "fails") << " ("
                     << format_double(rep->secondary->max_violation) << ")";
        }
        em.human() << '\n';
      }
    }
    Record r("stability_cnot");
    r.add("metric", to_string(m))
        .add("qubits", std::max(2, cfg.qubits))
        .add("k_u", cnot.k_u)
        .add("k_u_id", cnot.k_u_id)
        .add("gap", cnot.gap());
    em.record(r);
    if (!em.records()) {
      em.human() << "stability gap for CNOT [" << to_string(m)
                 << "]: " << format_double(cnot.gap()) << '\n';
    }
  }
  return gate_ok ? kOk : kCheckFailed;
}

inline int cmd_lowerbound(const RunConfig& cfg, std::ostream& out) {
  const UnitaryOperator u = detail::load_target(cfg);
  detail::Emitter em(cfg, out);
  for (const MetricKind& m : detail::metrics_for(cfg.metric)) {
    const LowerBoundReport rep = cnot_lower_bound(m, u, cfg.opts);
    Record r("lowerbound");
    r.add("target", detail::target_label(cfg))
        .add("metric", to_string(m))
        .add("qubits", rep.num_qubits)
        .add("target_strength", rep.target_strength)
        .add("cnot_strength", rep.cnot_strength)
        .add("heuristic_min_cnots", rep.heuristic_min_cnots)
        .add("rigor", rep.rigor_flag);
    em.record(r);
    if (!em.records()) {
      em.human() << "CNOT count for " << detail::target_label(cfg) << " ["
                 << to_string(m) << "]: >= " << rep.heuristic_min_cnots << " ("
                 << rep.rigor_flag << ": K=" << format_double(rep.target_strength)
                 << ", K(CNOT)=" << format_double(rep.cnot_strength) << ")\n";
    }
  }
  return kOk;
}

inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const UnitaryOperator u = detail::load_target(cfg);
  const SynthesisPlan plan = synthesize_cnot(u, cfg.max_uses, cfg.opts);
  detail::Emitter em(cfg, out);
  if (!cfg.plan_path.empty()) {
    auto f = detail::open_for_write(cfg.plan_path);
    f << "# CNOT from " << plan.uses << " uses of " << detail::target_label(cfg)
      << ": L_" << plan.uses << " U ... U L_0\n";
    for (std::size_t i = 0; i < plan.layers.size(); ++i) {
      write_matrix(f, expand(plan.layers[i]), "layer " + std::to_string(i));
    }
  }
  std::vector<Record> attempts;
  for (const auto& a : plan.attempts) {
    Record r("_");
    r.add("uses", a.uses).add("best_distance", a.best_distance);
    attempts.push_back(r);
  }
  std::vector<double> layers;
  for (const auto& l : plan.layers) {
    const auto f = detail::flatten(l);
    layers.insert(layers.end(), f.begin(), f.end());
  }
  Record r("synth");
  r.add("target", detail::target_label(cfg))
      .add("uses", plan.uses)
      .add("success", plan.success)
      .add("achieved_distance", plan.achieved_distance)
      .add("tolerance", kSynthesisTol)
      .add("max_uses", cfg.max_uses)
      .add("attempts", attempts)
      .add("layer_factors", std::span<const double>(layers));
  if (cfg.plan_path.empty()) {
    r.add_null("plan_path");
  } else {
    r.add("plan_path", cfg.plan_path);
  }
  em.record(r);
  if (!em.records()) {
    em.human() << (plan.success ? "CNOT synthesized" : "no CNOT found") << " with "
               << plan.uses << " use(s) of " << detail::target_label(cfg)
               << ", distance " << format_double(plan.achieved_distance) << '\n';
  }
  return kOk;
}

inline int cmd_fern(const RunConfig& cfg, std::ostream& out) {
  int w = 0, h = 0;
  {
    char x = 0;
    std::istringstream is(cfg.raster);
    std::string rest;
    if (!(is >> w >> x >> h) || x != 'x' || (is >> rest) || w < 1 || h < 1) {
      throw std::invalid_argument("--raster expects WxH, got '" + cfg.raster + "'");
    }
  }
  if (cfg.burn_in < 0 || cfg.points <= cfg.burn_in) {
    throw std::invalid_argument("--points must exceed --burn-in");
  }
  detail::Emitter em(cfg, out);
  const auto cloud = fern::chaos_game(fern::barnsley_fern_system(), {0.0, 0.0},
                                      cfg.points, cfg.burn_in, cfg.seed);
  const auto raster = fern::rasterize(cloud, w, h, fern::kFernEnvelope);
  if (!cfg.csv_path.empty()) {
    auto f = detail::open_for_write(cfg.csv_path);
    char buf[64];
    for (const auto& p : cloud.points) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", p.x, p.y);
      f << buf;
    }
  }
  if (!cfg.image_path.empty()) {
    auto f = detail::open_for_write(cfg.image_path);
    f << "P2\n" << w << ' ' << h << "\n255\n";
    for (int row = 0; row < h; ++row) {
      for (int col = 0; col < w; ++col) {
        if (col) f << ' ';
        f << static_cast<int>(raster.at(row, col));
      }
      f << '\n';
    }
  }
  Record r("fern");
  r.add("seed", cfg.seed)
      .add("iterations", cfg.points)
      .add("burn_in", cfg.burn_in)
      .add("points", static_cast<long>(cloud.points.size()))
      .add("width", w)
      .add("height", h)
      .add("nonzero_fraction", raster.nonzero_fraction());
  if (cfg.csv_path.empty()) r.add_null("csv_path"); else r.add("csv_path", cfg.csv_path);
  if (cfg.image_path.empty()) r.add_null("image_path"); else r.add("image_path", cfg.image_path);
  em.record(r);
  if (!em.records()) {
    em.human() << cloud.points.size() << " fern points, raster " << w << 'x' << h
               << " with " << format_double(raster.nonzero_fraction())
               << " of pixels lit\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  RunConfig cfg;
  if (auto s = detail::env_u64(kSeedEnv)) cfg.seed = *s;
  if (auto r = detail::env_u64(kRestartsEnv)) cfg.opts.restarts = static_cast<int>(*r);
  int threads = 1;
  std::string format = "records";

  CLI::App app{"Strength of quantum gates: distance to the nearest local unitary"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool needs_target) {
    if (needs_target) {
      auto* g = sub->add_option("--gate", cfg.gate,
                                "named gate: cnot cz swap sqrt_swap h x y z id1 id2 id3");
      auto* m = sub->add_option("--matrix", cfg.matrix_path, "matrix text file");
      g->excludes(m);
      m->excludes(g);
    }
    sub->add_option("--restarts", cfg.opts.restarts, "optimizer restarts")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-sweeps", cfg.opts.max_sweeps, "sweeps per restart")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.opts.convergence_tol, "sweep-to-sweep convergence")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", format, "human or records")
        ->check(CLI::IsMember({"human", "records"}));
    sub->add_option("--output", cfg.output_path, "write output here instead of stdout");
  };

  auto* s_strength = app.add_subcommand("strength", "nearest-local distance K_D(U)");
  add_common(s_strength, true);
  s_strength->add_option("--metric", cfg.metric, "frobenius, frobenius-norm, opnorm, all")
      ->check(CLI::IsMember({"frobenius", "frobenius-norm", "opnorm", "all"}));
  s_strength->add_option("--witness", cfg.witness_path, "write the nearest local product");

  auto* s_props = app.add_subcommand("props", "locality, chaining and stability checks");
  add_common(s_props, false);
  std::string props_metric = "all";
  s_props->add_option("--metric", props_metric, "frobenius, frobenius-norm, opnorm, all")
      ->check(CLI::IsMember({"frobenius", "frobenius-norm", "opnorm", "all"}));
  s_props->add_option("--qubits", cfg.qubits, "qubits per sampled unitary")
      ->check(CLI::Range(2, 5));
  std::optional<int> samples;
  s_props->add_option("--samples", samples, "sample count for every check")
      ->check(CLI::PositiveNumber);
  s_props->add_option("--locality-samples", cfg.locality_samples)->check(CLI::PositiveNumber);
  s_props->add_option("--chaining-samples", cfg.chaining_samples)->check(CLI::PositiveNumber);
  s_props->add_option("--stability-samples", cfg.stability_samples)
      ->check(CLI::PositiveNumber);

  auto* s_lb = app.add_subcommand("lowerbound", "CNOT-count estimate K(U)/K(CNOT)");
  add_common(s_lb, true);
  s_lb->add_option("--metric", cfg.metric, "frobenius, frobenius-norm, opnorm, all")
      ->check(CLI::IsMember({"frobenius", "frobenius-norm", "opnorm", "all"}));

  auto* s_synth = app.add_subcommand("synth", "CNOT from an entangling two-qubit gate");
  add_common(s_synth, true);
  s_synth->add_option("--max-uses", cfg.max_uses, "largest use count to try")
      ->check(CLI::PositiveNumber);
  s_synth->add_option("--plan", cfg.plan_path, "write the layer matrices");

  auto* s_fern = app.add_subcommand("fern", "chaos-game fern");
  s_fern->add_option("--points", cfg.points, "iterations including burn-in");
  s_fern->add_option("--seed", cfg.seed, "seed");
  s_fern->add_option("--burn-in", cfg.burn_in, "leading iterations to discard");
  s_fern->add_option("--raster", cfg.raster, "raster size WxH");
  s_fern->add_option("--csv", cfg.csv_path, "write points as x,y lines");
  s_fern->add_option("--image", cfg.image_path, "write a plain PGM raster ('' to skip)");
  s_fern->add_option("--format", format, "human or records")
      ->check(CLI::IsMember({"human", "records"}));
  s_fern->add_option("--output", cfg.output_path, "write output here instead of stdout");

  std::vector<const char*> argv{"qstrength"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  auto* sub = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  cfg.format = format == "human" ? OutputFormat::Human : OutputFormat::Records;
  cfg.opts.threads = threads == 0
                         ? std::max(1, static_cast<int>(std::thread::hardware_concurrency()))
                         : threads;
  cfg.opts.master_seed = cfg.seed;
  if (cfg.subcommand == "synth" && s_synth->count("--restarts") == 0 &&
      !detail::env_u64(kRestartsEnv)) {
    cfg.opts.restarts = kSynthesisRestarts;
  }
  if (cfg.subcommand == "props") {
    cfg.metric = props_metric;
    if (samples) {
      cfg.locality_samples = cfg.chaining_samples = cfg.stability_samples = *samples;
    }
  }
  const bool needs_target = cfg.subcommand == "strength" ||
                            cfg.subcommand == "lowerbound" || cfg.subcommand == "synth";
  if (needs_target && cfg.gate.empty() && cfg.matrix_path.empty()) {
    err << "error: one of --gate or --matrix is required\n";
    return kBadInput;
  }

  try {
    if (cfg.subcommand == "strength") return cmd_strength(cfg, out);
    if (cfg.subcommand == "props") return cmd_props(cfg, out);
    if (cfg.subcommand == "lowerbound") return cmd_lowerbound(cfg, out);
    if (cfg.subcommand == "synth") return cmd_synth(cfg, out);
    return cmd_fern(cfg, out);
  } catch (const NotUnitary& e) {
    err << "error: " << e.what() << "; max deviation " << format_double(e.deviation())
        << '\n';
    return kNotUnitary;
  } catch (const DegenerateStrength& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const NotEntangling& e) {
    err << "error: " << e.what() << '\n';
    return kNotEntangling;
  } catch (const UnwritablePath& e) {
    err << "error: " << e.what() << '\n';
    return kUnwritable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
}

}  // namespace qstrength::cli
