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

// Metric-induced strength K_D(U) = min over local products L of D(U, L),
// the chaining / stability / locality harnesses, and the CNOT-count
// estimate M >= K(U) / K(CNOT).
//
// All strengths here are computed upper bounds (written K^ in comments).
// The constructive checks are exact statements about feasible points; the
// engine-level checks compare two upper bounds and are evidence only.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qstrength/local.hpp"
#include "qstrength/local_opt.hpp"
#include "qstrength/random.hpp"
#include "qstrength/unitary.hpp"

namespace qstrength {

struct StrengthResult {
  MetricKind metric;
  double value = 0.0;
  LocalUnitaryProduct argmin;
  int restarts_used = 0;
  bool converged = false;  // of the winning restart
  int best_restart = 0;
  std::vector<double> per_restart_values;
};

inline StrengthResult strength(const MetricKind& metric,
                               const UnitaryOperator& u,
                               const OptimizerOptions& opts) {
  DistanceResult d = minimize_distance(metric, u, opts);
  StrengthResult r{metric, d.value, std::move(d.argmin), 0, false, d.best_restart,
                   std::move(d.per_restart_values)};
  r.restarts_used = static_cast<int>(r.per_restart_values.size());
  r.converged = d.traces.at(static_cast<std::size_t>(d.best_restart)).converged;
  return r;
}

/// CNOT on qubits (0, 1) tensored with identities up to `num_qubits`.
inline UnitaryOperator embedded_cnot(int num_qubits) {
  if (num_qubits < 2) throw DimensionMismatch("CNOT needs at least 2 qubits");
  UnitaryOperator u = standard_gate(Gate::CNOT);
  for (int q = 2; q < num_qubits; ++q) u = tensor(u, UnitaryOperator::identity(1));
  return u;
}

// ---------------------------------------------------------------------------
// Property harness

enum class Property { Chaining, Stability, Locality };

inline std::string to_string(Property p) {
  switch (p) {
    case Property::Chaining: return "chaining";
    case Property::Stability: return "stability";
    case Property::Locality: return "locality";
  }
  return "?";
}

struct SecondaryCheck {
  std::string name;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool holds = true;
};

struct PropertyReport {
  Property property = Property::Locality;
  MetricKind metric;
  int instances_tested = 0;
  /// Largest violation over instances; for stability, the largest |gap|.
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool holds = true;
  /// Signed per-instance quantity behind max_violation.
  std::vector<double> per_instance;
  std::optional<SecondaryCheck> secondary;
};

namespace detail {

inline double max_of(const std::vector<double>& v, double floor_value) {
  double m = floor_value;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace detail

inline constexpr double kLocalityTol = 1e-8;
inline constexpr double kChainingTol = 1e-9;
inline constexpr double kChainingEngineTol = 1e-6;
inline constexpr double kStabilityGapTol = 1e-4;
inline constexpr double kStabilityOneSidedTol = 1e-6;

/// Strength of `samples` Haar-random local products; each must be <= 1e-8.
inline PropertyReport check_locality(const MetricKind& metric, int samples,
                                     std::uint64_t seed, int num_qubits = 2,
                                     const OptimizerOptions& opts = {}) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  PropertyReport rep;
  rep.property = Property::Locality;
  rep.metric = metric;
  rep.tolerance = kLocalityTol;
  for (int i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto l = LocalUnitaryProduct::haar_random(num_qubits, rng);
    rep.per_instance.push_back(strength(metric, expand(l), opts).value);
  }
  rep.instances_tested = samples;
  rep.max_violation = detail::max_of(rep.per_instance, 0.0);
  rep.holds = rep.max_violation <= rep.tolerance;
  return rep;
}

struct ChainingInstance {
  double k_u = 0.0;
  double k_v = 0.0;
  /// D(UV, L_U L_V) for the factorwise product of the two witnesses.
  double witness_distance = 0.0;
  /// K^(UV), with L_U L_V injected as a warm start.
  double k_uv = 0.0;

  double constructive_violation() const { return witness_distance - (k_u + k_v); }
  double engine_violation() const { return k_uv - (k_u + k_v); }
};

inline ChainingInstance chaining_instance(const MetricKind& metric,
                                          const UnitaryOperator& u,
                                          const UnitaryOperator& v,
                                          const OptimizerOptions& opts) {
  const StrengthResult su = strength(metric, u, opts);
  const StrengthResult sv = strength(metric, v, opts);
  const UnitaryOperator uv = compose(u, v);
  const LocalUnitaryProduct joint = factorwise_product(su.argmin, sv.argmin);
  OptimizerOptions with_joint = opts;
  with_joint.warm_starts.push_back(joint);
  ChainingInstance c;
  c.k_u = su.value;
  c.k_v = sv.value;
  c.witness_distance = distance(metric, uv, expand(joint));
  c.k_uv = strength(metric, uv, with_joint).value;
  return c;
}

/// Chaining K(UV) <= K(U) + K(V) on Haar pairs. The gated check is the
/// constructive one: D(UV, L_U L_V) <= D(U, L_U) + D(V, L_V) holds for any
/// bi-unitarily invariant metric, so a violation means a broken witness.
inline PropertyReport check_chaining(const MetricKind& metric, int samples,
                                     std::uint64_t seed,
                                     const OptimizerOptions& opts,
                                     int num_qubits = 2) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  PropertyReport rep;
  rep.property = Property::Chaining;
  rep.metric = metric;
  rep.tolerance = kChainingTol;
  std::vector<double> engine;
  for (int i = 0; i < samples; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    const auto u = haar_random_unitary(num_qubits, derive_seed(seed, 2 * k));
    const auto v = haar_random_unitary(num_qubits, derive_seed(seed, 2 * k + 1));
    const ChainingInstance c = chaining_instance(metric, u, v, opts);
    rep.per_instance.push_back(c.constructive_violation());
    engine.push_back(c.engine_violation());
  }
  rep.instances_tested = samples;
  rep.max_violation = detail::max_of(rep.per_instance, 0.0);
  rep.holds = rep.max_violation <= rep.tolerance;
  const double engine_max = detail::max_of(engine, 0.0);
  rep.secondary = SecondaryCheck{"engine", engine_max, kChainingEngineTol,
                                 engine_max <= kChainingEngineTol};
  return rep;
}

struct StabilityInstance {
  double k_u = 0.0;
  /// K^(U (x) I), with argmin(U) (x) I injected as a warm start.
  double k_u_id = 0.0;

  double gap() const { return k_u - k_u_id; }
  double one_sided_violation() const { return k_u_id - k_u; }
};

inline StabilityInstance stability_instance(const MetricKind& metric,
                                            const UnitaryOperator& u,
                                            const OptimizerOptions& opts) {
  const StrengthResult su = strength(metric, u, opts);
  OptimizerOptions with_witness = opts;
  with_witness.warm_starts.push_back(su.argmin.appended(Factor::Identity()));
  const UnitaryOperator u_id = tensor(u, UnitaryOperator::identity(1));
  return {su.value, strength(metric, u_id, with_witness).value};
}

/// Stability K(U (x) I) = K(U), measured rather than assumed. `holds` is
/// |gap| <= 1e-4 on every sample; the secondary check is the one-sided
/// K^(U (x) I) <= K^(U) + 1e-6. Unnormalized Frobenius distances scale by
/// sqrt(2) under the embedding, so that metric is expected to fail both.
inline PropertyReport check_stability(const MetricKind& metric, int samples,
                                      std::uint64_t seed,
                                      const OptimizerOptions& opts,
                                      int num_qubits = 2) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  PropertyReport rep;
  rep.property = Property::Stability;
  rep.metric = metric;
  rep.tolerance = kStabilityGapTol;
  std::vector<double> one_sided;
  double max_abs_gap = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto u =
        haar_random_unitary(num_qubits, derive_seed(seed, static_cast<std::uint64_t>(i)));
    const StabilityInstance s = stability_instance(metric, u, opts);
    rep.per_instance.push_back(s.gap());
    max_abs_gap = std::max(max_abs_gap, std::abs(s.gap()));
    one_sided.push_back(s.one_sided_violation());
  }
  rep.instances_tested = samples;
  rep.max_violation = max_abs_gap;
  rep.holds = max_abs_gap <= rep.tolerance;
  const double os = detail::max_of(one_sided, 0.0);
  rep.secondary = SecondaryCheck{"one-sided", os, kStabilityOneSidedTol,
                                 os <= kStabilityOneSidedTol};
  return rep;
}

// ---------------------------------------------------------------------------
// CNOT-count estimate

class DegenerateStrength : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LowerBoundReport {
  MetricKind metric;
  int num_qubits = 0;
  double target_strength = 0.0;
  double cnot_strength = 0.0;
  int heuristic_min_cnots = 0;
  /// Both strengths are numerical upper bounds, so the ratio is an estimate.
  std::string rigor_flag = "heuristic";
};

/// Strengths at or below this count as zero.
inline constexpr double kZeroStrength = 1e-8;

/// ceil(K^(u) / K^(CNOT)), with CNOT embedded on u's qubits. Single-qubit
/// inputs are local, so they report 0 against the two-qubit CNOT.
inline LowerBoundReport cnot_lower_bound(const MetricKind& metric,
                                         const UnitaryOperator& u,
                                         const OptimizerOptions& opts) {
  LowerBoundReport rep;
  rep.metric = metric;
  rep.num_qubits = u.num_qubits();
  const int cnot_qubits = std::max(2, u.num_qubits());
  rep.cnot_strength = strength(metric, embedded_cnot(cnot_qubits), opts).value;
  if (!(rep.cnot_strength > kZeroStrength)) {
    throw DegenerateStrength("CNOT strength " + std::to_string(rep.cnot_strength) +
                             " is not bounded away from zero");
  }
  rep.target_strength = u.num_qubits() < 2 ? 0.0 : strength(metric, u, opts).value;
  if (rep.target_strength <= kZeroStrength) {
    rep.heuristic_min_cnots = 0;
    return rep;
  }
  // Identical inputs give bit-identical strengths; the slack keeps a ratio
  // of 1 + rounding from counting as 2.
  const double ratio = rep.target_strength / rep.cnot_strength;
  rep.heuristic_min_cnots = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
  return rep;
}

}  // namespace qstrength
