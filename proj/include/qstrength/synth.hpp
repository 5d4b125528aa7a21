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

// CNOT from an arbitrary entangling two-qubit gate U and local layers:
//
//   L_k U L_{k-1} ... U L_0  ~  CNOT   (up to global phase)
//
// searched for k = 1, 2, ... until a plan reaches the success tolerance.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qstrength/local.hpp"
#include "qstrength/local_opt.hpp"
#include "qstrength/parallel.hpp"
#include "qstrength/pattern_search.hpp"
#include "qstrength/random.hpp"
#include "qstrength/unitary.hpp"

namespace qstrength {

/// min over phi of D(u, e^{i phi} v).
inline double phase_invariant_distance(const MetricKind& metric,
                                       const ComplexMatrix& u,
                                       const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw DimensionMismatch("phase_invariant_distance: operand dimensions differ");
  }
  const Complex t = (v.adjoint() * u).trace();
  const double seed_phase = std::abs(t) > 0.0 ? std::arg(t) : 0.0;
  if (metric.variant == Metric::Frobenius) {
    // Optimal phase is arg trace(v^dagger u); evaluating the difference
    // directly avoids the cancellation in sqrt(2 dim - 2 |t|).
    return distance(metric, u, std::polar(1.0, seed_phase) * v);
  }
  auto f = [&](double phi) { return distance(metric, u, std::polar(1.0, phi) * v); };
  // Coarse scan around the circle, then golden-section on the best bracket.
  constexpr int kScan = 64;
  constexpr double kCell = 2.0 * std::numbers::pi / kScan;
  double best_phi = seed_phase;
  double best = f(seed_phase);
  for (int s = 1; s < kScan; ++s) {
    const double phi = seed_phase + s * kCell;
    const double val = f(phi);
    if (val < best) {
      best = val;
      best_phi = phi;
    }
  }
  constexpr double kInvPhi = 0.6180339887498949;
  double a = best_phi - kCell;
  double b = best_phi + kCell;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return std::min({best, fc, fd});
}

inline double phase_invariant_distance(const MetricKind& metric,
                                       const UnitaryOperator& u,
                                       const UnitaryOperator& v) {
  return phase_invariant_distance(metric, u.matrix(), v.matrix());
}

// ---------------------------------------------------------------------------
// Entangling test

class NotEntangling : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Output entanglement above this marks a gate as entangling.
inline constexpr double kEntanglingThreshold = 1e-8;

/// Entanglement entropy (natural log) of a two-qubit pure state, from its
/// squared Schmidt coefficients.
inline double entanglement_entropy(const Eigen::Vector4cd& psi) {
  Eigen::Matrix2cd c;
  c << psi(0), psi(1), psi(2), psi(3);
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(c);
  const Eigen::Vector2d s2 = svd.singularValues().array().square();
  const double total = s2.sum();
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double p = s2(k) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

namespace detail {

inline void require_two_qubits(const UnitaryOperator& u, const char* who) {
  if (u.num_qubits() != 2) {
    throw DimensionMismatch(std::string(who) + ": expected a two-qubit gate, got " +
                            std::to_string(u.num_qubits()) + " qubits");
  }
}

inline Eigen::Vector4cd product_output(const Eigen::Matrix4cd& u,
                                       std::span<const double> p) {
  Eigen::Vector2cd a(Complex{p[0], p[1]}, Complex{p[2], p[3]});
  Eigen::Vector2cd b(Complex{p[4], p[5]}, Complex{p[6], p[7]});
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) return Eigen::Vector4cd::Zero();
  a /= na;
  b /= nb;
  Eigen::Vector4cd in;
  in << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return u * in;
}

}  // namespace detail

/// Largest entanglement entropy found over product inputs |a>|b>, by
/// compass search from 20 seeded random starts.
inline double max_output_entanglement(const UnitaryOperator& u2,
                                      std::uint64_t seed) {
  detail::require_two_qubits(u2, "max_output_entanglement");
  const Eigen::Matrix4cd u = u2.matrix();
  constexpr int kStarts = 20;
  PatternSearchOptions ps;
  ps.initial_step = 0.25;
  ps.min_step = 1e-8;
  ps.max_sweeps = 200;
  double best = 0.0;
  for (int r = 0; r < kStarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<double> x0(8);
    for (double& v : x0) v = rng.normal();
    auto neg_entropy = [&](const std::vector<double>& p) {
      return -entanglement_entropy(detail::product_output(u, p));
    };
    const auto found = compass_search(neg_entropy, x0, ps);
    best = std::max(best, -found.value);
  }
  return best;
}

inline bool is_entangling(const UnitaryOperator& u2, std::uint64_t seed) {
  return max_output_entanglement(u2, seed) > kEntanglingThreshold;
}

// ---------------------------------------------------------------------------
// Synthesis

/// Success tolerance on the phase-invariant Frobenius distance to CNOT.
inline constexpr double kSynthesisTol = 1e-6;
/// Restart budget per use count.
inline constexpr int kSynthesisRestarts = 64;

struct SynthesisAttempt {
  int uses = 0;
  double best_distance = 0.0;
  std::vector<double> per_restart_distances;
};

struct SynthesisPlan {
  int uses = 0;
  /// uses + 1 two-qubit local layers, applied as L_k U ... U L_0.
  std::vector<LocalUnitaryProduct> layers;
  double achieved_distance = 0.0;
  bool success = false;
  /// Best distance found for each use count tried, in order.
  std::vector<SynthesisAttempt> attempts;
};

inline ComplexMatrix interleaved_product(const ComplexMatrix& u2,
                                         std::span<const LocalUnitaryProduct> layers) {
  ComplexMatrix p = expand(layers.front()).matrix();
  for (std::size_t i = 1; i < layers.size(); ++i) {
    p = expand(layers[i]).matrix() * (u2 * p);
  }
  return p;
}

/// Phase-invariant Frobenius distance of the replayed plan to CNOT.
inline double replay_distance(const UnitaryOperator& u2,
                              std::span<const LocalUnitaryProduct> layers) {
  return phase_invariant_distance(MetricKind::frobenius(),
                                  interleaved_product(u2.matrix(), layers),
                                  standard_gate(Gate::CNOT).matrix());
}

namespace detail {

using Layer = std::vector<Factor>;  // two factors

inline ComplexMatrix layer_matrix(const Layer& l) { return expand(std::span<const Factor>(l)); }

// Alternating ascent of |trace(C^dagger L_k U ... U L_0)| over every factor
// of every layer. With Left_i = C^dagger L_k U ... L_{i+1} U and
// Right_i = U L_{i-1} ... U L_0, the trace is trace(L_i Right_i Left_i), whose
// modulus equals |trace(L_i^dagger M)| for M = (Right_i Left_i)^dagger.
inline std::vector<Layer> ascend_layers(const ComplexMatrix& u2,
                                        const ComplexMatrix& target,
                                        std::vector<Layer> layers,
                                        const OptimizerOptions& opts) {
  const std::size_t count = layers.size();
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  auto overlap = [&] {
    ComplexMatrix p = layer_matrix(layers[0]);
    for (std::size_t i = 1; i < count; ++i) p = layer_matrix(layers[i]) * (u2 * p);
    return std::abs((target.adjoint() * p).trace());
  };
  double prev = overlap();
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < count; ++i) {
      ComplexMatrix right = id;
      for (std::size_t m = 0; m < i; ++m) right = u2 * (layer_matrix(layers[m]) * right);
      ComplexMatrix left = target.adjoint();
      for (std::size_t m = count - 1; m > i; --m) left = left * layer_matrix(layers[m]) * u2;
      const ComplexMatrix env = (right * left).adjoint();
      for (int j = 0; j < 2; ++j) {
        layers[i][static_cast<std::size_t>(j)] =
            polar_update(environment(env, std::span<const Factor>(layers[i]), j));
      }
    }
    const double cur = overlap();
    const bool done = std::abs(cur - prev) < opts.convergence_tol;
    prev = cur;
    if (done) break;
  }
  return layers;
}

}  // namespace detail

/// Best plan with exactly `uses` applications of u2, over opts.restarts
/// seeded starts. Selection is by (distance, restart index).
inline SynthesisPlan synthesize_with_uses(const UnitaryOperator& u2, int uses,
                                          const OptimizerOptions& opts) {
  detail::require_two_qubits(u2, "synthesize_with_uses");
  if (uses < 1) throw std::invalid_argument("uses must be >= 1");
  opts.validate();
  const ComplexMatrix cnot = standard_gate(Gate::CNOT).matrix();
  const auto restarts = static_cast<std::size_t>(opts.restarts);

  std::vector<std::vector<LocalUnitaryProduct>> plans(restarts);
  std::vector<double> dists(restarts);
  parallel_for(restarts, opts.threads, [&](std::size_t r) {
    Rng rng(derive_seed(opts.master_seed, r));
    std::vector<detail::Layer> layers;
    for (int i = 0; i <= uses; ++i) {
      layers.push_back(LocalUnitaryProduct::haar_random(2, rng).factors());
    }
    layers = detail::ascend_layers(u2.matrix(), cnot, std::move(layers), opts);
    for (auto& l : layers) plans[r].emplace_back(std::move(l));
    dists[r] = replay_distance(u2, plans[r]);
  });

  const std::size_t best = detail::argmin_index(dists);
  SynthesisPlan plan;
  plan.uses = uses;
  plan.layers = std::move(plans[best]);
  plan.achieved_distance = dists[best];
  plan.success = plan.achieved_distance <= kSynthesisTol;
  plan.attempts.push_back({uses, dists[best], dists});
  return plan;
}

/// Smallest k <= max_uses for which the search reaches kSynthesisTol, with
/// its plan; otherwise the best plan at k = max_uses and success = false.
/// Throws NotEntangling when u2 maps every product state to a product state.
inline SynthesisPlan synthesize_cnot(const UnitaryOperator& u2, int max_uses,
                                     const OptimizerOptions& opts) {
  detail::require_two_qubits(u2, "synthesize_cnot");
  if (max_uses < 1) throw std::invalid_argument("max_uses must be >= 1");
  if (!is_entangling(u2, opts.master_seed)) {
    throw NotEntangling(
        "gate is not entangling: a CNOT cannot be built from it and local "
        "unitaries");
  }
  std::vector<SynthesisAttempt> attempts;
  SynthesisPlan plan;
  for (int k = 1; k <= max_uses; ++k) {
    plan = synthesize_with_uses(u2, k, opts);
    attempts.push_back(plan.attempts.front());
    if (plan.success) break;
  }
  plan.attempts = std::move(attempts);
  return plan;
}

}  // namespace qstrength
