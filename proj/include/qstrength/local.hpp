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

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qstrength/random.hpp"
#include "qstrength/unitary.hpp"

namespace qstrength {

using Factor = Eigen::Matrix2cd;

/// A tensor product A (x) B (x) ... of single-qubit unitaries, one per qubit,
/// in qubit order. Factors range over all of U(2), phases included.
class LocalUnitaryProduct {
 public:
  explicit LocalUnitaryProduct(std::vector<Factor> factors,
                               double tol = kUnitarityTol)
      : factors_(std::move(factors)) {
    if (factors_.empty()) {
      throw std::invalid_argument("local product needs at least one factor");
    }
    for (std::size_t j = 0; j < factors_.size(); ++j) {
      const double dev = unitarity_deviation(factors_[j]);
      if (!(dev <= tol)) {
        throw NotUnitary("factor " + std::to_string(j) + " is not unitary", dev);
      }
    }
  }

  static LocalUnitaryProduct identity(int num_qubits) {
    return LocalUnitaryProduct(
        std::vector<Factor>(static_cast<std::size_t>(num_qubits),
                            Factor::Identity()));
  }

  static LocalUnitaryProduct haar_random(int num_qubits, Rng& rng) {
    std::vector<Factor> fs;
    fs.reserve(static_cast<std::size_t>(num_qubits));
    for (int j = 0; j < num_qubits; ++j) fs.emplace_back(haar_random_matrix(2, rng));
    return LocalUnitaryProduct(std::move(fs));
  }

  int num_qubits() const noexcept { return static_cast<int>(factors_.size()); }
  const std::vector<Factor>& factors() const noexcept { return factors_; }
  const Factor& factor(int j) const { return factors_.at(static_cast<std::size_t>(j)); }

  /// This product with one more factor appended as the last qubit.
  LocalUnitaryProduct appended(const Factor& f) const {
    auto fs = factors_;
    fs.push_back(f);
    return LocalUnitaryProduct(std::move(fs));
  }

 private:
  std::vector<Factor> factors_;
};

inline ComplexMatrix expand(std::span<const Factor> factors) {
  const int n = static_cast<int>(factors.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      Complex v = factors[0]((r >> (n - 1)) & 1, (c >> (n - 1)) & 1);
      for (int k = 1; k < n; ++k) {
        v *= factors[static_cast<std::size_t>(k)]((r >> (n - 1 - k)) & 1,
                                                  (c >> (n - 1 - k)) & 1);
      }
      out(r, c) = v;
    }
  }
  return out;
}

inline UnitaryOperator expand(const LocalUnitaryProduct& l) {
  return UnitaryOperator(expand(std::span<const Factor>(l.factors())));
}

/// Pointwise factor product (a_j * b_j for each qubit j).
inline LocalUnitaryProduct factorwise_product(const LocalUnitaryProduct& a,
                                              const LocalUnitaryProduct& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw DimensionMismatch("factorwise_product: qubit counts differ");
  }
  std::vector<Factor> fs;
  for (int j = 0; j < a.num_qubits(); ++j) fs.emplace_back(a.factor(j) * b.factor(j));
  return LocalUnitaryProduct(std::move(fs));
}

namespace detail {

inline int qubit_bit(Eigen::Index index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1);
}

inline int qubits_of(const ComplexMatrix& u) {
  const auto n = qubits_for_dimension(u.rows());
  if (!n || u.rows() != u.cols()) {
    throw DimensionMismatch("expected a 2^n x 2^n matrix");
  }
  return *n;
}

}  // namespace detail

/// trace(expand(l)^dagger * u), the Frobenius-engine objective.
inline Complex local_overlap(std::span<const Factor> factors,
                             const ComplexMatrix& u) {
  const int n = detail::qubits_of(u);
  if (static_cast<int>(factors.size()) != n) {
    throw DimensionMismatch("local_overlap: qubit counts differ");
  }
  const Eigen::Index dim = u.rows();
  Complex t{0.0, 0.0};
  for (Eigen::Index x = 0; x < dim; ++x) {
    for (Eigen::Index y = 0; y < dim; ++y) {
      Complex w{1.0, 0.0};
      for (int k = 0; k < n; ++k) {
        w *= std::conj(factors[static_cast<std::size_t>(k)](
            detail::qubit_bit(y, k, n), detail::qubit_bit(x, k, n)));
      }
      t += w * u(y, x);
    }
  }
  return t;
}

inline Complex local_overlap(const LocalUnitaryProduct& l,
                             const UnitaryOperator& u) {
  return local_overlap(std::span<const Factor>(l.factors()), u.matrix());
}

/// The 2x2 matrix M_j with trace(L^dagger u) = trace(A_j^dagger M_j) when every
/// factor other than A_j is held fixed. Linear in `u`, which need not be
/// unitary.
inline Factor environment(const ComplexMatrix& u,
                          std::span<const Factor> factors, int j) {
  const int n = detail::qubits_of(u);
  if (static_cast<int>(factors.size()) != n) {
    throw DimensionMismatch("environment: qubit counts differ");
  }
  if (j < 0 || j >= n) throw std::out_of_range("environment: qubit index out of range");
  const Eigen::Index dim = u.rows();
  Factor m = Factor::Zero();
  for (Eigen::Index x = 0; x < dim; ++x) {
    for (Eigen::Index y = 0; y < dim; ++y) {
      Complex w{1.0, 0.0};
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        w *= std::conj(factors[static_cast<std::size_t>(k)](
            detail::qubit_bit(y, k, n), detail::qubit_bit(x, k, n)));
      }
      m(detail::qubit_bit(y, j, n), detail::qubit_bit(x, j, n)) += w * u(y, x);
    }
  }
  return m;
}

inline Factor environment(const UnitaryOperator& u,
                          const LocalUnitaryProduct& l, int j) {
  if (u.num_qubits() != l.num_qubits()) {
    throw DimensionMismatch("environment: qubit counts differ");
  }
  return environment(u.matrix(), std::span<const Factor>(l.factors()), j);
}

/// Singular values below this are treated as zero by polar_update.
inline constexpr double kDegenerateSingularValue = 1e-14;

namespace detail {

// Unit vector orthogonal to unit vector w, built from the lowest-index
// standard basis vector that is not (nearly) parallel to w.
inline Eigen::Vector2cd orthonormal_completion(const Eigen::Vector2cd& w) {
  for (int e = 0; e < 2; ++e) {
    Eigen::Vector2cd r = Eigen::Vector2cd::Unit(e);
    r -= w * w.dot(r);
    if (r.squaredNorm() >= 0.25) return r.normalized();
  }
  return Eigen::Vector2cd::Unit(1);  // unreachable for unit w
}

}  // namespace detail

/// Unitary polar factor W V^dagger of m = W S V^dagger, the maximizer of
/// Re trace(A^dagger m) over unitary A.
///
/// Directions with singular value below 1e-14 are completed by the
/// lowest-index orthonormal completion, so the zero matrix maps to the
/// identity and the result is always unitary.
inline Factor polar_update(const Factor& m) {
  Eigen::JacobiSVD<Factor> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(0) < kDegenerateSingularValue) return Factor::Identity();
  if (s(1) >= kDegenerateSingularValue) {
    return svd.matrixU() * svd.matrixV().adjoint();
  }
  const Eigen::Vector2cd w1 = svd.matrixU().col(0);
  const Eigen::Vector2cd v1 = svd.matrixV().col(0);
  const Eigen::Vector2cd w2 = detail::orthonormal_completion(w1);
  const Eigen::Vector2cd v2 = detail::orthonormal_completion(v1);
  return w1 * v1.adjoint() + w2 * v2.adjoint();
}

// ---------------------------------------------------------------------------
// Real chart on U(2): base * e^{i phi} * exp(i (a X + b Y + c Z)).

inline constexpr int kParamsPerFactor = 4;

inline Factor factor_from_params(const Factor& base, const double* p) {
  const double phi = p[0];
  const double a = p[1], b = p[2], c = p[3];
  const double r = std::sqrt(a * a + b * b + c * c);
  const double cr = std::cos(r);
  // sin(r)/r, with the series limit near 0
  const double sr = r > 1e-8 ? std::sin(r) / r : 1.0 - r * r / 6.0;
  Factor e;
  e(0, 0) = Complex{cr, sr * c};
  e(0, 1) = Complex{sr * b, sr * a};
  e(1, 0) = Complex{-sr * b, sr * a};
  e(1, 1) = Complex{cr, -sr * c};
  return base * (std::polar(1.0, phi) * e);
}

}  // namespace qstrength
