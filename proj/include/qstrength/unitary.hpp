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
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qstrength/random.hpp"

namespace qstrength {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex i_{0.0, 1.0};

/// Default tolerance on max |m^dagger m - I| for a matrix to count as unitary.
inline constexpr double kUnitarityTol = 1e-10;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotUnitary : public std::invalid_argument {
 public:
  NotUnitary(const std::string& what, double deviation)
      : std::invalid_argument(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

class UnknownGate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// max entry magnitude of (m^dagger m - I). Throws on non-square input.
inline double unitarity_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("unitarity check needs a square matrix, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  if (m.size() == 0) return 0.0;
  const ComplexMatrix defect =
      m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols());
  return defect.cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& m, double tol = kUnitarityTol) {
  return unitarity_deviation(m) <= tol;
}

/// Number of qubits n with 2^n == dim, or nullopt if dim is not a power of 2.
inline std::optional<int> qubits_for_dimension(Eigen::Index dim) {
  if (dim < 2) return std::nullopt;
  int n = 0;
  Eigen::Index d = dim;
  while (d > 1) {
    if (d % 2 != 0) return std::nullopt;
    d /= 2;
    ++n;
  }
  return n;
}

/// An n-qubit unitary, stored as a dense 2^n x 2^n matrix.
///
/// Qubit 0 owns the most significant bit of the basis index.
class UnitaryOperator {
 public:
  explicit UnitaryOperator(ComplexMatrix m, double tol = kUnitarityTol)
      : matrix_(std::move(m)) {
    const auto n = qubits_for_dimension(matrix_.rows());
    if (matrix_.rows() != matrix_.cols() || !n) {
      throw DimensionMismatch("unitary must be 2^n x 2^n, got " +
                              std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()));
    }
    num_qubits_ = *n;
    const double dev = unitarity_deviation(matrix_);
    if (!(dev <= tol)) {
      throw NotUnitary("matrix is not unitary (max |U^dagger U - I| = " +
                           std::to_string(dev) + ")",
                       dev);
    }
  }

  static UnitaryOperator identity(int num_qubits) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    return UnitaryOperator(ComplexMatrix::Identity(dim, dim));
  }

  int num_qubits() const noexcept { return num_qubits_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

  UnitaryOperator adjoint() const {
    return UnitaryOperator(matrix_.adjoint(), kUnitarityTol);
  }

 private:
  ComplexMatrix matrix_;
  int num_qubits_ = 0;
};

/// Kronecker product; `a` owns the most significant qubits of the result.
inline UnitaryOperator tensor(const UnitaryOperator& a,
                              const UnitaryOperator& b) {
  ComplexMatrix k = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return UnitaryOperator(std::move(k));
}

/// Matrix product u * v (v acts first).
inline UnitaryOperator compose(const UnitaryOperator& u,
                               const UnitaryOperator& v) {
  if (u.num_qubits() != v.num_qubits()) {
    throw DimensionMismatch("compose: operands act on " +
                            std::to_string(u.num_qubits()) + " and " +
                            std::to_string(v.num_qubits()) + " qubits");
  }
  return UnitaryOperator(u.matrix() * v.matrix());
}

/// Applies u to the computational basis state |index>.
inline ComplexVector apply_to_basis(const UnitaryOperator& u,
                                    Eigen::Index index) {
  if (index < 0 || index >= u.dim()) {
    throw std::out_of_range("basis index out of range");
  }
  return u.matrix().col(index);
}

// ---------------------------------------------------------------------------
// Metrics

enum class Metric { Frobenius, OperatorNorm };

/// A distance on unitaries. `normalized` divides the Frobenius distance by
/// sqrt(dim) and is ignored for the operator norm.
struct MetricKind {
  Metric variant = Metric::Frobenius;
  bool normalized = false;

  static constexpr MetricKind frobenius(bool normalized = false) {
    return {Metric::Frobenius, normalized};
  }
  static constexpr MetricKind operator_norm() {
    return {Metric::OperatorNorm, false};
  }

  friend bool operator==(const MetricKind&, const MetricKind&) = default;
};

inline std::string to_string(const MetricKind& m) {
  if (m.variant == Metric::OperatorNorm) return "opnorm";
  return m.normalized ? "frobenius-norm" : "frobenius";
}

inline std::optional<MetricKind> parse_metric(std::string_view name) {
  if (name == "frobenius") return MetricKind::frobenius(false);
  if (name == "frobenius-norm") return MetricKind::frobenius(true);
  if (name == "opnorm") return MetricKind::operator_norm();
  return std::nullopt;
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

/// Distance between two equally sized matrices under `metric`.
inline double distance(const MetricKind& metric, const ComplexMatrix& u,
                       const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw DimensionMismatch("distance: operand dimensions differ");
  }
  const ComplexMatrix diff = u - v;
  if (metric.variant == Metric::OperatorNorm) return operator_norm(diff);
  const double f = diff.norm();
  return metric.normalized ? f / std::sqrt(static_cast<double>(u.rows())) : f;
}

inline double distance(const MetricKind& metric, const UnitaryOperator& u,
                       const UnitaryOperator& v) {
  return distance(metric, u.matrix(), v.matrix());
}

// ---------------------------------------------------------------------------
// Standard gates

enum class Gate { CNOT, CZ, SWAP, SQRT_SWAP, H, X, Y, Z, I };

inline UnitaryOperator standard_gate(Gate g) {
  using std::numbers::sqrt2;
  switch (g) {
    case Gate::I:
      return UnitaryOperator::identity(1);
    case Gate::X: {
      Eigen::Matrix2cd m;
      m << 0, 1, 1, 0;
      return UnitaryOperator(m);
    }
    case Gate::Y: {
      Eigen::Matrix2cd m;
      m << 0, -i_, i_, 0;
      return UnitaryOperator(m);
    }
    case Gate::Z: {
      Eigen::Matrix2cd m;
      m << 1, 0, 0, -1;
      return UnitaryOperator(m);
    }
    case Gate::H: {
      Eigen::Matrix2cd m;
      m << 1, 1, 1, -1;
      return UnitaryOperator(m / sqrt2);
    }
    case Gate::CNOT: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return UnitaryOperator(m);
    }
    case Gate::CZ: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
      m(3, 3) = -1.0;
      return UnitaryOperator(m);
    }
    case Gate::SWAP: {
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
      return UnitaryOperator(m);
    }
    case Gate::SQRT_SWAP: {
      const Complex a{0.5, 0.5};
      const Complex b{0.5, -0.5};
      Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
      m(0, 0) = m(3, 3) = 1.0;
      m(1, 1) = m(2, 2) = a;
      m(1, 2) = m(2, 1) = b;
      return UnitaryOperator(m);
    }
  }
  throw UnknownGate("unknown gate");
}

/// Named gates accepted on the command line: cnot, cz, swap, sqrt_swap, h,
/// x, y, z and the identities id1, id2, id3.
inline UnitaryOperator named_gate(std::string_view name) {
  if (name == "cnot") return standard_gate(Gate::CNOT);
  if (name == "cz") return standard_gate(Gate::CZ);
  if (name == "swap") return standard_gate(Gate::SWAP);
  if (name == "sqrt_swap") return standard_gate(Gate::SQRT_SWAP);
  if (name == "h") return standard_gate(Gate::H);
  if (name == "x") return standard_gate(Gate::X);
  if (name == "y") return standard_gate(Gate::Y);
  if (name == "z") return standard_gate(Gate::Z);
  if (name == "id1") return UnitaryOperator::identity(1);
  if (name == "id2") return UnitaryOperator::identity(2);
  if (name == "id3") return UnitaryOperator::identity(3);
  throw UnknownGate("unknown gate name '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Haar sampling

/// Haar-distributed dim x dim unitary drawn from `rng`.
///
/// QR of a complex Ginibre matrix, with the columns of Q rescaled by the
/// phases of diag(R) so the result does not depend on the QR sign
/// convention (Mezzadri 2007).
inline ComplexMatrix haar_random_matrix(Eigen::Index dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = rng.complex_normal();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= (mag > 0.0 ? d / mag : Complex{1.0, 0.0});
  }
  return q;
}

inline UnitaryOperator haar_random_unitary(int num_qubits,
                                           std::uint64_t seed) {
  if (num_qubits < 1) {
    throw std::invalid_argument("haar_random_unitary: num_qubits must be >= 1");
  }
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(num_qubits)));
  return UnitaryOperator(haar_random_matrix(Eigen::Index{1} << num_qubits, rng));
}

}  // namespace qstrength
