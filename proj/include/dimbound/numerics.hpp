// Copyright 2026 The dimbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense complex linear algebra for small (dim <= 64) quantum objects.
//
// Matrices are row-major Eigen matrices. The decompositions (SVD, Hermitian
// eigensolver) are delegated to Eigen; this header adds the tolerance
// conventions used by the rest of the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimbound/errors.hpp"

namespace dimbound {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Eigen::Index kMaxDim = 64;
inline constexpr double kDefaultRankRelTol = 1e-9;
inline constexpr double kHermitianTol = 1e-10;

/// Moduli within this distance of the maximum count as "largest" during phase canonicalization.
inline constexpr double kPhaseTieTol = 1e-10;

struct RankResult {
    std::size_t rank = 0;
    std::vector<double> singular_values;  // non-increasing
    double threshold_used = 0.0;
};

struct HermitianEigen {
    std::vector<double> values;  // descending
    std::vector<ComplexVector> vectors;
};

/// Largest entry modulus, the max-entry norm used for all tolerance checks.
inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline void require_finite(const ComplexMatrix& m, std::string_view what) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        const Complex z = m.data()[k];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw ValidationError(std::string(what) + ": entry " + std::to_string(k) + " is not finite");
        }
    }
}

inline void require_dim_in_range(Eigen::Index dim, std::string_view what) {
    if (dim < 1 || dim > kMaxDim) {
        throw ValidationError(std::string(what) + ": dimension " + std::to_string(dim) + " outside [1, " +
                              std::to_string(kMaxDim) + "]");
    }
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline ComplexVector make_vector(std::initializer_list<Complex> entries) {
    ComplexVector v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index k = 0;
    for (const Complex& z : entries) {
        v(k++) = z;
    }
    return v;
}

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

inline ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

/// Traces out the first factor of a (dim_a * dim_b)-dimensional bipartite operator.
inline ComplexMatrix partial_trace_first(const ComplexMatrix& m, Eigen::Index dim_a, Eigen::Index dim_b) {
    if (dim_a < 1 || dim_b < 1 || m.rows() != dim_a * dim_b || m.cols() != dim_a * dim_b) {
        throw ValidationError("partial_trace_first: malformed bipartite operator, expected " +
                              std::to_string(dim_a * dim_b) + "x" + std::to_string(dim_a * dim_b) + ", got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    ComplexMatrix out = ComplexMatrix::Zero(dim_b, dim_b);
    for (Eigen::Index a = 0; a < dim_a; ++a) {
        out += m.block(a * dim_b, a * dim_b, dim_b, dim_b);
    }
    return out;
}

/// Makes the first entry of (numerically) largest modulus real and positive.
inline ComplexVector canonicalize_phase(ComplexVector v) {
    if (v.size() == 0) {
        return v;
    }
    const double largest = v.cwiseAbs().maxCoeff();
    if (largest == 0.0) {
        return v;
    }
    Eigen::Index pivot = 0;
    while (std::abs(v(pivot)) < largest - kPhaseTieTol * std::max(1.0, largest)) {
        ++pivot;
    }
    v *= std::conj(v(pivot)) / std::abs(v(pivot));
    v(pivot) = Complex(v(pivot).real(), 0.0);
    return v;
}

/// min over phi of ||a - e^{i phi} b||.
inline double phase_aligned_distance(const ComplexVector& a, const ComplexVector& b) {
    const Complex overlap = b.dot(a);
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
    return (a - phase * b).norm();
}

namespace detail {

inline ComplexMatrix stack_columns(std::span<const ComplexVector> columns, std::string_view what) {
    const Eigen::Index dim = columns.front().size();
    ComplexMatrix m(dim, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k].size() != dim) {
            throw ValidationError(std::string(what) + ": mixed vector dimensions (" + std::to_string(dim) + " vs " +
                                  std::to_string(columns[k].size()) + ")");
        }
        m.col(static_cast<Eigen::Index>(k)) = columns[k];
    }
    return m;
}

inline std::vector<double> singular_values(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

}  // namespace detail

/// Rank of the span of `columns`: singular values strictly above rel_tol * sigma_max.
inline RankResult numeric_rank(std::span<const ComplexVector> columns, double rel_tol = kDefaultRankRelTol) {
    if (!(rel_tol > 0.0)) {
        throw ValidationError("numeric_rank: rel_tol must be positive");
    }
    RankResult result;
    if (columns.empty()) {
        return result;
    }
    const ComplexMatrix m = detail::stack_columns(columns, "numeric_rank");
    result.singular_values = detail::singular_values(m);
    const double largest = result.singular_values.empty() ? 0.0 : result.singular_values.front();
    result.threshold_used = rel_tol * largest;
    result.rank = static_cast<std::size_t>(
        std::count_if(result.singular_values.begin(), result.singular_values.end(),
                      [&](double s) { return s > result.threshold_used; }));
    return result;
}

/// Eigendecomposition of a Hermitian matrix (within kHermitianTol), eigenvalues descending.
inline HermitianEigen hermitian_eig(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw ValidationError("hermitian_eig: matrix is not square");
    }
    require_finite(m, "hermitian_eig");
    if (!is_hermitian(m)) {
        throw ValidationError("hermitian_eig: matrix is not Hermitian (max |m - m^dagger| = " +
                              std::to_string(max_abs(m - m.adjoint())) + ")");
    }
    const Eigen::MatrixXcd sym = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eig: eigensolver did not converge");
    }
    HermitianEigen out;
    const Eigen::Index n = sym.rows();
    out.values.reserve(static_cast<std::size_t>(n));
    out.vectors.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        out.values.push_back(solver.eigenvalues()(k));
        out.vectors.emplace_back(solver.eigenvectors().col(k));
    }
    return out;
}

inline double trace_norm(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw ValidationError("trace_norm: matrix is not square");
    }
    double total = 0.0;
    for (double s : detail::singular_values(m)) {
        total += s;
    }
    return total;
}

/// G(k, l) = <states[k] | states[l]>.
inline ComplexMatrix gram(std::span<const ComplexVector> states) {
    if (states.empty()) {
        return ComplexMatrix(0, 0);
    }
    const ComplexMatrix cols = detail::stack_columns(states, "gram");
    return cols.adjoint() * cols;
}

/// Haar-random unit vector (normalized complex Gaussian), phase-canonicalized.
template <typename Rng>
ComplexVector haar_random_pure(Eigen::Index dim, Rng& rng) {
    if (dim < 1) {
        throw ValidationError("haar_random_pure: dimension must be at least 1");
    }
    require_dim_in_range(dim, "haar_random_pure");
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(k) = Complex(re, im);
    }
    const double norm = v.norm();
    if (norm == 0.0) {
        throw NumericalError("haar_random_pure: drew the zero vector");
    }
    return canonicalize_phase(v / norm);
}

}  // namespace dimbound
