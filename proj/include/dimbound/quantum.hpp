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

// Validated quantum objects: pure states, density operators, two-outcome
// measurements and the standard imperfect-device models.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dimbound/errors.hpp"
#include "dimbound/numerics.hpp"

namespace dimbound {

inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
inline constexpr double kStateTol = 1e-10;
inline constexpr double kDefaultPurityTol = 1e-9;
inline constexpr double kDegenerateEigenGap = 1e-12;

class PureState {
   public:
    /// Requires unit norm within kStateTol. The stored amplitudes are phase-canonicalized.
    explicit PureState(ComplexVector amplitudes) {
        require_dim_in_range(amplitudes.size(), "PureState");
        require_finite(amplitudes, "PureState");
        const double norm = amplitudes.norm();
        if (std::abs(norm - 1.0) > kStateTol) {
            throw ValidationError("PureState: amplitudes must have unit norm, got norm " + std::to_string(norm));
        }
        amplitudes_ = canonicalize_phase(std::move(amplitudes));
    }

    static PureState normalized(const ComplexVector& v) {
        const double norm = v.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw ValidationError("PureState: cannot normalize a zero or non-finite vector");
        }
        return PureState(v / norm);
    }

    static PureState basis(Eigen::Index dim, Eigen::Index k) {
        ComplexVector v = ComplexVector::Zero(dim);
        v(k) = 1.0;
        return PureState(std::move(v));
    }

    Eigen::Index dim() const { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    ComplexMatrix projector() const { return dimbound::projector(amplitudes_); }

   private:
    ComplexVector amplitudes_;
};

inline PureState ket0() { return PureState::basis(2, 0); }
inline PureState ket1() { return PureState::basis(2, 1); }
inline PureState ket_plus() { return PureState(make_vector({Complex(kInvSqrt2), Complex(kInvSqrt2)})); }
inline PureState ket_minus() { return PureState(make_vector({Complex(kInvSqrt2), Complex(-kInvSqrt2)})); }

class DensityOperator {
   public:
    /// Validates Hermiticity, unit trace and positivity, each within kStateTol.
    explicit DensityOperator(const ComplexMatrix& m) {
        if (m.rows() != m.cols()) {
            throw ValidationError("DensityOperator: matrix must be square, got " + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()));
        }
        require_dim_in_range(m.rows(), "DensityOperator");
        require_finite(m, "DensityOperator");
        if (!is_hermitian(m, kStateTol)) {
            throw ValidationError("DensityOperator: matrix is not Hermitian (max |m - m^dagger| = " +
                                  std::to_string(max_abs(m - m.adjoint())) + ")");
        }
        matrix_ = (m + m.adjoint()) / 2.0;
        const double tr = matrix_.trace().real();
        if (std::abs(tr - 1.0) > kStateTol) {
            throw ValidationError("DensityOperator: trace is " + std::to_string(tr) + ", expected 1");
        }
        const double smallest = hermitian_eig(matrix_).values.back();
        if (smallest < -kStateTol) {
            throw ValidationError("DensityOperator: not positive semidefinite (smallest eigenvalue " +
                                  std::to_string(smallest) + ")");
        }
    }

    static DensityOperator from_pure(const PureState& psi) { return DensityOperator(psi.projector()); }
    static DensityOperator maximally_mixed(Eigen::Index dim) {
        return DensityOperator(identity(dim) / static_cast<double>(dim));
    }

    Eigen::Index dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

   private:
    ComplexMatrix matrix_;
};

/// Two positive operators summing to the identity; outcome j selects element(j).
class TwoOutcomeMeasurement {
   public:
    TwoOutcomeMeasurement(const ComplexMatrix& element0, const ComplexMatrix& element1) {
        if (element0.rows() != element0.cols() || element1.rows() != element1.cols() ||
            element0.rows() != element1.rows()) {
            throw ValidationError("TwoOutcomeMeasurement: elements must be square and of equal dimension");
        }
        require_dim_in_range(element0.rows(), "TwoOutcomeMeasurement");
        const std::array<const ComplexMatrix*, 2> raw{&element0, &element1};
        for (std::size_t j = 0; j < 2; ++j) {
            const std::string name = "TwoOutcomeMeasurement: element" + std::to_string(j);
            require_finite(*raw[j], name);
            if (!is_hermitian(*raw[j], kStateTol)) {
                throw ValidationError(name + " is not Hermitian");
            }
            elements_[j] = (*raw[j] + raw[j]->adjoint()) / 2.0;
            const double smallest = hermitian_eig(elements_[j]).values.back();
            if (smallest < -kStateTol) {
                throw ValidationError(name + " is not positive semidefinite (smallest eigenvalue " +
                                      std::to_string(smallest) + ")");
            }
        }
        const double completeness = max_abs(elements_[0] + elements_[1] - identity(element0.rows()));
        if (completeness > kStateTol) {
            throw ValidationError("TwoOutcomeMeasurement: elements do not sum to identity (deviation " +
                                  std::to_string(completeness) + ")");
        }
    }

    Eigen::Index dim() const { return elements_[0].rows(); }
    const ComplexMatrix& element(std::size_t j) const { return elements_.at(j); }

   private:
    std::array<ComplexMatrix, 2> elements_;
};

enum class NoiseKind { none, werner, tilted_measurement, local_unitary, custom };

/// Imperfect-device model. Parameters per kind:
///   werner: {v} with v in [0, 1]
///   tilted_measurement: {alpha} in radians (tilt of the second measurement basis)
///   local_unitary: {theta} in radians (y-rotation applied to the second half of the source)
///   none, custom: {}
struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    std::vector<double> parameters;

    void validate() const {
        const std::size_t expected = (kind == NoiseKind::none || kind == NoiseKind::custom) ? 0 : 1;
        if (parameters.size() != expected) {
            throw ValidationError("NoiseSpec: expected " + std::to_string(expected) + " parameter(s), got " +
                                  std::to_string(parameters.size()));
        }
        for (double p : parameters) {
            if (!std::isfinite(p)) {
                throw ValidationError("NoiseSpec: parameters must be finite");
            }
        }
        if (kind == NoiseKind::werner && (parameters[0] < 0.0 || parameters[0] > 1.0)) {
            throw ValidationError("NoiseSpec: werner visibility must lie in [0,1]");
        }
    }
};

/// (|00> + |11>)/sqrt(2) in the ordered basis |00>, |01>, |10>, |11>.
inline PureState bell_phi_plus() {
    return PureState(make_vector({Complex(kInvSqrt2), Complex(0.0), Complex(0.0), Complex(kInvSqrt2)}));
}

/// M_0 = {|0><0|, |1><1|}, M_1 = {|+><+|, |-><-|}.
inline std::array<TwoOutcomeMeasurement, 2> bb84_measurements() {
    return {TwoOutcomeMeasurement(ket0().projector(), ket1().projector()),
            TwoOutcomeMeasurement(ket_plus().projector(), ket_minus().projector())};
}

inline DensityOperator werner_state(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("werner_state: visibility v must lie in [0,1], got " + std::to_string(v));
    }
    return DensityOperator(v * bell_phi_plus().projector() + (1.0 - v) * identity(4) / 4.0);
}

/// Projectors onto cos(alpha)|0> + sin(alpha)|1> and its orthocomplement.
inline TwoOutcomeMeasurement tilted_measurement(double alpha) {
    if (!std::isfinite(alpha)) {
        throw ValidationError("tilted_measurement: alpha must be finite");
    }
    const ComplexVector chi{{Complex(std::cos(alpha)), Complex(std::sin(alpha))}};
    const ComplexVector chi_perp{{Complex(-std::sin(alpha)), Complex(std::cos(alpha))}};
    return TwoOutcomeMeasurement(projector(chi), projector(chi_perp));
}

/// exp(-i theta Y / 2).
inline ComplexMatrix y_rotation(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    ComplexMatrix r(2, 2);
    r << c, -s, s, c;
    return r;
}

inline double purity(const DensityOperator& rho) { return rho.matrix().squaredNorm(); }

inline bool is_pure(const DensityOperator& rho, double purity_tol = kDefaultPurityTol) {
    return purity(rho) >= 1.0 - purity_tol;
}

struct DominantComponent {
    PureState state;
    double weight;
    bool degenerate;  // top eigenvalue not separated by kDegenerateEigenGap
};

namespace detail {

inline bool canonical_greater(const ComplexVector& a, const ComplexVector& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if (a(k).real() != b(k).real()) {
            return a(k).real() > b(k).real();
        }
        if (a(k).imag() != b(k).imag()) {
            return a(k).imag() > b(k).imag();
        }
    }
    return false;
}

}  // namespace detail

/// Top eigenvector and its eigenvalue. When the top eigenvalue is degenerate, the
/// lexicographically greatest canonicalized eigenvector of the top cluster is chosen.
inline DominantComponent dominant_pure_component(const DensityOperator& rho) {
    const HermitianEigen eig = hermitian_eig(rho.matrix());
    ComplexVector best = canonicalize_phase(eig.vectors[0]);
    bool degenerate = false;
    for (std::size_t k = 1; k < eig.values.size() && eig.values[0] - eig.values[k] < kDegenerateEigenGap; ++k) {
        degenerate = true;
        ComplexVector candidate = canonicalize_phase(eig.vectors[k]);
        if (detail::canonical_greater(candidate, best)) {
            best = std::move(candidate);
        }
    }
    return {PureState::normalized(best), eig.values[0], degenerate};
}

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2. When either argument is pure
/// (purity >= 1 - purity_tol) the overlap form <psi|rho|psi> is used.
inline double fidelity(const DensityOperator& a, const DensityOperator& b, double purity_tol = kDefaultPurityTol) {
    if (a.dim() != b.dim()) {
        throw ValidationError("fidelity: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()) + ")");
    }
    const bool a_pure = is_pure(a, purity_tol);
    const bool b_pure = is_pure(b, purity_tol);
    double f = 0.0;
    if (a_pure && b_pure) {
        const ComplexVector psi = dominant_pure_component(a).state.amplitudes();
        const ComplexVector phi = dominant_pure_component(b).state.amplitudes();
        f = std::norm(psi.dot(phi));
    } else if (a_pure || b_pure) {
        const ComplexVector psi = dominant_pure_component(a_pure ? a : b).state.amplitudes();
        const ComplexMatrix& other = (a_pure ? b : a).matrix();
        f = psi.dot(other * psi).real();
    } else {
        const HermitianEigen ea = hermitian_eig(a.matrix());
        ComplexMatrix sqrt_a = ComplexMatrix::Zero(a.dim(), a.dim());
        for (std::size_t k = 0; k < ea.values.size(); ++k) {
            sqrt_a += std::sqrt(std::max(ea.values[k], 0.0)) * projector(ea.vectors[k]);
        }
        const ComplexMatrix inner = sqrt_a * b.matrix() * sqrt_a;
        double root_sum = 0.0;
        for (double lambda : hermitian_eig((inner + inner.adjoint()) / 2.0).values) {
            root_sum += std::sqrt(std::max(lambda, 0.0));
        }
        f = root_sum * root_sum;
    }
    return std::clamp(f, 0.0, 1.0);
}

/// Random two-outcome POVM: element0 = U diag(u) U^dagger with u uniform in [0,1], element1 = I - element0.
template <typename Rng>
TwoOutcomeMeasurement random_two_outcome_povm(Eigen::Index dim, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        g.data()[k] = Complex(re, im);
    }
    const Eigen::HouseholderQR<ComplexMatrix> qr(g);
    const ComplexMatrix u = qr.householderQ();
    ComplexMatrix diag = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        diag(k, k) = unif(rng);
    }
    const ComplexMatrix e0 = u * diag * u.adjoint();
    return TwoOutcomeMeasurement(e0, identity(dim) - e0);
}

/// Projective qubit measurement {|chi><chi|, |chi_perp><chi_perp|} with chi Haar-random.
template <typename Rng>
TwoOutcomeMeasurement random_projective_qubit_measurement(Rng& rng) {
    const ComplexVector chi = haar_random_pure(2, rng);
    const ComplexVector chi_perp{{-std::conj(chi(1)), std::conj(chi(0))}};
    return TwoOutcomeMeasurement(projector(chi), projector(chi_perp));
}

/// Random mixed state rho = G G^dagger / tr(G G^dagger) with G a complex Ginibre matrix.
template <typename Rng>
DensityOperator random_density(Eigen::Index dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        g.data()[k] = Complex(re, im);
    }
    const ComplexMatrix rho = g * g.adjoint();
    return DensityOperator(rho / rho.trace().real());
}

}  // namespace dimbound
