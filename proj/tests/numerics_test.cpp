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

#include "dimbound/numerics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dimbound/quantum.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace dimbound;
using namespace dimbound::testing;

namespace {

ComplexMatrix pauli_x() {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

ComplexMatrix diag(std::initializer_list<double> d) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    Eigen::Index k = 0;
    for (double x : d) {
        m(k, k) = x;
        ++k;
    }
    return m;
}

}  // namespace

TEST(Kron, identities) {
    EXPECT_MATRIX_NEAR(kron(identity(2), identity(2)), identity(4), 0.0);
    EXPECT_MATRIX_NEAR(kron(diag({1, 0}), identity(2)), diag({1, 1, 0, 0}), 0.0);
}

TEST(Kron, x_x_flips_both_qubits) {
    ComplexVector ket00 = ComplexVector::Zero(4);
    ket00(0) = 1.0;
    const ComplexVector out = kron(pauli_x(), pauli_x()) * ket00;
    ComplexVector ket11 = ComplexVector::Zero(4);
    ket11(3) = 1.0;
    EXPECT_LE((out - ket11).norm(), 0.0);
}

TEST(Kron, trace_is_multiplicative) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix a = random_matrix(3, 3, rng);
        const ComplexMatrix b = random_matrix(2, 2, rng);
        EXPECT_LE(std::abs(kron(a, b).trace() - a.trace() * b.trace()), 1e-12 * (1 + std::abs(a.trace() * b.trace())));
    }
}

TEST(PartialTrace, bell_marginal_is_maximally_mixed) {
    EXPECT_MATRIX_NEAR(partial_trace_first(bell_phi_plus().projector(), 2, 2), identity(2) / 2.0, 1e-15);
}

TEST(PartialTrace, product_marginal) {
    std::mt19937_64 rng(3);
    const auto a = random_density(3, rng);
    const auto b = random_density(2, rng);
    EXPECT_MATRIX_NEAR(partial_trace_first(kron(a.matrix(), b.matrix()), 3, 2), b.matrix(), 1e-14);
}

TEST(PartialTrace, werner_matches_index_loop_oracle) {
    const oracle::Mat expected = oracle::partial_trace_first(oracle::werner(0.5), 2, 2);
    EXPECT_MATRIX_NEAR(to_eigen(expected), identity(2) / 2.0, 1e-15);
    EXPECT_MATRIX_NEAR(partial_trace_first(werner_state(0.5).matrix(), 2, 2), to_eigen(expected), 1e-15);
}

TEST(PartialTrace, preserves_trace_and_matches_oracle) {
    std::mt19937_64 rng(5);
    for (Eigen::Index da = 1; da <= 4; ++da) {
        for (Eigen::Index db = 1; db <= 4; ++db) {
            const ComplexMatrix m = random_matrix(da * db, da * db, rng);
            const ComplexMatrix r = partial_trace_first(m, da, db);
            EXPECT_LE(std::abs(r.trace() - m.trace()), 1e-12);
            EXPECT_MATRIX_NEAR(r, to_eigen(oracle::partial_trace_first(to_oracle(m), da, db)), 1e-12);
        }
    }
}

TEST(PartialTrace, rejects_malformed_operator) {
    EXPECT_THROW(partial_trace_first(identity(4), 2, 3), ValidationError);
    EXPECT_THROW(partial_trace_first(ComplexMatrix::Zero(4, 2), 2, 2), ValidationError);
}

TEST(NumericRank, bb84_quartet_spans_two_dimensions) {
    const std::vector<ComplexVector> quartet{ket0().amplitudes(), ket1().amplitudes(), ket_plus().amplitudes(),
                                             ket_minus().amplitudes()};
    const RankResult r = numeric_rank(quartet);
    EXPECT_EQ(r.rank, 2u);
    ASSERT_EQ(r.singular_values.size(), 2u);
    EXPECT_NEAR(r.singular_values[0], std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r.threshold_used, 1e-9 * std::sqrt(2.0), 1e-22);
}

TEST(NumericRank, global_phase_does_not_change_span) {
    std::mt19937_64 rng(17);
    const ComplexVector psi = haar_random_pure(3, rng);
    const std::vector<ComplexVector> pair{psi, std::polar(1.0, 0.77) * psi};
    EXPECT_EQ(numeric_rank(pair).rank, 1u);
}

TEST(NumericRank, empty_input_and_errors) {
    const RankResult r = numeric_rank(std::vector<ComplexVector>{});
    EXPECT_EQ(r.rank, 0u);
    EXPECT_TRUE(r.singular_values.empty());
    const std::vector<ComplexVector> mixed{ComplexVector::Zero(2), ComplexVector::Zero(3)};
    EXPECT_THROW(numeric_rank(mixed), ValidationError);
    EXPECT_THROW(numeric_rank(std::vector<ComplexVector>{ket0().amplitudes()}, 0.0), ValidationError);
}

TEST(NumericRank, agrees_with_gram_schmidt_and_is_permutation_and_phase_invariant) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index dim = 2 + trial % 4;
        const int count = 1 + trial % 5;
        const int true_rank = 1 + trial % static_cast<int>(std::min<Eigen::Index>(dim, count));
        // count vectors drawn from a true_rank-dimensional subspace
        const ComplexMatrix basis = random_matrix(dim, true_rank, rng);
        std::vector<ComplexVector> cols;
        for (int k = 0; k < count; ++k) {
            cols.emplace_back(basis * random_matrix(true_rank, 1, rng));
        }
        std::vector<oracle::Vec> plain;
        for (const auto& c : cols) {
            plain.push_back(to_oracle(c));
        }
        const std::size_t expected = oracle::gram_schmidt_rank(plain, 1e-9);
        EXPECT_EQ(expected, static_cast<std::size_t>(std::min(true_rank, count)));
        EXPECT_EQ(numeric_rank(cols).rank, expected);

        std::reverse(cols.begin(), cols.end());
        for (auto& c : cols) {
            c *= std::polar(1.0, phase(rng));
        }
        EXPECT_EQ(numeric_rank(cols).rank, expected);
    }
}

TEST(NumericRank, steered_states_of_random_pure_source_span_at_most_two) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ens = run_preparation(random_pure_qubit_scenario(rng));
        std::vector<ComplexVector> states;
        std::vector<oracle::Vec> plain;
        for (const auto& b : ens.branches()) {
            const auto top = dominant_pure_component(*b.conditional);
            states.push_back(top.state.amplitudes());
            plain.push_back(to_oracle(top.state.amplitudes()));
        }
        EXPECT_LE(oracle::gram_schmidt_rank(plain, 1e-9), 2u);
        EXPECT_LE(numeric_rank(states).rank, 2u);
    }
}

TEST(HermitianEig, maximally_mixed) {
    const HermitianEigen e = hermitian_eig(identity(2) / 2.0);
    EXPECT_NEAR(e.values[0], 0.5, 1e-15);
    EXPECT_NEAR(e.values[1], 0.5, 1e-15);
}

TEST(HermitianEig, rank_one_projector) {
    const HermitianEigen e = hermitian_eig(ket_plus().projector());
    EXPECT_NEAR(e.values[0], 1.0, 1e-15);
    EXPECT_NEAR(e.values[1], 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.vectors[0].dot(ket_plus().amplitudes())), 1.0, 1e-15);
}

TEST(HermitianEig, werner_steered_diagonal_matches_closed_form) {
    const double v = 0.8;
    const ComplexMatrix m = diag({(1 + v) / 2, (1 - v) / 2});
    const auto expected = oracle::eig2(to_oracle(m));
    EXPECT_NEAR(expected[0], 0.9, 1e-15);
    EXPECT_NEAR(expected[1], 0.1, 1e-15);
    const HermitianEigen e = hermitian_eig(m);
    EXPECT_NEAR(e.values[0], expected[0], 1e-15);
    EXPECT_NEAR(e.values[1], expected[1], 1e-15);
}

TEST(HermitianEig, reconstruction_and_orthonormality) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 6;
        const ComplexMatrix g = random_matrix(n, n, rng);
        const ComplexMatrix h = g + g.adjoint();
        const HermitianEigen e = hermitian_eig(h);
        ComplexMatrix rebuilt = ComplexMatrix::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            rebuilt += e.values[static_cast<std::size_t>(k)] * projector(e.vectors[static_cast<std::size_t>(k)]);
            for (Eigen::Index l = 0; l < n; ++l) {
                const Complex ip = e.vectors[static_cast<std::size_t>(k)].dot(e.vectors[static_cast<std::size_t>(l)]);
                EXPECT_LE(std::abs(ip - (k == l ? 1.0 : 0.0)), 1e-9);
            }
        }
        EXPECT_MATRIX_NEAR(rebuilt, h, 1e-9);
        EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
        if (n == 2) {
            const auto closed = oracle::eig2(to_oracle(h));
            EXPECT_NEAR(e.values[0], closed[0], 1e-12);
            EXPECT_NEAR(e.values[1], closed[1], 1e-12);
        }
    }
}

TEST(HermitianEig, rejects_non_hermitian) {
    ComplexMatrix m = identity(2);
    m(0, 1) = 1e-6;
    EXPECT_THROW(hermitian_eig(m), ValidationError);
    EXPECT_THROW(hermitian_eig(ComplexMatrix::Zero(2, 3)), ValidationError);
    m(0, 1) = 5e-11;  // within tolerance
    EXPECT_NO_THROW(hermitian_eig(m));
}

TEST(TraceNorm, zero_matrix) { EXPECT_EQ(trace_norm(ComplexMatrix::Zero(3, 3)), 0.0); }

TEST(TraceNorm, pure_state_difference) {
    const double expected = 2.0 * oracle::pure_trace_distance(to_oracle(ket0().amplitudes()),
                                                              to_oracle(ket_plus().amplitudes()));
    EXPECT_NEAR(expected, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(trace_norm(ket0().projector() - ket_plus().projector()), expected, 1e-14);
    EXPECT_NEAR(0.5 * trace_norm(ket0().projector() - ket_plus().projector()), 0.70711, 1e-5);
}

TEST(TraceNorm, hermitian_equals_sum_of_absolute_eigenvalues) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix g = random_matrix(3, 3, rng);
        const ComplexMatrix h = g + g.adjoint();
        double sum = 0.0;
        for (double x : hermitian_eig(h).values) {
            sum += std::abs(x);
        }
        EXPECT_NEAR(trace_norm(h), sum, 1e-12);
    }
    EXPECT_THROW(trace_norm(ComplexMatrix::Zero(2, 3)), ValidationError);
}

TEST(Gram, orthonormal_pair_and_overlap) {
    const std::vector<ComplexVector> pair{ket0().amplitudes(), ket1().amplitudes()};
    EXPECT_MATRIX_NEAR(gram(pair), identity(2), 0.0);
    const std::vector<ComplexVector> tilted{ket0().amplitudes(), ket_plus().amplitudes()};
    ComplexMatrix expected(2, 2);
    expected << 1, std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2, 1;
    EXPECT_MATRIX_NEAR(gram(tilted), expected, 1e-15);
}

TEST(Gram, bb84_gram_has_rank_two) {
    const std::vector<ComplexVector> quartet{ket0().amplitudes(), ket1().amplitudes(), ket_plus().amplitudes(),
                                             ket_minus().amplitudes()};
    const ComplexMatrix g = gram(quartet);
    std::vector<oracle::Vec> cols;
    for (Eigen::Index c = 0; c < 4; ++c) {
        cols.push_back(to_oracle(ComplexVector(g.col(c))));
    }
    EXPECT_EQ(oracle::gram_schmidt_rank(cols, 1e-9), 2u);
    std::vector<ComplexVector> eigen_cols;
    for (Eigen::Index c = 0; c < 4; ++c) {
        eigen_cols.emplace_back(g.col(c));
    }
    EXPECT_EQ(numeric_rank(eigen_cols).rank, 2u);
}

TEST(Gram, positive_semidefinite_and_errors) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ComplexVector> states;
        for (int k = 0; k < 1 + trial % 6; ++k) {
            states.push_back(haar_random_pure(3, rng));
        }
        EXPECT_GE(hermitian_eig(gram(states)).values.back(), -1e-10);
    }
    const std::vector<ComplexVector> mixed{ComplexVector::Zero(2), ComplexVector::Zero(3)};
    EXPECT_THROW(gram(mixed), ValidationError);
}

TEST(HaarRandomPure, dimension_one_is_canonical_one) {
    std::mt19937_64 rng(43);
    const ComplexVector v = haar_random_pure(1, rng);
    EXPECT_EQ(v.size(), 1);
    EXPECT_NEAR(v(0).real(), 1.0, 1e-15);
    EXPECT_EQ(v(0).imag(), 0.0);
}

TEST(HaarRandomPure, deterministic_given_seed) {
    std::mt19937_64 a(99);
    std::mt19937_64 b(99);
    EXPECT_EQ(haar_random_pure(4, a), haar_random_pure(4, b));
}

TEST(HaarRandomPure, mean_bloch_vector_is_near_origin) {
    std::mt19937_64 rng(47);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    const int samples = 10000;
    for (int k = 0; k < samples; ++k) {
        const ComplexVector v = haar_random_pure(2, rng);
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        const Complex coherence = std::conj(v(0)) * v(1);
        mean += Eigen::Vector3d(2 * coherence.real(), 2 * coherence.imag(), std::norm(v(0)) - std::norm(v(1)));
    }
    mean /= samples;
    EXPECT_LT(mean.norm(), 0.05);
}

TEST(HaarRandomPure, rejects_zero_dimension) {
    std::mt19937_64 rng(1);
    EXPECT_THROW(haar_random_pure(0, rng), ValidationError);
}

TEST(CanonicalizePhase, largest_entry_real_positive_with_tie_tolerance) {
    const ComplexVector minus = ket_minus().amplitudes() * std::polar(1.0, 2.0);
    const ComplexVector c = canonicalize_phase(minus);
    EXPECT_GT(c(0).real(), 0.0);
    EXPECT_EQ(c(0).imag(), 0.0);
    EXPECT_LE((c - ket_minus().amplitudes()).norm(), 1e-15);
}

TEST(PhaseAlignedDistance, ignores_global_phase) {
    std::mt19937_64 rng(53);
    const ComplexVector psi = haar_random_pure(3, rng);
    EXPECT_LE(phase_aligned_distance(psi, std::polar(1.0, 1.3) * psi), 1e-15);
    EXPECT_NEAR(phase_aligned_distance(ket0().amplitudes(), ket1().amplitudes()), std::sqrt(2.0), 1e-15);
}
