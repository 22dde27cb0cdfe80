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

// Dimension analysis of a steered ensemble.
//
// When all four steered states |i,j> are pure, the no-signaling identity
//
//   p(0|0)|0,0><0,0| + p(1|0)|0,1><0,1| = p(0|1)|1,0><1,0| + p(1|1)|1,1><1,1|
//
// applied to |(1,1)perp> = |1,0> - <1,1|1,0>|1,1> expresses |1,0> (and by
// symmetry |1,1>) as a combination of |0,0> and |0,1>. The quartet therefore
// spans at most two dimensions. When |<1,1|1,0>| = 1 the source is a product
// state and all four states coincide.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dimbound/errors.hpp"
#include "dimbound/numerics.hpp"
#include "dimbound/protocol.hpp"
#include "dimbound/quantum.hpp"

namespace dimbound {

struct Tolerances {
    double rank_rel_tol = kDefaultRankRelTol;
    double purity_tol = kDefaultPurityTol;
    double nosignal_tol = 1e-11;
    double degenerate_tol = 1e-9;
    double p_min = kDefaultPMin;
};

/// Pairwise fidelity above 1 - this counts as "identical" in the degenerate report.
inline constexpr double kIdenticalTol = 1e-9;

enum class WitnessBranch { generic, degenerate, vacuous };

inline const char* to_string(WitnessBranch b) {
    switch (b) {
        case WitnessBranch::generic:
            return "generic";
        case WitnessBranch::degenerate:
            return "degenerate";
        case WitnessBranch::vacuous:
            return "vacuous";
    }
    return "?";
}

/// Reconstruction of |1,0> (or |1,1>) from the i = 0 states.
struct SpanWitness {
    BranchLabel target;
    WitnessBranch branch = WitnessBranch::generic;
    ComplexVector perp_state;  // unnormalized
    Complex coeff_00{};
    Complex coeff_01{};
    std::optional<PureState> reconstructed;  // generic branch only
    std::optional<double> residual;          // generic branch only
};

struct DegenerateReport {
    double overlap_sq = 0.0;
    std::optional<double> theta;
    bool all_identical = false;
};

struct DimensionReport {
    double nosignal_residual = 0.0;
    bool nosignal_satisfied = false;
    std::array<std::optional<double>, 4> purities;  // empty for vacuous branches
    bool all_pure = false;
    std::vector<BranchLabel> excluded;  // vacuous branches left out of the quartet
    std::optional<std::size_t> span_rank;
    std::optional<std::array<SpanWitness, 2>> witnesses;
    std::optional<DegenerateReport> degenerate;
    std::optional<bool> usd_feasible;
    std::optional<std::array<std::optional<double>, 4>> bb84_fidelities;
};

/// The four steered pure states. Vacuous branches hold no state.
struct PureQuartet {
    std::array<std::optional<PureState>, 4> states;
    ProbabilityTable probabilities{};
    Eigen::Index dim = 0;

    const std::optional<PureState>& at(int i, int j) const { return states[static_cast<std::size_t>(2 * i + j)]; }

    /// Amplitudes of branch (i, j), or the zero vector for a vacuous branch.
    ComplexVector vector(int i, int j) const {
        const auto& s = at(i, j);
        return s ? s->amplitudes() : ComplexVector(ComplexVector::Zero(dim));
    }

    std::vector<ComplexVector> defined_vectors() const {
        std::vector<ComplexVector> out;
        for (const auto& s : states) {
            if (s) {
                out.push_back(s->amplitudes());
            }
        }
        return out;
    }
};

/// Half the trace norm of averaged(0) - averaged(1).
inline double nosignaling_residual(const SteeredEnsemble& ensemble) {
    return 0.5 * trace_norm(ensemble.averaged(0).matrix() - ensemble.averaged(1).matrix());
}

/// |1,0> - <1,1|1,0> |1,1>, orthogonal to s11.
inline ComplexVector perp_state(const ComplexVector& s10, const ComplexVector& s11) {
    if (s10.size() != s11.size()) {
        throw ValidationError("perp_state: dimension mismatch");
    }
    return s10 - s11.dot(s10) * s11;
}

/// Extracts the pure quartet; nullopt if any defined branch is mixed beyond purity_tol.
inline std::optional<PureQuartet> pure_quartet(const SteeredEnsemble& ensemble, double purity_tol = kDefaultPurityTol) {
    PureQuartet q;
    q.dim = ensemble.dim_b();
    q.probabilities = ensemble.probabilities();
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& b = ensemble.branches()[k];
        if (!b.defined()) {
            continue;
        }
        if (!is_pure(*b.conditional, purity_tol)) {
            return std::nullopt;
        }
        q.states[k] = dominant_pure_component(*b.conditional).state;
    }
    return q;
}

namespace detail {

/// Shared body of the two reconstructions. `target_j` selects |1,target_j>;
/// the other i = 1 state is the one projected out.
inline SpanWitness reconstruct_from_first_pair(const PureQuartet& q, int target_j, const Tolerances& tol,
                                               const ProbabilityTable* prefactors) {
    const ProbabilityTable& p = prefactors ? *prefactors : q.probabilities;
    SpanWitness w;
    w.target = BranchLabel{1, target_j};
    const ComplexVector target = q.vector(1, target_j);
    const ComplexVector other = q.vector(1, 1 - target_j);
    w.perp_state = perp_state(target, other);

    const double overlap_sq = std::min(std::norm(other.dot(target)), 1.0);
    const double gap = 1.0 - overlap_sq;
    const double denominator_weight = p[1][static_cast<std::size_t>(target_j)];
    if (denominator_weight < tol.p_min || !q.at(1, target_j)) {
        w.branch = WitnessBranch::vacuous;
        return w;
    }
    if (overlap_sq >= 1.0 - tol.degenerate_tol) {
        w.branch = WitnessBranch::degenerate;
        return w;
    }
    w.coeff_00 = p[0][0] * q.vector(0, 0).dot(w.perp_state);
    w.coeff_01 = p[0][1] * q.vector(0, 1).dot(w.perp_state);
    const ComplexVector combination =
        (w.coeff_00 * q.vector(0, 0) + w.coeff_01 * q.vector(0, 1)) / (denominator_weight * gap);
    if (!(combination.norm() > 0.0) || !combination.allFinite()) {
        throw NumericalError("reconstruction produced a zero or non-finite vector for target (" +
                             to_string(w.target) + ")");
    }
    w.reconstructed = PureState::normalized(combination);
    w.residual = phase_aligned_distance(w.reconstructed->amplitudes(), target);
    return w;
}

}  // namespace detail

/// Expresses |1,0> through |0,0> and |0,1>. `prefactors` replaces p(j|i) when
/// probabilities are estimated from samples.
inline SpanWitness reconstruct_1_0(const PureQuartet& quartet, const Tolerances& tol = {},
                                   const ProbabilityTable* prefactors = nullptr) {
    return detail::reconstruct_from_first_pair(quartet, 0, tol, prefactors);
}

/// Expresses |1,1> through |0,0> and |0,1>, projecting out |1,0>.
inline SpanWitness reconstruct_1_1(const PureQuartet& quartet, const Tolerances& tol = {},
                                   const ProbabilityTable* prefactors = nullptr) {
    return detail::reconstruct_from_first_pair(quartet, 1, tol, prefactors);
}

/// Inputs are unit vectors; they are not re-canonicalized, so a relative phase
/// between s10 and s11 shows up in theta.
inline DegenerateReport degenerate_analysis(const ComplexVector& s10, const ComplexVector& s11,
                                            std::span<const ComplexVector> quartet,
                                            double degenerate_tol = 1e-9) {
    if (s10.size() != s11.size()) {
        throw ValidationError("degenerate_analysis: dimension mismatch");
    }
    DegenerateReport r;
    const Complex overlap = s10.dot(s11);
    r.overlap_sq = std::min(std::norm(overlap), 1.0);
    if (r.overlap_sq >= 1.0 - degenerate_tol) {
        r.theta = std::arg(overlap);
    }
    r.all_identical = !quartet.empty();
    for (std::size_t a = 0; a < quartet.size() && r.all_identical; ++a) {
        for (std::size_t b = a + 1; b < quartet.size(); ++b) {
            if (std::norm(quartet[a].dot(quartet[b])) < 1.0 - kIdenticalTol) {
                r.all_identical = false;
                break;
            }
        }
    }
    return r;
}

inline std::size_t span_rank(std::span<const ComplexVector> quartet, double rel_tol = kDefaultRankRelTol) {
    return numeric_rank(quartet, rel_tol).rank;
}

/// Unambiguous discrimination is possible iff the states are linearly independent.
inline bool usd_feasible(std::span<const ComplexVector> states, double rel_tol = kDefaultRankRelTol) {
    if (states.size() < 2) {
        throw ValidationError("usd_feasible: at least two states are required");
    }
    return numeric_rank(states, rel_tol).rank == states.size();
}

inline std::array<PureState, 4> bb84_targets() { return {ket0(), ket1(), ket_plus(), ket_minus()}; }

/// Fidelity of each defined branch against |0>, |1>, |+>, |->.
inline std::array<std::optional<double>, 4> bb84_fidelities(const SteeredEnsemble& ensemble,
                                                            double purity_tol = kDefaultPurityTol) {
    if (ensemble.dim_b() != 2) {
        throw ValidationError("bb84_fidelities: comparison with qubit targets needs dim_b = 2, got " +
                              std::to_string(ensemble.dim_b()));
    }
    const auto targets = bb84_targets();
    std::array<std::optional<double>, 4> out;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& b = ensemble.branches()[k];
        if (b.defined()) {
            out[k] = fidelity(*b.conditional, DensityOperator::from_pure(targets[k]), purity_tol);
        }
    }
    return out;
}

/// Full report. `prefactors`, when given, are estimated probabilities used in the
/// reconstruction coefficients only.
inline DimensionReport analyze(const SteeredEnsemble& ensemble, const Tolerances& tol = {},
                               const ProbabilityTable* prefactors = nullptr) {
    DimensionReport r;
    r.nosignal_residual = nosignaling_residual(ensemble);
    r.nosignal_satisfied = r.nosignal_residual <= tol.nosignal_tol;

    r.all_pure = true;
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& b = ensemble.branches()[k];
        if (!b.defined()) {
            r.excluded.push_back(b.label);
            continue;
        }
        r.purities[k] = purity(*b.conditional);
        if (*r.purities[k] < 1.0 - tol.purity_tol) {
            r.all_pure = false;
        }
    }
    if (ensemble.dim_b() == 2) {
        r.bb84_fidelities = bb84_fidelities(ensemble, tol.purity_tol);
    }
    if (!r.all_pure) {
        return r;
    }

    const auto quartet = pure_quartet(ensemble, tol.purity_tol);
    if (!quartet) {
        throw NumericalError("analyze: purity classification disagreed with quartet extraction");
    }
    const std::vector<ComplexVector> vectors = quartet->defined_vectors();
    r.span_rank = span_rank(vectors, tol.rank_rel_tol);
    r.usd_feasible = usd_feasible(vectors, tol.rank_rel_tol);
    r.degenerate = degenerate_analysis(quartet->vector(1, 0), quartet->vector(1, 1), vectors, tol.degenerate_tol);
    r.witnesses = std::array<SpanWitness, 2>{reconstruct_1_0(*quartet, tol, prefactors),
                                             reconstruct_1_1(*quartet, tol, prefactors)};
    return r;
}

}  // namespace dimbound
