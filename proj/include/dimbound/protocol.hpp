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

// Remote preparation of four labeled states by steering.
//
// A bipartite state is split into boxes A1 and A2. Measurement i (one of two
// two-outcome measurements) is applied to A1; outcome j labels the state left
// in A2 as (i, j). Everything here is exact: outcome probabilities are
// computed, not sampled.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "dimbound/errors.hpp"
#include "dimbound/numerics.hpp"
#include "dimbound/quantum.hpp"

namespace dimbound {

/// Branches with probability below this carry no conditional state.
inline constexpr double kDefaultPMin = 1e-12;
inline constexpr double kNormalizationTol = 1e-10;

struct BranchLabel {
    int i = 0;  // measurement choice
    int j = 0;  // outcome

    constexpr std::size_t index() const { return static_cast<std::size_t>(2 * i + j); }
    friend constexpr bool operator==(const BranchLabel&, const BranchLabel&) = default;
};

inline constexpr std::array<BranchLabel, 4> kBranchLabels{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

inline std::string to_string(const BranchLabel& label) {
    return std::to_string(label.i) + "," + std::to_string(label.j);
}

/// p(j|i) stored as table[i][j].
using ProbabilityTable = std::array<std::array<double, 2>, 2>;

class PreparationScenario {
   public:
    PreparationScenario(DensityOperator state, TwoOutcomeMeasurement measurement0,
                        TwoOutcomeMeasurement measurement1, Eigen::Index dim_a, Eigen::Index dim_b)
        : state_(std::move(state)),
          measurements_{std::move(measurement0), std::move(measurement1)},
          dim_a_(dim_a),
          dim_b_(dim_b) {
        if (dim_a < 1 || dim_b < 1 || state_.dim() != dim_a * dim_b) {
            throw ValidationError("PreparationScenario: state dimension " + std::to_string(state_.dim()) +
                                  " does not equal dim_a * dim_b = " + std::to_string(dim_a * dim_b));
        }
        for (const auto& m : measurements_) {
            if (m.dim() != dim_a) {
                throw ValidationError("PreparationScenario: measurement acts on dimension " +
                                      std::to_string(m.dim()) + ", box A1 has dimension " + std::to_string(dim_a));
            }
        }
    }

    const DensityOperator& state() const { return state_; }
    const TwoOutcomeMeasurement& measurement(std::size_t i) const { return measurements_.at(i); }
    Eigen::Index dim_a() const { return dim_a_; }
    Eigen::Index dim_b() const { return dim_b_; }

   private:
    DensityOperator state_;
    std::array<TwoOutcomeMeasurement, 2> measurements_;
    Eigen::Index dim_a_;
    Eigen::Index dim_b_;
};

struct SteerResult {
    double probability = 0.0;
    std::optional<DensityOperator> conditional;  // empty when probability < p_min
    ComplexMatrix unnormalized;                  // tr_A1[(E (x) I) rho]
};

struct SteeredBranch {
    BranchLabel label;
    double probability = 0.0;
    std::optional<DensityOperator> conditional;
    ComplexMatrix unnormalized;

    bool defined() const { return conditional.has_value(); }
};

/// Measures `element` on box A1 of `state` and returns the outcome probability and the state left in A2.
inline SteerResult steer_branch(const DensityOperator& state, const ComplexMatrix& element, Eigen::Index dim_a,
                                Eigen::Index dim_b, double p_min = kDefaultPMin) {
    if (element.rows() != dim_a || element.cols() != dim_a || state.dim() != dim_a * dim_b) {
        throw ValidationError("steer_branch: dimension mismatch (element " + std::to_string(element.rows()) + "x" +
                              std::to_string(element.cols()) + ", state " + std::to_string(state.dim()) +
                              ", dim_a " + std::to_string(dim_a) + ", dim_b " + std::to_string(dim_b) + ")");
    }
    if (!is_hermitian(element, kStateTol)) {
        throw ValidationError("steer_branch: measurement element is not Hermitian");
    }
    const HermitianEigen spectrum = hermitian_eig(element);
    if (spectrum.values.back() < -kStateTol || spectrum.values.front() > 1.0 + kStateTol) {
        throw ValidationError("steer_branch: measurement element eigenvalues must lie in [0,1]");
    }

    SteerResult out;
    const ComplexMatrix lifted = kron(element, identity(dim_b)) * state.matrix();
    const ComplexMatrix reduced = partial_trace_first(lifted, dim_a, dim_b);
    out.unnormalized = (reduced + reduced.adjoint()) / 2.0;
    out.probability = std::max(out.unnormalized.trace().real(), 0.0);
    if (out.probability >= p_min) {
        try {
            out.conditional.emplace(out.unnormalized / out.probability);
        } catch (const ValidationError& e) {
            throw NumericalError(std::string("steer_branch: conditional state lost validity after normalization: ") +
                                 e.what());
        }
    }
    return out;
}

class SteeredEnsemble {
   public:
    /// Branches must be given in label order (0,0), (0,1), (1,0), (1,1).
    explicit SteeredEnsemble(std::array<SteeredBranch, 4> branches) : branches_(std::move(branches)) {
        for (std::size_t k = 0; k < 4; ++k) {
            if (!(branches_[k].label == kBranchLabels[k])) {
                throw ValidationError("SteeredEnsemble: branches out of label order");
            }
            if (!(branches_[k].probability >= 0.0)) {
                throw ValidationError("SteeredEnsemble: probability of branch (" + to_string(kBranchLabels[k]) +
                                      ") is negative");
            }
        }
        const Eigen::Index dim = branches_[0].unnormalized.rows();
        for (const auto& b : branches_) {
            if (b.unnormalized.rows() != dim || b.unnormalized.cols() != dim) {
                throw ValidationError("SteeredEnsemble: branch operators have mixed dimensions");
            }
        }
        for (int i = 0; i < 2; ++i) {
            const double total = branch(i, 0).probability + branch(i, 1).probability;
            if (std::abs(total - 1.0) > kNormalizationTol) {
                throw ValidationError("SteeredEnsemble: p(0|" + std::to_string(i) + ") + p(1|" + std::to_string(i) +
                                      ") = " + std::to_string(total) + ", expected 1");
            }
            averaged_[static_cast<std::size_t>(i)].emplace(branch(i, 0).unnormalized + branch(i, 1).unnormalized);
        }
    }

    /// Builds an ensemble from declared probabilities and states. This path does not
    /// enforce the no-signaling identity, so it can represent tampered sources.
    static SteeredEnsemble declared(const ProbabilityTable& probabilities,
                                    const std::array<std::optional<DensityOperator>, 4>& states,
                                    double p_min = kDefaultPMin) {
        Eigen::Index dim = 0;
        for (const auto& s : states) {
            if (s) {
                dim = s->dim();
            }
        }
        if (dim == 0) {
            throw ValidationError("SteeredEnsemble::declared: at least one state is required");
        }
        std::array<SteeredBranch, 4> branches;
        for (std::size_t k = 0; k < 4; ++k) {
            const BranchLabel label = kBranchLabels[k];
            const double p = probabilities[static_cast<std::size_t>(label.i)][static_cast<std::size_t>(label.j)];
            SteeredBranch& b = branches[k];
            b.label = label;
            b.probability = p;
            b.unnormalized = ComplexMatrix::Zero(dim, dim);
            if (states[k]) {
                if (states[k]->dim() != dim) {
                    throw ValidationError("SteeredEnsemble::declared: states have mixed dimensions");
                }
                b.unnormalized = p * states[k]->matrix();
                if (p >= p_min) {
                    b.conditional = states[k];
                }
            } else if (p >= p_min) {
                throw ValidationError("SteeredEnsemble::declared: branch (" + to_string(label) +
                                      ") has probability above p_min but no state");
            }
        }
        return SteeredEnsemble(std::move(branches));
    }

    const SteeredBranch& branch(int i, int j) const { return branches_.at(static_cast<std::size_t>(2 * i + j)); }
    const std::array<SteeredBranch, 4>& branches() const { return branches_; }
    const DensityOperator& averaged(int i) const { return *averaged_.at(static_cast<std::size_t>(i)); }
    Eigen::Index dim_b() const { return branches_[0].unnormalized.rows(); }

    ProbabilityTable probabilities() const {
        ProbabilityTable t{};
        for (const auto& b : branches_) {
            t[static_cast<std::size_t>(b.label.i)][static_cast<std::size_t>(b.label.j)] = b.probability;
        }
        return t;
    }

   private:
    std::array<SteeredBranch, 4> branches_;
    std::array<std::optional<DensityOperator>, 2> averaged_;
};

inline SteeredEnsemble run_preparation(const PreparationScenario& scenario, double p_min = kDefaultPMin) {
    std::array<SteeredBranch, 4> branches;
    for (std::size_t k = 0; k < 4; ++k) {
        const BranchLabel label = kBranchLabels[k];
        SteerResult r = steer_branch(scenario.state(),
                                     scenario.measurement(static_cast<std::size_t>(label.i))
                                         .element(static_cast<std::size_t>(label.j)),
                                     scenario.dim_a(), scenario.dim_b(), p_min);
        branches[k] = SteeredBranch{label, r.probability, std::move(r.conditional), std::move(r.unnormalized)};
    }
    return SteeredEnsemble(std::move(branches));
}

/// sum_j p(j|i) rho_{i,j}; equals tr_A1 of the source state for protocol-generated ensembles.
inline const DensityOperator& average_state(const SteeredEnsemble& ensemble, int i) { return ensemble.averaged(i); }

inline DensityOperator product_state(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator(kron(a.matrix(), b.matrix()));
}

/// The Bell-state source with M_0, M_1, perturbed by one catalog noise model.
inline PreparationScenario bb84_scenario(const NoiseSpec& noise = {}) {
    noise.validate();
    auto [m0, m1] = bb84_measurements();
    switch (noise.kind) {
        case NoiseKind::none:
            return {DensityOperator::from_pure(bell_phi_plus()), m0, m1, 2, 2};
        case NoiseKind::werner:
            return {werner_state(noise.parameters[0]), m0, m1, 2, 2};
        case NoiseKind::tilted_measurement:
            return {DensityOperator::from_pure(bell_phi_plus()), m0, tilted_measurement(noise.parameters[0]), 2, 2};
        case NoiseKind::local_unitary: {
            const ComplexMatrix u = kron(identity(2), y_rotation(noise.parameters[0]));
            return {DensityOperator::from_pure(PureState::normalized(u * bell_phi_plus().amplitudes())), m0, m1, 2,
                    2};
        }
        case NoiseKind::custom:
            break;
    }
    throw ValidationError("bb84_scenario: custom noise must be supplied as an explicit PreparationScenario");
}

}  // namespace dimbound
