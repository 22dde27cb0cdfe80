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

// Single runs and parameter sweeps.
//
// Every unit of work is a pure function of (config, trial index). Trial 0
// uses the configured seed unchanged, so the first trial of every sweep point
// reproduces run_once exactly; later trials xor in a mixed trial index. The
// same trial index is used at every grid point, so each trial follows one
// random source across the whole sweep.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "dimbound/analysis.hpp"
#include "dimbound/errors.hpp"
#include "dimbound/harness/config.hpp"
#include "dimbound/harness/report.hpp"
#include "dimbound/protocol.hpp"

namespace dimbound::harness {

/// Separates the shot-sampling stream from the state-generation stream.
inline constexpr std::uint64_t kShotStream = 0x73686f7473ull;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    return trial == 0 ? seed : seed ^ splitmix64(static_cast<std::uint64_t>(trial));
}

/// Estimates p(j|i) from `shots` draws of each measurement i.
inline ProbabilityTable sample_probabilities(const ProbabilityTable& exact, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw ValidationError("sample_probabilities: shots must be at least 1");
    }
    std::mt19937_64 rng(splitmix64(seed ^ kShotStream));
    ProbabilityTable estimate{};
    for (std::size_t i = 0; i < 2; ++i) {
        const double p0 = std::clamp(exact[i][0], 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(shots, p0);
        const std::uint64_t zeros = draw(rng);
        estimate[i][0] = static_cast<double>(zeros) / static_cast<double>(shots);
        estimate[i][1] = static_cast<double>(shots - zeros) / static_cast<double>(shots);
    }
    return estimate;
}

/// Runs one trial of `config`. `shots` overrides config.sample_shots when set.
inline ReportDocument run_trial(const ScenarioConfig& config, int trial,
                                std::optional<std::uint64_t> shots = std::nullopt) {
    std::uint64_t state_seed = config.seed;
    if (const auto* r = std::get_if<RandomPureState>(&config.state); r && r->seed) {
        state_seed = *r->seed;
    }
    const PreparationScenario scenario = build_scenario(config, trial_seed(state_seed, trial));
    const SteeredEnsemble ensemble = run_preparation(scenario, config.tolerances.p_min);

    ReportDocument doc;
    doc.config_echo = config;
    doc.seed_used = trial_seed(config.seed, trial);
    doc.probabilities = ensemble.probabilities();
    if (!shots) {
        shots = config.sample_shots;
    }
    if (shots) {
        doc.probabilities = sample_probabilities(doc.probabilities, *shots, doc.seed_used);
        doc.probabilities_sampled = true;
        doc.report = analyze(ensemble, config.tolerances, &doc.probabilities);
    } else {
        doc.report = analyze(ensemble, config.tolerances);
    }
    return doc;
}

inline ReportDocument run_once(const ScenarioConfig& config) { return run_trial(config, 0); }

/// Grid point k of `steps` points spanning [from, to]; both ends are exact.
inline double grid_point(const SweepSpec& sweep, int k) {
    if (k == sweep.steps - 1) {
        return sweep.to;
    }
    return sweep.from + (sweep.to - sweep.from) * static_cast<double>(k) / static_cast<double>(sweep.steps - 1);
}

/// One record per (grid point, trial), ordered by point then trial.
inline std::vector<SweepRecord> run_sweep(const ScenarioConfig& config, const SweepSpec& sweep,
                                          unsigned threads = 0) {
    if (sweep.steps < 2) {
        throw ValidationError("sweep.steps must be at least 2");
    }
    if (sweep.trials_per_step < 1) {
        throw ValidationError("sweep.trials_per_step must be at least 1");
    }
    if (!(sweep.from <= sweep.to)) {
        throw ValidationError("sweep.from must not exceed sweep.to");
    }
    (void)with_parameter(config, sweep.parameter, sweep.from);

    const std::size_t total = static_cast<std::size_t>(sweep.steps) * static_cast<std::size_t>(sweep.trials_per_step);
    std::vector<SweepRecord> records(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t n = next++; n < total; n = next++) {
            const int point = static_cast<int>(n / static_cast<std::size_t>(sweep.trials_per_step));
            const int trial = static_cast<int>(n % static_cast<std::size_t>(sweep.trials_per_step));
            try {
                const double value = grid_point(sweep, point);
                const ScenarioConfig cfg = with_parameter(config, sweep.parameter, value);
                records[n] = to_record(run_trial(cfg, trial, sweep.sample_shots), value, trial);
            } catch (...) {
                errors[n] = std::current_exception();
            }
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return records;
}

}  // namespace dimbound::harness
