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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "dimbound/analysis.hpp"
#include "dimbound/harness/config.hpp"
#include "dimbound/harness/report.hpp"
#include "dimbound/harness/runner.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace dimbound;
using namespace dimbound::harness;
using namespace dimbound::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string scenario_path(const char* name) { return std::string(DIMBOUND_SCENARIO_DIR) + "/" + name; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared population for the span, rank and USD criteria.
struct PureTrial {
    DimensionReport report;
};

const std::vector<PureTrial>& pure_population(double* elapsed = nullptr) {
    static std::vector<PureTrial> trials;
    static double seconds = 0.0;
    if (trials.empty()) {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(20260301);
        for (int t = 0; t < 500; ++t) {
            trials.push_back({analyze(run_preparation(random_pure_qubit_scenario(rng)))});
        }
        seconds = seconds_since(t0);
    }
    if (elapsed) {
        *elapsed = seconds;
    }
    return trials;
}

Outcome ideal_reproduction() {
    const auto t0 = std::chrono::steady_clock::now();
    const ReportDocument doc = run_once(load_scenario(scenario_path("ideal.yaml")));
    const double elapsed = seconds_since(t0);
    double worst_p = 0.0;
    for (const auto& row : doc.probabilities) {
        for (double p : row) {
            worst_p = std::max(worst_p, std::abs(p - 0.5));
        }
    }
    double worst_f = 0.0;
    bool all_defined = doc.report.bb84_fidelities.has_value();
    if (all_defined) {
        for (const auto& f : *doc.report.bb84_fidelities) {
            all_defined = all_defined && f.has_value();
            worst_f = std::max(worst_f, f ? 1.0 - *f : 1.0);
        }
    }
    // Wall time of the CLI end to end, process start-up included.
    const auto t1 = std::chrono::steady_clock::now();
    const std::string cmd = std::string("\"") + DIMBOUND_CLI + "\" run --scenario \"" + scenario_path("ideal.yaml") +
                            "\" > /dev/null";
    const bool cli_ok = std::system(cmd.c_str()) == 0;
    const double cli_elapsed = seconds_since(t1);
    return {all_defined && cli_ok && worst_p <= 1e-12 && worst_f <= 1e-12 && elapsed < 1.0 && cli_elapsed < 1.0,
            "max |p-0.5| = " + fmt(worst_p) + ", max 1-F = " + fmt(worst_f) + ", " + fmt(elapsed) +
                " s in process, " + fmt(cli_elapsed) + " s via CLI"};
}

Outcome no_signaling() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20260302);
    double worst = 0.0;
    int count = 0;
    for (int rep = 0; rep < 112; ++rep) {
        for (Eigen::Index da = 2; da <= 4; ++da) {
            for (Eigen::Index db = 2; db <= 4; ++db) {
                // Alternate Haar-random pure sources and Ginibre mixed sources.
                const DensityOperator rho = rep % 2 == 0
                                                ? DensityOperator::from_pure(
                                                      PureState::normalized(haar_random_pure(da * db, rng)))
                                                : random_density(da * db, rng);
                const PreparationScenario sc(rho, random_two_outcome_povm(da, rng), random_two_outcome_povm(da, rng),
                                             da, db);
                worst = std::max(worst, nosignaling_residual(run_preparation(sc)));
                ++count;
            }
        }
    }
    const double elapsed = seconds_since(t0);
    return {count >= 1000 && worst <= 1e-11 && elapsed < 30.0,
            std::to_string(count) + " scenarios, max residual = " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

Outcome span_identity() {
    double elapsed = 0.0;
    const auto& trials = pure_population(&elapsed);
    double worst = 0.0;
    int generic = 0;
    bool ok = true;
    for (const auto& t : trials) {
        if (!t.report.all_pure) {
            ok = false;
            continue;
        }
        if (t.report.degenerate->theta) {
            continue;
        }
        ++generic;
        for (const SpanWitness& w : *t.report.witnesses) {
            if (w.branch != WitnessBranch::generic || !w.residual) {
                ok = false;
                continue;
            }
            worst = std::max(worst, *w.residual);
        }
    }
    return {ok && generic > 0 && worst <= 1e-9 && elapsed < 30.0,
            std::to_string(generic) + "/" + std::to_string(trials.size()) +
                " non-degenerate trials, max residual = " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

Outcome rank_theorem() {
    const auto& trials = pure_population();
    int bounded = 0;
    for (const auto& t : trials) {
        bounded += t.report.span_rank && *t.report.span_rank <= 2 ? 1 : 0;
    }
    std::mt19937_64 rng(20260304);
    int full = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<ComplexVector> v;
        for (int k = 0; k < 4; ++k) {
            v.push_back(haar_random_pure(4, rng));
        }
        full += span_rank(v) == 4 ? 1 : 0;
    }
    return {bounded == static_cast<int>(trials.size()) && full >= 99,
            "rank <= 2 in " + std::to_string(bounded) + "/" + std::to_string(trials.size()) +
                ", control rank 4 in " + std::to_string(full) + "/100"};
}

Outcome usd_corollary() {
    const auto& trials = pure_population();
    int infeasible = 0;
    for (const auto& t : trials) {
        infeasible += t.report.usd_feasible && !*t.report.usd_feasible ? 1 : 0;
    }
    const bool control =
        usd_feasible(std::vector<ComplexVector>{ket0().amplitudes(), ket_plus().amplitudes()});
    return {infeasible == static_cast<int>(trials.size()) && control,
            "infeasible in " + std::to_string(infeasible) + "/" + std::to_string(trials.size()) +
                ", {|0>,|+>} feasible = " + (control ? "true" : "false")};
}

Outcome degenerate_branch() {
    bool ok = true;
    const ReportDocument doc = run_once(load_scenario(scenario_path("product.yaml")));
    const DimensionReport& shipped = doc.report;
    ok = ok && shipped.degenerate && shipped.degenerate->all_identical && shipped.span_rank == 1u;

    std::mt19937_64 rng(20260306);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    double worst_theta = 0.0;
    int identical = 0;
    for (int t = 0; t < 20; ++t) {
        // Constructed pair s11 = e^{i theta} s10.
        const ComplexVector s10 = haar_random_pure(2, rng);
        const double theta = angle(rng);
        const ComplexVector s11 = std::polar(1.0, theta) * s10;
        const std::vector<ComplexVector> quartet{s10, s10, s10, s11};
        const DegenerateReport d = degenerate_analysis(s10, s11, quartet);
        if (!d.theta) {
            ok = false;
            continue;
        }
        worst_theta = std::max(worst_theta, std::abs(std::remainder(*d.theta - theta, 2 * std::numbers::pi)));

        // Product source built from random factors.
        const auto a = random_density(2, rng);
        const auto psi = PureState::normalized(haar_random_pure(2, rng));
        const auto [m0, m1] = bb84_measurements();
        const DimensionReport r =
            analyze(run_preparation({product_state(a, DensityOperator::from_pure(psi)), m0, m1, 2, 2}));
        identical += r.degenerate && r.degenerate->all_identical && r.span_rank == 1u ? 1 : 0;
    }
    ok = ok && worst_theta <= 1e-9 && identical == 20;
    return {ok, std::string("shipped product config identical/rank 1 = ") +
                    (shipped.degenerate && shipped.degenerate->all_identical && shipped.span_rank == 1u ? "yes" : "no") +
                    ", max theta error = " + fmt(worst_theta) + ", product sources identical " +
                    std::to_string(identical) + "/20"};
}

Outcome werner_sweep() {
    const ScenarioConfig c = load_scenario(scenario_path("werner_sweep.yaml"));
    const auto records = run_sweep(c, *c.sweep);
    // Direct density-matrix computation of each steered branch.
    const std::array<oracle::Vec, 4> targets{oracle::Vec{1.0, 0.0}, oracle::Vec{0.0, 1.0},
                                             oracle::Vec{std::sqrt(0.5), std::sqrt(0.5)},
                                             oracle::Vec{std::sqrt(0.5), -std::sqrt(0.5)}};
    double worst_pur = 0.0;
    double worst_fid = 0.0;
    bool ok = records.size() == 11;
    for (const SweepRecord& r : records) {
        const double v = *r.param;
        for (std::size_t b = 0; b < 4; ++b) {
            const oracle::Mat unnorm = oracle::steer_unnormalized(oracle::werner(v), oracle::projector(targets[b]), 2, 2);
            const double p = oracle::trace(unnorm).real();
            oracle::Mat cond = unnorm;
            for (auto& row : cond) {
                for (auto& z : row) {
                    z /= p;
                }
            }
            const double pur = oracle::purity(cond);
            const double fid = oracle::expectation(cond, targets[b]);
            if (std::abs(pur - (1 + v * v) / 2) > 1e-12 || std::abs(fid - (1 + v) / 2) > 1e-12 || !r.purities[b] ||
                !r.fidelities || !(*r.fidelities)[b]) {
                ok = false;
                continue;
            }
            worst_pur = std::max(worst_pur, std::abs(*r.purities[b] - pur));
            worst_fid = std::max(worst_fid, std::abs(*(*r.fidelities)[b] - fid));
        }
    }
    return {ok && worst_pur <= 1e-9 && worst_fid <= 1e-9,
            std::to_string(records.size()) + " points, max purity error = " + fmt(worst_pur) +
                ", max fidelity error = " + fmt(worst_fid)};
}

Outcome finite_statistics() {
    const ScenarioConfig c = load_scenario(scenario_path("shots.yaml"));
    const ReportDocument a = run_once(c);
    const ReportDocument b = run_once(c);
    double worst = 0.0;
    for (const auto& row : a.probabilities) {
        for (double p : row) {
            worst = std::max(worst, std::abs(p - 0.5));
        }
    }
    const bool same = a.probabilities == b.probabilities;
    return {a.probabilities_sampled && c.sample_shots == 1000000u && worst <= 0.002 && same,
            "max |p_hat-0.5| = " + fmt(worst) + ", reproducible = " + (same ? "yes" : "no")};
}

std::string slurp(const std::filesystem::path& p) { return read_file(p.string()); }

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("dimbound_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    struct Invocation {
        const char* command;
        const char* scenario;
        const char* extra;
    };
    const Invocation runs[] = {
        {"run", "ideal.yaml", ""},
        {"run", "shots.yaml", ""},
        {"run", "random_pure.yaml", " --seed 31"},
        {"sweep", "werner_sweep.yaml", ""},
        {"sweep", "random_pure.yaml", ""},
        {"sweep", "tilt_sweep.yaml", " --format structured"},
    };
    int identical = 0;
    int total = 0;
    std::string failure;
    for (const Invocation& inv : runs) {
        std::string outputs[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = dir / (std::string(inv.command) + "_" + inv.scenario + "_" + std::to_string(k));
            const std::string cmd = std::string("\"") + DIMBOUND_CLI + "\" " + inv.command + " --scenario \"" +
                                    scenario_path(inv.scenario) + "\" --out \"" + out.string() + "\"" + inv.extra;
            if (std::system(cmd.c_str()) != 0) {
                failure = cmd;
            }
            outputs[k] = fs::exists(out) ? slurp(out) : std::string();
        }
        ++total;
        identical += !outputs[0].empty() && outputs[0] == outputs[1] ? 1 : 0;
    }
    fs::remove_all(dir);
    return {failure.empty() && identical == total,
            std::to_string(identical) + "/" + std::to_string(total) + " invocations byte-identical" +
                (failure.empty() ? "" : ", failed: " + failure)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1 ideal reproduction", ideal_reproduction},
        {"2 no-signaling over random scenarios", no_signaling},
        {"3 span identity", span_identity},
        {"4 rank bound and negative control", rank_theorem},
        {"5 USD infeasibility", usd_corollary},
        {"6 degenerate branch", degenerate_branch},
        {"7 werner sweep oracle", werner_sweep},
        {"8 finite statistics", finite_statistics},
        {"9 determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        failures += o.pass ? 0 : 1;
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
