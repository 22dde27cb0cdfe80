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

// Scenario files.
//
//   state: bell
//   state: {werner: {v: 0.9}}                      # or {werner: 0.9}
//   state: {product: {a: [1, 0], b: [[0.6, 0], [0, 0.8]]}}
//   state: {random_pure: {seed: 7, dim_a: 2, dim_b: 2}}
//   state: {explicit: {matrix: [[...]], dim_a: 2, dim_b: 2}}   # or {explicit: [[...]]}
//   measurements: [computational, hadamard]
//   measurements: [computational, {tilted: {alpha: 0.7}}]    # or {tilted: 0.7}
//   measurements: [{explicit: [E0, E1]}, hadamard]
//   tolerances: {rank_rel_tol: 1e-9, purity_tol: 1e-9, nosignal_tol: 1e-11,
//                degenerate_tol: 1e-9, p_min: 1e-12}
//   seed: 42
//   sample_shots: 1000000
//   sweep: {parameter: state.werner.v, from: 0, to: 1, steps: 11,
//           trials_per_step: 1, sample_shots: 1000}
//
// Complex entries are either a real number or a [re, im] pair. Matrices are
// row-major nested lists. Unknown keys are rejected.

#include <yaml-cpp/yaml.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

#include "dimbound/analysis.hpp"
#include "dimbound/errors.hpp"
#include "dimbound/harness/yaml_emit.hpp"
#include "dimbound/numerics.hpp"
#include "dimbound/protocol.hpp"
#include "dimbound/quantum.hpp"

namespace dimbound::harness {

struct BellState {};
struct WernerState {
    double v = 1.0;
};
struct ProductState {
    ComplexVector a;
    ComplexVector b;
};
struct RandomPureState {
    std::optional<std::uint64_t> seed;  // falls back to the run seed
    Eigen::Index dim_a = 2;
    Eigen::Index dim_b = 2;
};
struct ExplicitState {
    ComplexMatrix matrix;
    Eigen::Index dim_a = 2;
    Eigen::Index dim_b = 2;
};
using StateSpec = std::variant<BellState, WernerState, ProductState, RandomPureState, ExplicitState>;

struct ComputationalBasis {};
struct HadamardBasis {};
struct TiltedBasis {
    double alpha = 0.0;
};
struct ExplicitMeasurement {
    ComplexMatrix element0;
    ComplexMatrix element1;
};
using MeasurementSpec = std::variant<ComputationalBasis, HadamardBasis, TiltedBasis, ExplicitMeasurement>;

struct SweepSpec {
    std::string parameter;
    double from = 0.0;
    double to = 0.0;
    int steps = 2;
    int trials_per_step = 1;
    std::optional<std::uint64_t> sample_shots;  // overrides the scenario's sample_shots
};

struct ScenarioConfig {
    StateSpec state = BellState{};
    std::array<MeasurementSpec, 2> measurements{ComputationalBasis{}, HadamardBasis{}};
    Tolerances tolerances;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> sample_shots;
    std::optional<SweepSpec> sweep;
};

namespace detail {

inline std::string where(const YAML::Node& node) {
    const YAML::Mark mark = node.Mark();
    if (mark.is_null()) {
        return "";
    }
    return "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + ": ";
}

[[noreturn]] inline void fail(const YAML::Node& node, const std::string& message) {
    throw ParseError(where(node) + message);
}

inline void require_keys(const YAML::Node& node, std::string_view context, std::initializer_list<std::string_view> allowed) {
    if (!node.IsMap()) {
        fail(node, std::string(context) + " must be a mapping");
    }
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        bool known = false;
        for (std::string_view a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            fail(kv.first, "unknown key '" + key + "' in " + std::string(context));
        }
    }
}

inline double as_real(const YAML::Node& node, std::string_view field) {
    if (!node.IsScalar()) {
        fail(node, std::string(field) + " must be a number");
    }
    double x = 0.0;
    if (!YAML::convert<double>::decode(node, x) || !std::isfinite(x)) {
        fail(node, std::string(field) + " must be a finite number, got '" + node.Scalar() + "'");
    }
    return x;
}

inline std::uint64_t as_u64(const YAML::Node& node, std::string_view field) {
    if (!node.IsScalar()) {
        fail(node, std::string(field) + " must be a non-negative integer");
    }
    const std::string& text = node.Scalar();
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        fail(node, std::string(field) + " must be a non-negative integer, got '" + text + "'");
    }
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        fail(node, std::string(field) + " is out of range");
    }
}

inline int as_int(const YAML::Node& node, std::string_view field) {
    const std::uint64_t x = as_u64(node, field);
    if (x > 1u << 30) {
        fail(node, std::string(field) + " is out of range");
    }
    return static_cast<int>(x);
}

inline Complex as_complex(const YAML::Node& node, std::string_view field) {
    if (node.IsScalar()) {
        return {as_real(node, field), 0.0};
    }
    if (node.IsSequence() && node.size() == 2) {
        return {as_real(node[0], field), as_real(node[1], field)};
    }
    fail(node, std::string(field) + " entries must be a number or an [re, im] pair");
}

inline ComplexVector as_vector(const YAML::Node& node, std::string_view field) {
    if (!node.IsSequence() || node.size() == 0) {
        fail(node, std::string(field) + " must be a non-empty list");
    }
    ComplexVector v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t k = 0; k < node.size(); ++k) {
        v(static_cast<Eigen::Index>(k)) = as_complex(node[k], field);
    }
    return v;
}

inline ComplexMatrix as_matrix(const YAML::Node& node, std::string_view field) {
    if (!node.IsSequence() || node.size() == 0) {
        fail(node, std::string(field) + " must be a non-empty list of rows");
    }
    const std::size_t rows = node.size();
    std::size_t cols = 0;
    ComplexMatrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        const YAML::Node row = node[r];
        if (!row.IsSequence() || row.size() == 0) {
            fail(row, std::string(field) + " rows must be non-empty lists");
        }
        if (r == 0) {
            cols = row.size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            fail(row, std::string(field) + " rows have unequal lengths");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_complex(row[c], field);
        }
    }
    return m;
}

/// A tagged value is either a bare word or a single-key mapping {tag: body}.
inline std::pair<std::string, YAML::Node> tag_of(const YAML::Node& node, std::string_view field) {
    if (node.IsScalar()) {
        return {node.Scalar(), YAML::Node()};
    }
    if (node.IsMap() && node.size() == 1) {
        const auto it = node.begin();
        return {it->first.as<std::string>(), it->second};
    }
    fail(node, std::string(field) + " must be a name or a single-key mapping");
}

inline Eigen::Index integral_sqrt(Eigen::Index n) {
    const auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    return r * r == n ? r : 0;
}

inline StateSpec parse_state(const YAML::Node& node) {
    const auto [tag, body] = tag_of(node, "state");
    if (tag == "bell") {
        if (body.IsDefined() && !body.IsNull()) {
            fail(node, "state 'bell' takes no parameters");
        }
        return BellState{};
    }
    if (tag == "werner") {
        WernerState w;
        if (body.IsMap()) {
            require_keys(body, "state.werner", {"v"});
            if (!body["v"]) {
                fail(body, "state.werner requires 'v'");
            }
            w.v = as_real(body["v"], "state.werner.v");
        } else {
            w.v = as_real(body, "state.werner.v");
        }
        return w;
    }
    if (tag == "product") {
        require_keys(body, "state.product", {"a", "b"});
        if (!body["a"] || !body["b"]) {
            fail(body, "state.product requires 'a' and 'b'");
        }
        return ProductState{as_vector(body["a"], "state.product.a"), as_vector(body["b"], "state.product.b")};
    }
    if (tag == "random_pure") {
        RandomPureState r;
        if (body.IsDefined() && !body.IsNull()) {
            require_keys(body, "state.random_pure", {"seed", "dim_a", "dim_b"});
            if (body["seed"]) {
                r.seed = as_u64(body["seed"], "state.random_pure.seed");
            }
            if (body["dim_a"]) {
                r.dim_a = as_int(body["dim_a"], "state.random_pure.dim_a");
            }
            if (body["dim_b"]) {
                r.dim_b = as_int(body["dim_b"], "state.random_pure.dim_b");
            }
        }
        return r;
    }
    if (tag == "explicit") {
        ExplicitState e;
        if (body.IsMap()) {
            require_keys(body, "state.explicit", {"matrix", "dim_a", "dim_b"});
            if (!body["matrix"]) {
                fail(body, "state.explicit requires 'matrix'");
            }
            e.matrix = as_matrix(body["matrix"], "state.explicit.matrix");
            const Eigen::Index side = integral_sqrt(e.matrix.rows());
            e.dim_a = body["dim_a"] ? as_int(body["dim_a"], "state.explicit.dim_a") : side;
            e.dim_b = body["dim_b"] ? as_int(body["dim_b"], "state.explicit.dim_b") : side;
        } else {
            e.matrix = as_matrix(body, "state.explicit");
            e.dim_a = e.dim_b = integral_sqrt(e.matrix.rows());
        }
        if (e.dim_a < 1 || e.dim_b < 1) {
            fail(node, "state.explicit: cannot infer dim_a and dim_b; give them explicitly");
        }
        return e;
    }
    fail(node, "unknown state kind '" + tag + "' (expected bell, werner, product, random_pure or explicit)");
}

inline MeasurementSpec parse_measurement(const YAML::Node& node, std::size_t index) {
    const std::string field = "measurements[" + std::to_string(index) + "]";
    const auto [tag, body] = tag_of(node, field);
    if (tag == "computational") {
        return ComputationalBasis{};
    }
    if (tag == "hadamard") {
        return HadamardBasis{};
    }
    if (tag == "tilted") {
        if (body.IsMap()) {
            require_keys(body, field + ".tilted", {"alpha"});
            if (!body["alpha"]) {
                fail(body, field + ".tilted requires 'alpha'");
            }
            return TiltedBasis{as_real(body["alpha"], field + ".tilted.alpha")};
        }
        return TiltedBasis{as_real(body, field + ".tilted.alpha")};
    }
    if (tag == "explicit") {
        if (!body.IsSequence() || body.size() != 2) {
            fail(node, field + ".explicit must be a list of two matrices");
        }
        return ExplicitMeasurement{as_matrix(body[0], field + ".explicit[0]"),
                                   as_matrix(body[1], field + ".explicit[1]")};
    }
    fail(node, "unknown measurement kind '" + tag + "' (expected computational, hadamard, tilted or explicit)");
}

inline SweepSpec parse_sweep(const YAML::Node& node) {
    require_keys(node, "sweep", {"parameter", "from", "to", "steps", "trials_per_step", "sample_shots"});
    for (const char* key : {"parameter", "from", "to", "steps"}) {
        if (!node[key]) {
            fail(node, std::string("sweep requires '") + key + "'");
        }
    }
    SweepSpec s;
    s.parameter = node["parameter"].as<std::string>();
    s.from = as_real(node["from"], "sweep.from");
    s.to = as_real(node["to"], "sweep.to");
    s.steps = as_int(node["steps"], "sweep.steps");
    if (node["trials_per_step"]) {
        s.trials_per_step = as_int(node["trials_per_step"], "sweep.trials_per_step");
    }
    if (node["sample_shots"]) {
        s.sample_shots = as_u64(node["sample_shots"], "sweep.sample_shots");
    }
    return s;
}

inline Tolerances parse_tolerances(const YAML::Node& node) {
    require_keys(node, "tolerances", {"rank_rel_tol", "purity_tol", "nosignal_tol", "degenerate_tol", "p_min"});
    Tolerances t;
    const std::pair<const char*, double*> fields[] = {{"rank_rel_tol", &t.rank_rel_tol},
                                                      {"purity_tol", &t.purity_tol},
                                                      {"nosignal_tol", &t.nosignal_tol},
                                                      {"degenerate_tol", &t.degenerate_tol},
                                                      {"p_min", &t.p_min}};
    for (const auto& [key, slot] : fields) {
        if (node[key]) {
            *slot = as_real(node[key], std::string("tolerances.") + key);
        }
    }
    return t;
}

}  // namespace detail

/// Builds the scenario the config describes. `state_seed` drives random_pure.
inline PreparationScenario build_scenario(const ScenarioConfig& config, std::uint64_t state_seed);

inline TwoOutcomeMeasurement build_measurement(const MeasurementSpec& spec) {
    return std::visit(
        [](const auto& m) -> TwoOutcomeMeasurement {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ComputationalBasis>) {
                return bb84_measurements()[0];
            } else if constexpr (std::is_same_v<T, HadamardBasis>) {
                return bb84_measurements()[1];
            } else if constexpr (std::is_same_v<T, TiltedBasis>) {
                return tilted_measurement(m.alpha);
            } else {
                return TwoOutcomeMeasurement(m.element0, m.element1);
            }
        },
        spec);
}

/// Returns a copy of `config` with the parameter at `path` set to `value`.
/// Paths: state.werner.v, measurements.<0|1>.tilted.alpha.
inline ScenarioConfig with_parameter(ScenarioConfig config, const std::string& path, double value) {
    if (path == "state.werner.v") {
        auto* w = std::get_if<WernerState>(&config.state);
        if (!w) {
            throw ValidationError("sweep parameter '" + path + "' does not resolve: state is not werner");
        }
        w->v = value;
        return config;
    }
    for (std::size_t i = 0; i < 2; ++i) {
        if (path == "measurements." + std::to_string(i) + ".tilted.alpha") {
            auto* t = std::get_if<TiltedBasis>(&config.measurements[i]);
            if (!t) {
                throw ValidationError("sweep parameter '" + path + "' does not resolve: measurement " +
                                      std::to_string(i) + " is not tilted");
            }
            t->alpha = value;
            return config;
        }
    }
    throw ValidationError("sweep parameter '" + path +
                          "' does not resolve (expected state.werner.v or measurements.<0|1>.tilted.alpha)");
}

/// Checks every invariant that does not depend on the run seed and the sweep grid.
inline void validate(const ScenarioConfig& config) {
    const Tolerances& t = config.tolerances;
    const std::pair<const char*, double> tols[] = {{"rank_rel_tol", t.rank_rel_tol},
                                                   {"purity_tol", t.purity_tol},
                                                   {"nosignal_tol", t.nosignal_tol},
                                                   {"degenerate_tol", t.degenerate_tol},
                                                   {"p_min", t.p_min}};
    for (const auto& [name, value] : tols) {
        if (!(value > 0.0)) {
            throw ValidationError(std::string("tolerances.") + name + " must be strictly positive");
        }
    }
    if (config.sample_shots && *config.sample_shots == 0) {
        throw ValidationError("sample_shots must be at least 1");
    }
    if (config.sweep) {
        const SweepSpec& s = *config.sweep;
        if (s.steps < 2) {
            throw ValidationError("sweep.steps must be at least 2");
        }
        if (s.trials_per_step < 1) {
            throw ValidationError("sweep.trials_per_step must be at least 1");
        }
        if (!(s.from <= s.to)) {
            throw ValidationError("sweep.from must not exceed sweep.to");
        }
        if (s.sample_shots && *s.sample_shots == 0) {
            throw ValidationError("sweep.sample_shots must be at least 1");
        }
        (void)with_parameter(config, s.parameter, s.from);
    }
    // Physical validity of states and measurements.
    (void)build_scenario(config, config.seed);
}

inline ScenarioConfig parse_scenario_node(const YAML::Node& root) {
    if (!root.IsMap()) {
        throw ParseError("scenario must be a mapping at the top level");
    }
    detail::require_keys(root, "scenario", {"state", "measurements", "tolerances", "seed", "sample_shots", "sweep"});
    ScenarioConfig config;
    if (!root["state"]) {
        detail::fail(root, "scenario requires 'state'");
    }
    config.state = detail::parse_state(root["state"]);
    if (!root["measurements"]) {
        detail::fail(root, "scenario requires 'measurements'");
    }
    const YAML::Node ms = root["measurements"];
    if (!ms.IsSequence() || ms.size() != 2) {
        detail::fail(ms, "measurements must be a list of exactly two measurements");
    }
    config.measurements = {detail::parse_measurement(ms[0], 0), detail::parse_measurement(ms[1], 1)};
    if (root["tolerances"]) {
        config.tolerances = detail::parse_tolerances(root["tolerances"]);
    }
    if (root["seed"]) {
        config.seed = detail::as_u64(root["seed"], "seed");
    }
    if (root["sample_shots"]) {
        config.sample_shots = detail::as_u64(root["sample_shots"], "sample_shots");
    }
    if (root["sweep"]) {
        config.sweep = detail::parse_sweep(root["sweep"]);
    }
    validate(config);
    return config;
}

inline YAML::Node load_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError("line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1) +
                         ": " + e.msg);
    }
}

inline ScenarioConfig parse_scenario(const std::string& text) { return parse_scenario_node(load_yaml(text)); }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline ScenarioConfig load_scenario(const std::string& path) {
    try {
        return parse_scenario(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline PreparationScenario build_scenario(const ScenarioConfig& config, std::uint64_t state_seed) {
    auto m0 = build_measurement(config.measurements[0]);
    auto m1 = build_measurement(config.measurements[1]);
    return std::visit(
        [&](const auto& s) -> PreparationScenario {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BellState>) {
                return {DensityOperator::from_pure(bell_phi_plus()), m0, m1, 2, 2};
            } else if constexpr (std::is_same_v<T, WernerState>) {
                return {werner_state(s.v), m0, m1, 2, 2};
            } else if constexpr (std::is_same_v<T, ProductState>) {
                const auto a = DensityOperator::from_pure(PureState::normalized(s.a));
                const auto b = DensityOperator::from_pure(PureState::normalized(s.b));
                return {product_state(a, b), m0, m1, a.dim(), b.dim()};
            } else if constexpr (std::is_same_v<T, RandomPureState>) {
                require_dim_in_range(s.dim_a * s.dim_b, "state.random_pure");
                std::mt19937_64 rng(state_seed);
                const auto psi = PureState::normalized(haar_random_pure(s.dim_a * s.dim_b, rng));
                return {DensityOperator::from_pure(psi), m0, m1, s.dim_a, s.dim_b};
            } else {
                return {DensityOperator(s.matrix), m0, m1, s.dim_a, s.dim_b};
            }
        },
        config.state);
}

// ---------------------------------------------------------------------------
// Canonical echo of a config, readable by parse_scenario_node.

inline YamlValue to_yaml(const StateSpec& state) {
    return std::visit(
        [](const auto& s) -> YamlValue {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BellState>) {
                return YamlValue::raw("bell");
            } else if constexpr (std::is_same_v<T, WernerState>) {
                return YamlValue::map().add("werner", YamlValue::map().add("v", YamlValue::number(s.v)));
            } else if constexpr (std::is_same_v<T, ProductState>) {
                return YamlValue::map().add(
                    "product", YamlValue::map().add("a", YamlValue::vector(s.a)).add("b", YamlValue::vector(s.b)));
            } else if constexpr (std::is_same_v<T, RandomPureState>) {
                auto body = YamlValue::map();
                if (s.seed) {
                    body.add("seed", YamlValue::integer(*s.seed));
                }
                body.add("dim_a", YamlValue::integer(static_cast<std::uint64_t>(s.dim_a)))
                    .add("dim_b", YamlValue::integer(static_cast<std::uint64_t>(s.dim_b)));
                return YamlValue::map().add("random_pure", std::move(body));
            } else {
                return YamlValue::map().add(
                    "explicit", YamlValue::map()
                                    .add("matrix", YamlValue::matrix(s.matrix))
                                    .add("dim_a", YamlValue::integer(static_cast<std::uint64_t>(s.dim_a)))
                                    .add("dim_b", YamlValue::integer(static_cast<std::uint64_t>(s.dim_b))));
            }
        },
        state);
}

inline YamlValue to_yaml(const MeasurementSpec& m) {
    return std::visit(
        [](const auto& s) -> YamlValue {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ComputationalBasis>) {
                return YamlValue::raw("computational");
            } else if constexpr (std::is_same_v<T, HadamardBasis>) {
                return YamlValue::raw("hadamard");
            } else if constexpr (std::is_same_v<T, TiltedBasis>) {
                return YamlValue::map().add("tilted", YamlValue::map().add("alpha", YamlValue::number(s.alpha)));
            } else {
                return YamlValue::map().add(
                    "explicit", YamlValue::seq({YamlValue::matrix(s.element0), YamlValue::matrix(s.element1)}));
            }
        },
        m);
}

inline YamlValue to_yaml(const Tolerances& t) {
    return YamlValue::map()
        .add("rank_rel_tol", YamlValue::number(t.rank_rel_tol))
        .add("purity_tol", YamlValue::number(t.purity_tol))
        .add("nosignal_tol", YamlValue::number(t.nosignal_tol))
        .add("degenerate_tol", YamlValue::number(t.degenerate_tol))
        .add("p_min", YamlValue::number(t.p_min));
}

inline YamlValue to_yaml(const SweepSpec& s) {
    auto out = YamlValue::map()
                   .add("parameter", YamlValue::string(s.parameter))
                   .add("from", YamlValue::number(s.from))
                   .add("to", YamlValue::number(s.to))
                   .add("steps", YamlValue::integer(static_cast<std::uint64_t>(s.steps)))
                   .add("trials_per_step", YamlValue::integer(static_cast<std::uint64_t>(s.trials_per_step)));
    if (s.sample_shots) {
        out.add("sample_shots", YamlValue::integer(*s.sample_shots));
    }
    return out;
}

inline YamlValue to_yaml(const ScenarioConfig& config) {
    auto out = YamlValue::map()
                   .add("state", to_yaml(config.state))
                   .add("measurements", YamlValue::seq({to_yaml(config.measurements[0]),
                                                        to_yaml(config.measurements[1])}))
                   .add("tolerances", to_yaml(config.tolerances))
                   .add("seed", YamlValue::integer(config.seed));
    if (config.sample_shots) {
        out.add("sample_shots", YamlValue::integer(*config.sample_shots));
    }
    if (config.sweep) {
        out.add("sweep", to_yaml(*config.sweep));
    }
    return out;
}

}  // namespace dimbound::harness
