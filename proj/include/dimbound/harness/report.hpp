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

// Report documents (structured YAML) and sweep tables (CSV).

#include <yaml-cpp/yaml.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dimbound/analysis.hpp"
#include "dimbound/errors.hpp"
#include "dimbound/harness/config.hpp"
#include "dimbound/harness/yaml_emit.hpp"
#include "dimbound/protocol.hpp"

namespace dimbound::harness {

#ifdef DIMBOUND_VERSION
inline constexpr std::string_view kToolVersion = DIMBOUND_VERSION;
#else
inline constexpr std::string_view kToolVersion = "0.1.0";
#endif

inline constexpr std::string_view kSweepHeader =
    "param,trial,p00,p10,p01,p11,nosignal,pur00,pur01,pur10,pur11,rank,f00,f01,f10,f11";

enum class ReportFormat { structured, tabular };

struct ReportDocument {
    ScenarioConfig config_echo;
    ProbabilityTable probabilities{};
    bool probabilities_sampled = false;
    DimensionReport report;
    std::string tool_version{kToolVersion};
    std::uint64_t seed_used = 0;
};

/// One row of a sweep table. Probabilities are p(j|i) in branch order (0,0), (0,1), (1,0), (1,1).
struct SweepRecord {
    std::optional<double> param;  // empty for a single run
    int trial = 0;
    ProbabilityTable probabilities{};
    bool probabilities_sampled = false;
    double nosignal = 0.0;
    std::array<std::optional<double>, 4> purities;
    std::optional<std::size_t> rank;
    std::optional<std::array<std::optional<double>, 4>> fidelities;
};

inline SweepRecord to_record(const ReportDocument& doc, std::optional<double> param = std::nullopt, int trial = 0) {
    SweepRecord r;
    r.param = param;
    r.trial = trial;
    r.probabilities = doc.probabilities;
    r.probabilities_sampled = doc.probabilities_sampled;
    r.nosignal = doc.report.nosignal_residual;
    r.purities = doc.report.purities;
    r.rank = doc.report.span_rank;
    r.fidelities = doc.report.bb84_fidelities;
    return r;
}

namespace detail {

inline YamlValue branch_list(const std::array<std::optional<double>, 4>& values) {
    YamlValue::Seq out;
    for (const auto& v : values) {
        out.push_back(YamlValue::optional_number(v));
    }
    return YamlValue::seq(std::move(out));
}

inline YamlValue to_yaml(const SpanWitness& w) {
    return YamlValue::map()
        .add("target", YamlValue::string(to_string(w.target)))
        .add("branch", YamlValue::raw(to_string(w.branch)))
        .add("perp_state", YamlValue::vector(w.perp_state))
        .add("coeff_00", YamlValue::complex(w.coeff_00))
        .add("coeff_01", YamlValue::complex(w.coeff_01))
        .add("reconstructed", w.reconstructed ? YamlValue::vector(w.reconstructed->amplitudes()) : YamlValue::null())
        .add("residual", YamlValue::optional_number(w.residual));
}

inline YamlValue to_yaml(const DimensionReport& r) {
    YamlValue::Seq excluded;
    for (const auto& label : r.excluded) {
        excluded.push_back(YamlValue::string(to_string(label)));
    }
    auto out = YamlValue::map()
                   .add("nosignal_residual", YamlValue::number(r.nosignal_residual))
                   .add("nosignal_satisfied", YamlValue::boolean(r.nosignal_satisfied))
                   .add("purities", branch_list(r.purities))
                   .add("all_pure", YamlValue::boolean(r.all_pure))
                   .add("excluded_branches", YamlValue::seq(std::move(excluded)))
                   .add("span_rank", r.span_rank ? YamlValue::integer(*r.span_rank) : YamlValue::null())
                   .add("usd_feasible", r.usd_feasible ? YamlValue::boolean(*r.usd_feasible) : YamlValue::null());
    if (r.degenerate) {
        out.add("degenerate", YamlValue::map()
                                  .add("overlap_sq", YamlValue::number(r.degenerate->overlap_sq))
                                  .add("theta", YamlValue::optional_number(r.degenerate->theta))
                                  .add("all_identical", YamlValue::boolean(r.degenerate->all_identical)));
    } else {
        out.add("degenerate", YamlValue::null());
    }
    if (r.witnesses) {
        out.add("witnesses", YamlValue::seq({to_yaml((*r.witnesses)[0]), to_yaml((*r.witnesses)[1])}));
    } else {
        out.add("witnesses", YamlValue::null());
    }
    out.add("bb84_fidelities", r.bb84_fidelities ? branch_list(*r.bb84_fidelities) : YamlValue::null());
    return out;
}

// Report parsing. The report schema is produced by this library, so structural
// problems are reported without the config parser's per-field detail.

inline YAML::Node field(const YAML::Node& node, const char* key) {
    const YAML::Node child = node[key];
    if (!child) {
        fail(node, std::string("report is missing '") + key + "'");
    }
    return child;
}

inline std::optional<double> opt_real(const YAML::Node& node, std::string_view name) {
    if (node.IsNull()) {
        return std::nullopt;
    }
    return as_real(node, name);
}

inline bool as_bool(const YAML::Node& node, std::string_view name) {
    bool b = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, b)) {
        fail(node, std::string(name) + " must be true or false");
    }
    return b;
}

inline std::array<std::optional<double>, 4> as_branch_list(const YAML::Node& node, std::string_view name) {
    if (!node.IsSequence() || node.size() != 4) {
        fail(node, std::string(name) + " must list four branches");
    }
    std::array<std::optional<double>, 4> out;
    for (std::size_t k = 0; k < 4; ++k) {
        out[k] = opt_real(node[k], name);
    }
    return out;
}

inline BranchLabel as_label(const YAML::Node& node) {
    const std::string text = node.as<std::string>();
    for (const auto& label : kBranchLabels) {
        if (text == to_string(label)) {
            return label;
        }
    }
    fail(node, "unknown branch label '" + text + "'");
}

inline WitnessBranch as_witness_branch(const YAML::Node& node) {
    const std::string text = node.as<std::string>();
    for (auto b : {WitnessBranch::generic, WitnessBranch::degenerate, WitnessBranch::vacuous}) {
        if (text == to_string(b)) {
            return b;
        }
    }
    fail(node, "unknown witness branch '" + text + "'");
}

inline SpanWitness parse_witness(const YAML::Node& node) {
    SpanWitness w;
    w.target = as_label(field(node, "target"));
    w.branch = as_witness_branch(field(node, "branch"));
    w.perp_state = as_vector(field(node, "perp_state"), "perp_state");
    w.coeff_00 = as_complex(field(node, "coeff_00"), "coeff_00");
    w.coeff_01 = as_complex(field(node, "coeff_01"), "coeff_01");
    const YAML::Node rec = field(node, "reconstructed");
    if (!rec.IsNull()) {
        w.reconstructed = PureState(as_vector(rec, "reconstructed"));
    }
    w.residual = opt_real(field(node, "residual"), "residual");
    return w;
}

inline DimensionReport parse_dimension_report(const YAML::Node& node) {
    DimensionReport r;
    r.nosignal_residual = as_real(field(node, "nosignal_residual"), "nosignal_residual");
    r.nosignal_satisfied = as_bool(field(node, "nosignal_satisfied"), "nosignal_satisfied");
    r.purities = as_branch_list(field(node, "purities"), "purities");
    r.all_pure = as_bool(field(node, "all_pure"), "all_pure");
    for (const auto& label : field(node, "excluded_branches")) {
        r.excluded.push_back(as_label(label));
    }
    if (const auto n = field(node, "span_rank"); !n.IsNull()) {
        r.span_rank = as_u64(n, "span_rank");
    }
    if (const auto n = field(node, "usd_feasible"); !n.IsNull()) {
        r.usd_feasible = as_bool(n, "usd_feasible");
    }
    if (const auto n = field(node, "degenerate"); !n.IsNull()) {
        r.degenerate = DegenerateReport{as_real(field(n, "overlap_sq"), "overlap_sq"),
                                        opt_real(field(n, "theta"), "theta"),
                                        as_bool(field(n, "all_identical"), "all_identical")};
    }
    if (const auto n = field(node, "witnesses"); !n.IsNull()) {
        if (!n.IsSequence() || n.size() != 2) {
            fail(n, "witnesses must list two entries");
        }
        r.witnesses = std::array<SpanWitness, 2>{parse_witness(n[0]), parse_witness(n[1])};
    }
    if (const auto n = field(node, "bb84_fidelities"); !n.IsNull()) {
        r.bb84_fidelities = as_branch_list(n, "bb84_fidelities");
    }
    return r;
}

inline std::string csv_cell(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

}  // namespace detail

inline YamlValue to_yaml(const ReportDocument& doc) {
    YamlValue::Seq rows;
    for (const auto& row : doc.probabilities) {
        rows.push_back(YamlValue::seq({YamlValue::number(row[0]), YamlValue::number(row[1])}));
    }
    return YamlValue::map()
        .add("tool_version", YamlValue::string(doc.tool_version))
        .add("seed_used", YamlValue::integer(doc.seed_used))
        .add("config", to_yaml(doc.config_echo))
        .add("probabilities_sampled", YamlValue::boolean(doc.probabilities_sampled))
        .add("probabilities", YamlValue::seq(std::move(rows)))
        .add("report", detail::to_yaml(doc.report));
}

inline ReportDocument parse_report(const std::string& text) {
    const YAML::Node root = load_yaml(text);
    if (!root.IsMap()) {
        throw ParseError("report must be a mapping at the top level");
    }
    detail::require_keys(root, "report document",
                         {"tool_version", "seed_used", "config", "probabilities_sampled", "probabilities", "report"});
    ReportDocument doc;
    doc.tool_version = detail::field(root, "tool_version").as<std::string>();
    doc.seed_used = detail::as_u64(detail::field(root, "seed_used"), "seed_used");
    doc.config_echo = parse_scenario_node(detail::field(root, "config"));
    doc.probabilities_sampled = detail::as_bool(detail::field(root, "probabilities_sampled"), "probabilities_sampled");
    const YAML::Node probs = detail::field(root, "probabilities");
    if (!probs.IsSequence() || probs.size() != 2) {
        detail::fail(probs, "probabilities must be a 2x2 table");
    }
    for (std::size_t i = 0; i < 2; ++i) {
        if (!probs[i].IsSequence() || probs[i].size() != 2) {
            detail::fail(probs[i], "probabilities must be a 2x2 table");
        }
        for (std::size_t j = 0; j < 2; ++j) {
            doc.probabilities[i][j] = detail::as_real(probs[i][j], "probabilities");
        }
    }
    doc.report = detail::parse_dimension_report(detail::field(root, "report"));
    return doc;
}

inline std::string emit_table(const std::vector<SweepRecord>& records) {
    std::string out(kSweepHeader);
    out += '\n';
    for (const auto& r : records) {
        out += detail::csv_cell(r.param) + ',' + std::to_string(r.trial);
        for (const auto& label : kBranchLabels) {
            out += ',' + format_number(r.probabilities[static_cast<std::size_t>(label.i)][static_cast<std::size_t>(label.j)]);
        }
        out += ',' + format_number(r.nosignal);
        for (const auto& p : r.purities) {
            out += ',' + detail::csv_cell(p);
        }
        out += ',' + (r.rank ? std::to_string(*r.rank) : std::string());
        for (std::size_t k = 0; k < 4; ++k) {
            out += ',' + (r.fidelities ? detail::csv_cell((*r.fidelities)[k]) : std::string());
        }
        out += '\n';
    }
    return out;
}

inline std::string emit_report(const ReportDocument& doc, ReportFormat format) {
    if (format == ReportFormat::tabular) {
        return emit_table({to_record(doc)});
    }
    return to_yaml(doc).dump();
}

/// Sweep records as a YAML document (`records:` list) or as the CSV table.
inline std::string emit_sweep(const std::vector<SweepRecord>& records, ReportFormat format) {
    if (format == ReportFormat::tabular) {
        return emit_table(records);
    }
    YamlValue::Seq items;
    for (const auto& r : records) {
        YamlValue::Seq probs;
        for (const auto& label : kBranchLabels) {
            probs.push_back(YamlValue::number(
                r.probabilities[static_cast<std::size_t>(label.i)][static_cast<std::size_t>(label.j)]));
        }
        items.push_back(YamlValue::map()
                            .add("param", YamlValue::optional_number(r.param))
                            .add("trial", YamlValue::integer(static_cast<std::uint64_t>(r.trial)))
                            .add("probabilities", YamlValue::seq(std::move(probs)))
                            .add("probabilities_sampled", YamlValue::boolean(r.probabilities_sampled))
                            .add("nosignal", YamlValue::number(r.nosignal))
                            .add("purities", detail::branch_list(r.purities))
                            .add("rank", r.rank ? YamlValue::integer(*r.rank) : YamlValue::null())
                            .add("fidelities", r.fidelities ? detail::branch_list(*r.fidelities) : YamlValue::null()));
    }
    return YamlValue::map().add("records", YamlValue::seq(std::move(items))).dump();
}

}  // namespace dimbound::harness
