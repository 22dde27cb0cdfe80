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

// Deterministic YAML text emission. Maps print in block style with keys in
// insertion order; sequences of scalars (or of such sequences) print in flow
// style. Parsing goes through yaml-cpp.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dimbound/numerics.hpp"

namespace dimbound::harness {

/// 12 significant digits, no negative zero.
inline std::string format_number(double x) {
    if (x == 0.0) {
        return "0";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

class YamlValue {
   public:
    using Map = std::vector<std::pair<std::string, YamlValue>>;
    using Seq = std::vector<YamlValue>;

    YamlValue() : value_(std::string("null")) {}

    static YamlValue null() { return {}; }
    static YamlValue raw(std::string text) { return YamlValue(std::move(text)); }
    static YamlValue number(double x) { return YamlValue(format_number(x)); }
    static YamlValue integer(std::uint64_t x) { return YamlValue(std::to_string(x)); }
    static YamlValue boolean(bool b) { return YamlValue(std::string(b ? "true" : "false")); }
    static YamlValue string(const std::string& s) { return YamlValue(quote_if_needed(s)); }
    static YamlValue map(Map m = {}) { return YamlValue(std::move(m)); }
    static YamlValue seq(Seq s = {}) { return YamlValue(std::move(s)); }

    static YamlValue complex(Complex z) { return seq({number(z.real()), number(z.imag())}); }
    static YamlValue vector(const ComplexVector& v) {
        Seq out;
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            out.push_back(complex(v(k)));
        }
        return seq(std::move(out));
    }
    static YamlValue matrix(const ComplexMatrix& m) {
        Seq rows;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            Seq row;
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                row.push_back(complex(m(r, c)));
            }
            rows.push_back(seq(std::move(row)));
        }
        return seq(std::move(rows));
    }
    static YamlValue optional_number(const std::optional<double>& x) { return x ? number(*x) : null(); }

    YamlValue& add(std::string key, YamlValue v) {
        std::get<Map>(value_).emplace_back(std::move(key), std::move(v));
        return *this;
    }
    YamlValue& push(YamlValue v) {
        std::get<Seq>(value_).push_back(std::move(v));
        return *this;
    }

    std::string dump() const {
        std::string out;
        if (is_map()) {
            write_map(out, std::get<Map>(value_), 0);
        } else {
            out = inline_text();
            out += '\n';
        }
        return out;
    }

   private:
    explicit YamlValue(std::string scalar) : value_(std::move(scalar)) {}
    explicit YamlValue(Map m) : value_(std::move(m)) {}
    explicit YamlValue(Seq s) : value_(std::move(s)) {}

    static std::string quote_if_needed(const std::string& s) {
        bool plain = !s.empty() && s != "null" && s != "true" && s != "false";
        for (char c : s) {
            const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                            c == '_' || c == '.' || c == '-';
            plain = plain && ok;
        }
        if (plain && !s.empty() && ((s[0] >= '0' && s[0] <= '9') || s[0] == '-' || s[0] == '.')) {
            // Could be read back as a number.
            plain = false;
        }
        if (plain) {
            return s;
        }
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') {
                q += '\\';
            }
            q += c;
        }
        return q + "\"";
    }

    bool is_map() const { return std::holds_alternative<Map>(value_); }
    bool is_seq() const { return std::holds_alternative<Seq>(value_); }

    /// True for scalars and for sequences containing no maps.
    bool is_flow() const {
        if (is_map()) {
            return std::get<Map>(value_).empty();
        }
        if (is_seq()) {
            for (const auto& item : std::get<Seq>(value_)) {
                if (!item.is_flow() || item.is_map()) {
                    return false;
                }
            }
        }
        return true;
    }

    std::string inline_text() const {
        if (is_map()) {
            return "{}";
        }
        if (is_seq()) {
            std::string out = "[";
            const auto& items = std::get<Seq>(value_);
            for (std::size_t k = 0; k < items.size(); ++k) {
                out += (k ? ", " : "") + items[k].inline_text();
            }
            return out + "]";
        }
        return std::get<std::string>(value_);
    }

    static void write_entry(std::string& out, const std::string& key, const YamlValue& v, std::size_t indent) {
        out += key + ":";
        if (v.is_flow()) {
            out += " " + v.inline_text() + "\n";
        } else if (v.is_map()) {
            out += "\n";
            write_map(out, std::get<Map>(v.value_), indent + 2);
        } else {
            out += "\n";
            write_block_seq(out, std::get<Seq>(v.value_), indent + 2);
        }
    }

    static void write_map(std::string& out, const Map& m, std::size_t indent, bool first_inline = false) {
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (!(first_inline && k == 0)) {
                out += std::string(indent, ' ');
            }
            write_entry(out, m[k].first, m[k].second, indent);
        }
    }

    static void write_block_seq(std::string& out, const Seq& s, std::size_t indent) {
        for (const auto& item : s) {
            out += std::string(indent, ' ') + "- ";
            if (item.is_map() && !std::get<Map>(item.value_).empty()) {
                write_map(out, std::get<Map>(item.value_), indent + 2, true);
            } else {
                out += item.inline_text() + "\n";
            }
        }
    }

    std::variant<std::string, Map, Seq> value_;
};

}  // namespace dimbound::harness
