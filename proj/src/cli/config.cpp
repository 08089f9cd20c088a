/**
 * Copyright 2026 The qcount Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qcount/cli.hpp"

namespace qcount::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

template <typename T>
T parse_integer(std::string_view field, std::string_view text) {
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ConfigError(std::string(field), fmt::format("expected an integer, got '{}'", text));
    }
    return value;
}

double parse_real(std::string_view field, std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ConfigError(std::string(field), fmt::format("expected a number, got '{}'", text));
    }
    return value;
}

Rational parse_fraction(std::string_view field, std::string_view text) {
    try {
        return parse_rational(trim(text));
    } catch (const std::exception& e) {
        throw ConfigError(std::string(field), e.what());
    }
}

const std::string* find(const KeyValues& values, std::string_view key) {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
}

std::string join_ints(const std::vector<std::int64_t>& values) { return fmt::format("{}", fmt::join(values, ",")); }

std::string rational_text(const Rational& r) { return r.get_str(); }

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument(fmt::format("invalid value for '{}': {}", field, message)), field_(std::move(field)) {}

std::string_view to_string(Command command) {
    switch (command) {
    case Command::exact: return "exact";
    case Command::gauss: return "gauss";
    case Command::tail: return "tail";
    case Command::sweep: return "sweep";
    case Command::mc: return "mc";
    default: return "verify";
    }
}

Command parse_command(std::string_view text) {
    for (auto c : {Command::exact, Command::gauss, Command::tail, Command::sweep, Command::mc, Command::verify}) {
        if (text == to_string(c)) return c;
    }
    throw ConfigError("command", fmt::format("unknown command '{}'", text));
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {"command", "N",       "M",      "K",    "q",     "alpha",
                                                  "sigma",   "A",       "epsilon", "samples", "seed", "mode",
                                                  "numeric", "out",     "format", "threads"};
    return keys;
}

KeyValues parse_config_text(std::string_view text) {
    KeyValues values;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("line {}", line_no), fmt::format("expected key = value, got '{}'", line));
        }
        const std::string key(trim(line.substr(0, eq)));
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError(key, fmt::format("unknown key on line {}", line_no));
        }
        values[key] = std::string(trim(line.substr(eq + 1)));
    }
    return values;
}

KeyValues load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", fmt::format("cannot open '{}'", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

KeyValues merge(KeyValues base, const KeyValues& overrides) {
    for (const auto& [k, v] : overrides) base[k] = v;
    return base;
}

std::vector<std::int64_t> parse_int_list(std::string_view field, std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ConfigError(std::string(field), "empty list");
    std::vector<std::int64_t> out;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() > 3) throw ConfigError(std::string(field), "range must be lo:hi or lo:hi:step");
        const auto lo = parse_integer<std::int64_t>(field, parts[0]);
        const auto hi = parse_integer<std::int64_t>(field, parts[1]);
        const auto step = parts.size() == 3 ? parse_integer<std::int64_t>(field, parts[2]) : 1;
        if (step <= 0) throw ConfigError(std::string(field), "range step must be positive");
        if (hi < lo) throw ConfigError(std::string(field), fmt::format("empty range {}:{}", lo, hi));
        if ((hi - lo) / step >= kMaxTableRows) throw ConfigError(std::string(field), "range too long");
        for (std::int64_t v = lo; v <= hi; v += step) out.push_back(v);
        return out;
    }
    for (auto part : split(text, ',')) out.push_back(parse_integer<std::int64_t>(field, part));
    return out;
}

ExperimentConfig build_config(const KeyValues& values) {
    ExperimentConfig c;
    if (const auto* v = find(values, "command")) c.command = parse_command(*v);

    auto positive_list = [&](const char* key) {
        std::vector<std::int64_t> out;
        if (const auto* v = find(values, key)) {
            out = parse_int_list(key, *v);
            for (auto x : out) {
                if (x < 1) throw ConfigError(key, fmt::format("entries must be positive, got {}", x));
            }
        }
        return out;
    };
    c.N = positive_list("N");
    c.M = positive_list("M");
    c.K = positive_list("K");

    if (const auto* v = find(values, "q")) {
        Rational sum = 0;
        for (auto part : split(*v, ',')) {
            Rational f = parse_fraction("q", part);
            if (f <= 0 || f > 1) throw ConfigError("q", fmt::format("fraction {} outside (0, 1]", f.get_str()));
            sum += f;
            c.q.push_back(std::move(f));
        }
        if (sum != 1) throw ConfigError("q", fmt::format("fractions sum to {}, expected 1", sum.get_str()));
    }
    if (!c.K.empty() && !c.q.empty()) throw ConfigError("q", "give either K or q, not both");

    if (const auto* v = find(values, "alpha")) {
        c.alpha = parse_fraction("alpha", *v);
        if (*c.alpha <= 0) throw ConfigError("alpha", "density must be positive");
    }
    if (const auto* v = find(values, "sigma")) {
        try {
            c.sigma = parse_particle_kind(trim(*v));
        } catch (const std::exception& e) {
            throw ConfigError("sigma", e.what());
        }
    }
    if (const auto* v = find(values, "A")) {
        c.A = parse_real("A", *v);
        if (!(c.A > 0)) throw ConfigError("A", "window amplitude must be positive");
    }
    if (const auto* v = find(values, "epsilon")) {
        c.epsilon = parse_real("epsilon", *v);
        if (!(c.epsilon > 0 && c.epsilon < 1.0 / 6.0)) throw ConfigError("epsilon", "must lie in (0, 1/6)");
    }
    if (const auto* v = find(values, "samples")) {
        c.samples = parse_integer<std::int64_t>("samples", *v);
        if (c.samples < 2) throw ConfigError("samples", "need at least 2 samples");
    }
    if (const auto* v = find(values, "seed")) c.seed = parse_integer<std::uint64_t>("seed", *v);
    if (const auto* v = find(values, "mode")) {
        try {
            c.mode = parse_mc_mode(trim(*v));
        } catch (const std::exception& e) {
            throw ConfigError("mode", e.what());
        }
    }
    if (const auto* v = find(values, "numeric")) {
        const auto t = trim(*v);
        if (t == "exact") {
            c.numeric = NumericMode::exact;
        } else if (t == "logspace" || t == "log") {
            c.numeric = NumericMode::logspace;
        } else if (t == "auto" || t == "automatic") {
            c.numeric = NumericMode::automatic;
        } else {
            throw ConfigError("numeric", fmt::format("expected exact, logspace or auto, got '{}'", t));
        }
    }
    if (const auto* v = find(values, "out")) c.out = std::string(trim(*v));
    if (const auto* v = find(values, "format")) {
        const auto t = trim(*v);
        if (t == "csv") {
            c.format = OutputFormat::csv;
        } else if (t == "json") {
            c.format = OutputFormat::json;
        } else {
            throw ConfigError("format", fmt::format("expected csv or json, got '{}'", t));
        }
    }
    if (const auto* v = find(values, "threads")) c.threads = parse_integer<unsigned>("threads", *v);

    // Command-specific requirements.
    const bool needs_bins = c.command != Command::verify;
    if (needs_bins && c.N.empty()) throw ConfigError("N", fmt::format("required by '{}'", to_string(c.command)));
    if ((c.command == Command::exact || c.command == Command::mc) && c.N.size() != 1) {
        throw ConfigError("N", fmt::format("'{}' takes a single particle number", to_string(c.command)));
    }
    if (needs_bins && c.K.empty() && c.q.empty()) throw ConfigError("K", "give bin sizes K or fractions q");
    if (!c.M.empty() && c.M.size() != 1 && c.M.size() != c.N.size()) {
        throw ConfigError("M", "give one M or one per N value");
    }
    if (!c.K.empty() && !c.M.empty()) {
        std::int64_t sum = 0;
        for (auto k : c.K) sum += k;
        for (auto m : c.M) {
            if (m != sum) throw ConfigError("M", fmt::format("bins cover {} ports but M = {}", sum, m));
        }
    }
    if (needs_bins && !c.q.empty() && c.M.empty() && !c.alpha) {
        throw ConfigError("M", "fractions q need M or alpha to fix the port count");
    }
    if (c.command == Command::mc && !c.seed) throw ConfigError("seed", "required by 'mc'");
    if (c.samples > kMaxSamples) {
        throw ConfigError("samples", fmt::format("at most {} samples per run", kMaxSamples));
    }
    return c;
}

KeyValues echo_config(const ExperimentConfig& c) {
    KeyValues out;
    out["command"] = std::string(to_string(c.command));
    if (!c.N.empty()) out["N"] = join_ints(c.N);
    if (!c.M.empty()) out["M"] = join_ints(c.M);
    if (!c.K.empty()) out["K"] = join_ints(c.K);
    if (!c.q.empty()) {
        std::vector<std::string> parts;
        for (const auto& f : c.q) parts.push_back(rational_text(f));
        out["q"] = fmt::format("{}", fmt::join(parts, ","));
    }
    if (c.alpha) out["alpha"] = rational_text(*c.alpha);
    out["sigma"] = std::string(to_string(c.sigma));
    out["A"] = fmt::format("{}", c.A);
    out["epsilon"] = fmt::format("{}", c.epsilon);
    out["samples"] = fmt::format("{}", c.samples);
    if (c.seed) out["seed"] = fmt::format("{}", *c.seed);
    out["mode"] = std::string(to_string(c.mode));
    out["numeric"] = c.numeric == NumericMode::exact ? "exact" : c.numeric == NumericMode::logspace ? "logspace" : "auto";
    if (!c.out.empty()) out["out"] = c.out;
    out["format"] = c.format == OutputFormat::csv ? "csv" : "json";
    out["threads"] = fmt::format("{}", c.threads);
    return out;
}

std::string format_config(const KeyValues& values) {
    std::string text;
    for (const auto& [k, v] : values) text += fmt::format("{}={}\n", k, v);
    return text;
}

}  // namespace qcount::cli
