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

// Experiment runner behind the qcount command-line tool.
//
// A run is described by a flat key=value map (from a config file, from
// flags, or both with flags winning), validated into an ExperimentConfig,
// executed into a Table and written as CSV or JSON. The config echo stored
// in the output metadata parses back to the same config.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qcount/haar_mc.hpp"
#include "qcount/types.hpp"

namespace qcount::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { exact, gauss, tail, sweep, mc, verify };
enum class OutputFormat { csv, json };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);

/// An invalid setting; field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Keys accepted in config files and as --flags.
const std::vector<std::string>& config_keys();

/// Flat "key = value" lines; '#' starts a comment, blank lines are skipped.
KeyValues parse_config_text(std::string_view text);
KeyValues load_config_file(const std::string& path);

/// `base` with every entry of `overrides` written over it.
KeyValues merge(KeyValues base, const KeyValues& overrides);

struct ExperimentConfig {
    Command command = Command::verify;
    std::vector<std::int64_t> N;
    std::vector<std::int64_t> M;
    std::vector<std::int64_t> K;
    std::vector<Rational> q;
    std::optional<Rational> alpha;
    ParticleKind sigma = ParticleKind::boson;
    double A = 1.0;
    double epsilon = 0.1;
    std::int64_t samples = 10000;
    std::optional<std::uint64_t> seed;
    McMode mode = McMode::haar_average;
    NumericMode numeric = NumericMode::automatic;
    std::string out;
    OutputFormat format = OutputFormat::csv;
    unsigned threads = 0;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Validates every field; throws ConfigError naming the first bad key.
ExperimentConfig build_config(const KeyValues& values);

/// Canonical key=value form; build_config(echo_config(c)) == c.
KeyValues echo_config(const ExperimentConfig& config);

/// "key=value" lines in key order.
std::string format_config(const KeyValues& values);

/// Integer list "a,b,c" or range "lo:hi" / "lo:hi:step".
std::vector<std::int64_t> parse_int_list(std::string_view field, std::string_view text);

using Cell = std::variant<std::monostate, std::string, std::int64_t, double, bool>;

struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// '#'-prefixed key=value metadata lines, a header row, then data rows with
/// RFC 4180 quoting.
void write_csv(std::ostream& os, const Table& table);

/// {"metadata": {...}, "rows": [{column: value, ...}, ...]}
void write_json(std::ostream& os, const Table& table);

void write_table(std::ostream& os, const Table& table, OutputFormat format);

struct RunResult {
    Table table;
    int exit_code = 0;
};

/// Limits checked before any long computation; violations throw CostGuardError.
inline constexpr std::int64_t kMaxTableRows = 2'000'000;
inline constexpr std::int64_t kMaxSamples = 100'000'000;

RunResult run(const ExperimentConfig& config);

/// One row per property of the built-in invariant suite.
struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<PropertyResult> run_verify_suite(unsigned threads, std::uint64_t seed);

/// Parses argv, runs and writes the output; returns the process exit code.
/// Exit codes: 0 success, 1 verify failures, 2 invalid config, 3 cost guard,
/// 4 other runtime errors.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qcount::cli
