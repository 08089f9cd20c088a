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

#include <cmath>
#include <json.hpp>
#include <ostream>

#include "qcount/cli.hpp"

namespace qcount::cli {

namespace {

std::string csv_field(const std::string& raw) {
    const bool quote = raw.find_first_of(",\"\r\n") != std::string::npos ||
                       (!raw.empty() && (raw.front() == ' ' || raw.back() == ' '));
    if (!quote) return raw;
    std::string out = "\"";
    for (char ch : raw) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

struct CellText {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t v) const { return fmt::format("{}", v); }
    std::string operator()(double v) const { return fmt::format("{}", v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
};

struct CellJson {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
    nlohmann::ordered_json operator()(double v) const {
        if (!std::isfinite(v)) return nullptr;
        return v;
    }
    nlohmann::ordered_json operator()(bool v) const { return v; }
};

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
    for (const auto& [key, value] : table.metadata) os << "# " << key << '=' << value << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        os << (i ? "," : "") << csv_field(table.columns[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(std::visit(CellText{}, row[i]));
        os << '\n';
    }
}

void write_json(std::ostream& os, const Table& table) {
    nlohmann::ordered_json doc;
    doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.metadata) doc["metadata"][key] = value;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json record = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
            record[table.columns[i]] = std::visit(CellJson{}, row[i]);
        }
        doc["rows"].push_back(std::move(record));
    }
    os << doc.dump(2) << '\n';
}

void write_table(std::ostream& os, const Table& table, OutputFormat format) {
    if (format == OutputFormat::json) {
        write_json(os, table);
    } else {
        write_csv(os, table);
    }
}

}  // namespace qcount::cli
