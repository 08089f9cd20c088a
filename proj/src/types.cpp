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

#include "qcount/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qcount {

namespace {

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    return text;
}

bool is_integer_literal(std::string_view text) {
    if (text.empty()) return false;
    std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (start == text.size()) return false;
    return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(start), text.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

BigInt parse_integer(std::string_view text) {
    if (!is_integer_literal(text)) {
        throw std::invalid_argument(fmt::format("not an integer: '{}'", text));
    }
    std::string digits(text.front() == '+' ? text.substr(1) : text);
    return BigInt(digits);
}

}  // namespace

std::string_view to_string(ParticleKind kind) {
    switch (kind) {
    case ParticleKind::boson: return "boson";
    case ParticleKind::fermion: return "fermion";
    default: return "distinguishable";
    }
}

ParticleKind parse_particle_kind(std::string_view text) {
    const std::string key = lowercase(trim(text));
    if (key == "distinguishable" || key == "classical" || key == "d" || key == "0") {
        return ParticleKind::distinguishable;
    }
    if (key == "boson" || key == "bosons" || key == "b" || key == "+") return ParticleKind::boson;
    if (key == "fermion" || key == "fermions" || key == "f" || key == "-") return ParticleKind::fermion;
    throw std::invalid_argument(fmt::format("unknown particle kind '{}'", text));
}

Rational parse_rational(std::string_view raw) {
    const std::string_view text = trim(raw);
    if (text.empty()) throw std::invalid_argument("empty number");

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const BigInt num = parse_integer(trim(text.substr(0, slash)));
        const BigInt den = parse_integer(trim(text.substr(slash + 1)));
        if (den == 0) throw std::invalid_argument(fmt::format("zero denominator in '{}'", text));
        Rational value(num, den);
        value.canonicalize();
        return value;
    }

    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        // Decimal literals are read exactly: "0.125" -> 1/8.
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole.front() == '-';
        if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
        if (whole.empty()) whole = "0";
        if (frac.empty() || !is_integer_literal(frac) || frac.front() == '-' || frac.front() == '+' ||
            !is_integer_literal(whole)) {
            throw std::invalid_argument(fmt::format("not a number: '{}'", text));
        }
        BigInt scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        BigInt num = parse_integer(whole) * scale + parse_integer(frac);
        if (negative) num = -num;
        Rational value(num, scale);
        value.canonicalize();
        return value;
    }

    return Rational(parse_integer(text));
}

BinPartition::BinPartition(std::vector<std::int64_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("bin partition needs at least one bin");
    for (auto k : sizes_) {
        if (k < 1) throw std::invalid_argument(fmt::format("bin sizes must be positive, got {}", k));
        ports_ += k;
    }
}

BinPartition BinPartition::from_fractions(std::span<const Rational> fractions, std::int64_t ports) {
    if (ports < 1) throw std::invalid_argument("port count must be positive");
    Rational sum = 0;
    std::vector<std::int64_t> sizes;
    sizes.reserve(fractions.size());
    for (const auto& q : fractions) {
        sum += q;
        Rational k = q * ports;
        if (k.get_den() != 1 || k <= 0) {
            throw std::invalid_argument(
                fmt::format("q = {} times M = {} is not a positive integer", q.get_str(), ports));
        }
        sizes.push_back(k.get_num().get_si());
    }
    if (sum != 1) throw std::invalid_argument(fmt::format("bin fractions sum to {}, not 1", sum.get_str()));
    return BinPartition(std::move(sizes));
}

CountVector::CountVector(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    for (auto n : counts_) {
        if (n < 0) throw std::invalid_argument(fmt::format("counts must be non-negative, got {}", n));
        total_ += n;
    }
}

double CountVector::fraction(std::size_t i) const {
    if (total_ == 0) throw std::domain_error("count fractions are undefined for N = 0");
    return static_cast<double>(counts_[i]) / static_cast<double>(total_);
}

std::string CountVector::to_string(char separator) const {
    return fmt::format("{}", fmt::join(counts_, std::string(1, separator)));
}

OccupationVector::OccupationVector(std::vector<int> occupations) : occ_(std::move(occupations)) {
    for (int n : occ_) {
        if (n < 0) throw std::invalid_argument(fmt::format("occupations must be non-negative, got {}", n));
        total_ += n;
    }
}

OccupationVector OccupationVector::from_ports(std::span<const int> ports, int num_ports) {
    std::vector<int> occ(static_cast<std::size_t>(num_ports), 0);
    for (int p : ports) {
        if (p < 0 || p >= num_ports) throw std::invalid_argument(fmt::format("port {} out of range", p));
        ++occ[static_cast<std::size_t>(p)];
    }
    return OccupationVector(std::move(occ));
}

std::vector<int> OccupationVector::port_list() const {
    std::vector<int> ports;
    ports.reserve(static_cast<std::size_t>(total_));
    for (std::size_t p = 0; p < occ_.size(); ++p) {
        for (int c = 0; c < occ_[p]; ++c) ports.push_back(static_cast<int>(p));
    }
    return ports;
}

BigInt OccupationVector::factorial_product() const {
    BigInt out = 1;
    for (int n : occ_) {
        BigInt f;
        mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
        out *= f;
    }
    return out;
}

bool OccupationVector::at_most_one_per_port() const {
    return std::all_of(occ_.begin(), occ_.end(), [](int n) { return n <= 1; });
}

std::string OccupationVector::to_string(char separator) const {
    return fmt::format("{}", fmt::join(occ_, std::string(1, separator)));
}

ProbValue ProbValue::exact(Rational value) {
    if (value < 0) throw std::domain_error("negative magnitude");
    ProbValue out;
    out.exact_ = true;
    out.rational_ = std::move(value);
    out.rational_.canonicalize();
    return out;
}

ProbValue ProbValue::log_space(double log_value) {
    if (std::isnan(log_value)) throw std::domain_error("NaN log value");
    ProbValue out;
    out.exact_ = false;
    out.log_ = log_value;
    return out;
}

const Rational& ProbValue::rational() const {
    if (!exact_) throw std::logic_error("value is held in log-space mode");
    return rational_;
}

double ProbValue::log() const {
    if (!exact_) return log_;
    return log_of(rational_);
}

double ProbValue::value() const {
    if (exact_) return rational_.get_d();
    return std::exp(log_);
}

double log_of(const BigInt& value) {
    if (value <= 0) {
        if (value == 0) return -std::numeric_limits<double>::infinity();
        throw std::domain_error("log of a negative integer");
    }
    long exponent = 0;
    const double mantissa = mpz_get_d_2exp(&exponent, value.get_mpz_t());
    return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

double log_of(const Rational& value) {
    if (value <= 0) {
        if (value == 0) return -std::numeric_limits<double>::infinity();
        throw std::domain_error("log of a negative rational");
    }
    long num_exp = 0;
    long den_exp = 0;
    const double num = mpz_get_d_2exp(&num_exp, value.get_num_mpz_t());
    const double den = mpz_get_d_2exp(&den_exp, value.get_den_mpz_t());
    return std::log(num / den) + static_cast<double>(num_exp - den_exp) * std::numbers::ln2;
}

}  // namespace qcount
