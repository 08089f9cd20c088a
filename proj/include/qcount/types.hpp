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

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcount {

using Rational = mpq_class;
using BigInt = mpz_class;

/// num/den in lowest terms (mpq_class(num, den) alone is not reduced).
inline Rational make_fraction(std::int64_t num, std::int64_t den) {
    Rational r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return r;
}

/// Thrown when a computation would exceed one of the hard size limits
/// (permanent dimension, exhaustive enumeration size, ...).
class CostGuardError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Statistics of the particles sent through the network.
enum class ParticleKind { distinguishable, boson, fermion };

/// +1 for bosons, -1 for fermions, 0 for distinguishable particles.
constexpr int statistics_sign(ParticleKind kind) {
    switch (kind) {
    case ParticleKind::boson: return 1;
    case ParticleKind::fermion: return -1;
    default: return 0;
    }
}

std::string_view to_string(ParticleKind kind);

/// Accepts "distinguishable"/"classical"/"d"/"0", "boson"/"b"/"+",
/// "fermion"/"f"/"-".
ParticleKind parse_particle_kind(std::string_view text);

/// Parses "p/q", "p" or a decimal such as "0.25" into an exact rational.
Rational parse_rational(std::string_view text);

/// Output ports of an M-port network grouped into r bins of K_i ports.
class BinPartition {
public:
    explicit BinPartition(std::vector<std::int64_t> sizes);

    /// Builds K_i = q_i * M; every product must be a positive integer.
    static BinPartition from_fractions(std::span<const Rational> fractions, std::int64_t ports);

    std::int64_t ports() const { return ports_; }
    std::size_t bins() const { return sizes_.size(); }
    std::span<const std::int64_t> sizes() const { return sizes_; }
    std::int64_t operator[](std::size_t i) const { return sizes_[i]; }

    Rational fraction(std::size_t i) const { return make_fraction(sizes_[i], ports_); }
    double fraction_value(std::size_t i) const {
        return static_cast<double>(sizes_[i]) / static_cast<double>(ports_);
    }

    bool operator==(const BinPartition&) const = default;

private:
    std::vector<std::int64_t> sizes_;
    std::int64_t ports_ = 0;
};

/// Number of particles detected in each bin.
class CountVector {
public:
    CountVector() = default;
    explicit CountVector(std::vector<std::int64_t> counts);

    std::int64_t total() const { return total_; }
    std::size_t bins() const { return counts_.size(); }
    std::span<const std::int64_t> counts() const { return counts_; }
    std::int64_t operator[](std::size_t i) const { return counts_[i]; }

    /// x_i = n_i / N; requires N > 0.
    double fraction(std::size_t i) const;

    std::string to_string(char separator = ',') const;

    bool operator==(const CountVector& other) const { return counts_ == other.counts_; }
    std::strong_ordering operator<=>(const CountVector& other) const {
        return counts_ <=> other.counts_;
    }

private:
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

/// Fock-space occupation numbers of the M network ports.
class OccupationVector {
public:
    OccupationVector() = default;
    explicit OccupationVector(std::vector<int> occupations);

    /// One particle in each of the listed (zero-based) ports, repeats allowed.
    static OccupationVector from_ports(std::span<const int> ports, int num_ports);

    int total() const { return total_; }
    int ports() const { return static_cast<int>(occ_.size()); }
    std::span<const int> occupations() const { return occ_; }
    int operator[](std::size_t i) const { return occ_[i]; }

    /// Port index of every particle, in ascending port order.
    std::vector<int> port_list() const;

    /// prod_i occ_i!
    BigInt factorial_product() const;
    bool at_most_one_per_port() const;

    std::string to_string(char separator = ',') const;

    bool operator==(const OccupationVector& other) const { return occ_ == other.occ_; }
    std::strong_ordering operator<=>(const OccupationVector& other) const {
        return occ_ <=> other.occ_;
    }

private:
    std::vector<int> occ_;
    int total_ = 0;
};

/// How probabilities are evaluated: exact rationals, natural logs, or
/// exact up to a size threshold and logs beyond it.
enum class NumericMode { exact, logspace, automatic };

/// Total particle number up to which NumericMode::automatic stays exact.
inline constexpr std::int64_t kExactModeLimit = 200;

constexpr bool use_exact(NumericMode mode, std::int64_t total) {
    return mode == NumericMode::exact ||
           (mode == NumericMode::automatic && total <= kExactModeLimit);
}

/// A non-negative magnitude held either as an exact rational or as its
/// natural logarithm. Probabilities and quantum factors both use it.
class ProbValue {
public:
    static ProbValue exact(Rational value);
    static ProbValue log_space(double log_value);

    bool is_exact() const { return exact_; }
    NumericMode mode() const { return exact_ ? NumericMode::exact : NumericMode::logspace; }

    /// Throws std::logic_error in log-space mode.
    const Rational& rational() const;

    /// Natural log; -infinity for zero. Exact values are converted without
    /// going through a (possibly underflowing) double.
    double log() const;

    /// Linear value as a double (may underflow to 0 in log-space mode).
    double value() const;

    ProbValue to_log_space() const { return log_space(log()); }

private:
    bool exact_ = true;
    Rational rational_;
    double log_ = 0.0;
};

/// Natural log of a positive rational, accurate far beyond double range.
double log_of(const Rational& value);
double log_of(const BigInt& value);

}  // namespace qcount
