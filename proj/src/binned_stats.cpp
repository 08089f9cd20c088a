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

#include "qcount/binned_stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcount/kernels.hpp"
#include "qcount/log_factorial.hpp"

namespace qcount {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dimensions(const CountVector& n, const BinPartition& bins) {
    if (n.bins() != bins.bins()) {
        throw std::invalid_argument(
            fmt::format("dimension mismatch: {} counts for {} bins", n.bins(), bins.bins()));
    }
}

void check_fermion_capacity(std::int64_t total, std::int64_t ports) {
    if (total > ports) {
        throw std::invalid_argument(
            fmt::format("{} fermions do not fit into {} ports (at most one per port)", total, ports));
    }
}

BigInt factorial(std::int64_t n) {
    BigInt out;
    mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
    return out;
}

BigInt power(std::int64_t base, std::int64_t exponent) {
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exponent));
    return out;
}

// a (a+1) ... (a+n-1) for bosons, a (a-1) ... (a-n+1) for fermions.
BigInt shifted_product(std::int64_t a, std::int64_t n, int sign) {
    BigInt out = 1;
    for (std::int64_t l = 0; l < n; ++l) out *= static_cast<unsigned long>(a + sign * l);
    return out;
}

double log_shifted_product(std::int64_t a, std::int64_t n, int sign) {
    return sign > 0 ? log_rising(a, n) : log_falling(a, n);
}

bool fermion_overflow(const CountVector& n, const BinPartition& bins) {
    for (std::size_t i = 0; i < n.bins(); ++i) {
        if (n[i] > bins[i]) return true;
    }
    return false;
}

ProbValue zero(bool exact) {
    return exact ? ProbValue::exact(Rational(0)) : ProbValue::log_space(kNegInf);
}

ProbValue make_exact(const BigInt& num, const BigInt& den) {
    Rational value(num, den);
    value.canonicalize();
    return ProbValue::exact(std::move(value));
}

}  // namespace

ProbValue classical_prob(const CountVector& n, const BinPartition& bins, NumericMode mode) {
    check_dimensions(n, bins);
    const std::int64_t total = n.total();
    const std::int64_t ports = bins.ports();

    if (use_exact(mode, total)) {
        BigInt num = factorial(total);
        BigInt den = power(ports, total);
        for (std::size_t i = 0; i < n.bins(); ++i) {
            num *= power(bins[i], n[i]);
            den *= factorial(n[i]);
        }
        return make_exact(num, den);
    }

    double log_p = log_factorial(total);
    for (std::size_t i = 0; i < n.bins(); ++i) {
        log_p -= log_factorial(n[i]);
        if (n[i] > 0) log_p += static_cast<double>(n[i]) * std::log(bins.fraction_value(i));
    }
    return ProbValue::log_space(log_p);
}

ProbValue quantum_factor(const CountVector& n, const BinPartition& bins, ParticleKind kind, NumericMode mode) {
    check_dimensions(n, bins);
    if (kind == ParticleKind::distinguishable) {
        throw std::invalid_argument("the quantum factor is identically 1 for distinguishable particles");
    }
    const int sign = statistics_sign(kind);
    const std::int64_t total = n.total();
    const std::int64_t ports = bins.ports();
    const bool exact = use_exact(mode, total);
    if (kind == ParticleKind::fermion) {
        check_fermion_capacity(total, ports);
        if (fermion_overflow(n, bins)) return zero(exact);
    }

    if (exact) {
        BigInt num = power(ports, total);
        BigInt den = shifted_product(ports, total, sign);
        for (std::size_t i = 0; i < n.bins(); ++i) {
            num *= shifted_product(bins[i], n[i], sign);
            den *= power(bins[i], n[i]);
        }
        return make_exact(num, den);
    }

    double log_q = -(log_shifted_product(ports, total, sign) - static_cast<double>(total) * std::log(static_cast<double>(ports)));
    for (std::size_t i = 0; i < n.bins(); ++i) {
        log_q += log_shifted_product(bins[i], n[i], sign) - static_cast<double>(n[i]) * std::log(static_cast<double>(bins[i]));
    }
    return ProbValue::log_space(log_q);
}

ProbValue quantum_prob(const CountVector& n, const BinPartition& bins, ParticleKind kind, NumericMode mode) {
    if (kind == ParticleKind::distinguishable) return classical_prob(n, bins, mode);
    check_dimensions(n, bins);
    const int sign = statistics_sign(kind);
    const std::int64_t total = n.total();
    const std::int64_t ports = bins.ports();
    const bool exact = use_exact(mode, total);
    if (kind == ParticleKind::fermion) {
        check_fermion_capacity(total, ports);
        if (fermion_overflow(n, bins)) return zero(exact);
    }

    // N!/prod n_i! * prod_i [K_i (K_i +- 1) ... ] / [M (M +- 1) ...]: the
    // K_i^{n_i} / M^N of the classical part cancels against Q.
    if (exact) {
        BigInt num = factorial(total);
        BigInt den = shifted_product(ports, total, sign);
        for (std::size_t i = 0; i < n.bins(); ++i) {
            num *= shifted_product(bins[i], n[i], sign);
            den *= factorial(n[i]);
        }
        return make_exact(num, den);
    }

    double log_p = log_factorial(total) - log_shifted_product(ports, total, sign);
    for (std::size_t i = 0; i < n.bins(); ++i) {
        log_p += log_shifted_product(bins[i], n[i], sign) - log_factorial(n[i]);
    }
    return ProbValue::log_space(log_p);
}

ProbValue binary_prob(std::int64_t n, std::int64_t total, std::int64_t bin_ports, std::int64_t ports,
                      ParticleKind kind, NumericMode mode) {
    if (n < 0 || n > total) throw std::invalid_argument("binary count outside [0, N]");
    if (bin_ports < 1 || bin_ports >= ports) throw std::invalid_argument("binary bin needs 0 < K < M");
    return quantum_prob(CountVector({n, total - n}), BinPartition({bin_ports, ports - bin_ports}), kind, mode);
}

void binary_log_prob_range(std::int64_t total, std::int64_t bin_ports, std::int64_t ports, ParticleKind kind,
                           std::int64_t first, std::span<double> out) {
    if (bin_ports < 1 || bin_ports >= ports) throw std::invalid_argument("binary bin needs 0 < K < M");
    if (total < 0) throw std::invalid_argument("negative particle number");
    if (first < 0 || first + static_cast<std::int64_t>(out.size()) > total + 1) {
        throw std::invalid_argument("binary count range outside [0, N]");
    }
    if (kind == ParticleKind::fermion) check_fermion_capacity(total, ports);

    const std::int64_t rest = ports - bin_ports;
    std::int64_t lo = 0;
    std::int64_t hi = total;
    if (kind == ParticleKind::fermion) {
        lo = std::max<std::int64_t>(0, total - rest);
        hi = std::min(total, bin_ports);
    }

    std::array<kernels::GatherTerm, 4> terms{};
    double base = 0.0;
    double linear = 0.0;
    std::int64_t max_index = 0;
    const std::int64_t N = total;
    const std::int64_t K = bin_ports;
    const std::int64_t M = ports;
    switch (kind) {
    case ParticleKind::distinguishable: {
        const double q = static_cast<double>(K) / static_cast<double>(M);
        base = log_factorial(N) + static_cast<double>(N) * std::log1p(-q);
        linear = std::log(q) - std::log1p(-q);
        terms = {{{-1.0, 0, 1}, {-1.0, N, -1}, {0.0, 0, 0}, {0.0, 0, 0}}};
        max_index = N;
        break;
    }
    case ParticleKind::boson:
        base = log_factorial(N) - log_factorial(K - 1) - log_factorial(rest - 1) - log_factorial(M + N - 1) +
               log_factorial(M - 1);
        terms = {{{-1.0, 0, 1}, {-1.0, N, -1}, {1.0, K - 1, 1}, {1.0, rest + N - 1, -1}}};
        max_index = std::max(K + N - 1, rest + N - 1);
        break;
    case ParticleKind::fermion:
        base = log_factorial(N) + log_factorial(K) + log_factorial(rest) - log_factorial(M) + log_factorial(M - N);
        terms = {{{-1.0, 0, 1}, {-1.0, N, -1}, {-1.0, K, -1}, {-1.0, rest - N, 1}}};
        max_index = std::max(N, M);
        break;
    }
    const std::size_t nterms = kind == ParticleKind::distinguishable ? 2 : 4;

    std::fill(out.begin(), out.end(), kNegInf);
    const std::int64_t last = first + static_cast<std::int64_t>(out.size()) - 1;
    const std::int64_t from = std::max(first, lo);
    const std::int64_t to = std::min(last, hi);
    if (from > to) return;
    auto window = out.subspan(static_cast<std::size_t>(from - first), static_cast<std::size_t>(to - from + 1));

    if (max_index <= kLogFactorialTableMax) {
        kernels::active().gather_linear_sum(log_factorial_table(), std::span(terms.data(), nterms), base, linear,
                                            from, window);
        return;
    }
    for (std::size_t j = 0; j < window.size(); ++j) {
        const std::int64_t n = from + static_cast<std::int64_t>(j);
        double acc = base + linear * static_cast<double>(n);
        for (std::size_t t = 0; t < nterms; ++t) {
            acc += terms[t].coeff * log_factorial(terms[t].offset + terms[t].slope * n);
        }
        window[j] = acc;
    }
}

ProbValue avg_configuration_prob(std::int64_t total, std::int64_t ports, ParticleKind kind, NumericMode mode) {
    if (total < 1) throw std::invalid_argument("avg_configuration_prob needs N >= 1");
    if (ports < 1) throw std::invalid_argument("avg_configuration_prob needs M >= 1");
    if (kind == ParticleKind::fermion) check_fermion_capacity(total, ports);
    const bool exact = use_exact(mode, total);
    const int sign = statistics_sign(kind);

    if (kind == ParticleKind::distinguishable) {
        if (exact) return make_exact(BigInt(1), power(ports, total));
        return ProbValue::log_space(-static_cast<double>(total) * std::log(static_cast<double>(ports)));
    }
    if (exact) return make_exact(factorial(total), shifted_product(ports, total, sign));
    return ProbValue::log_space(log_factorial(total) - log_shifted_product(ports, total, sign));
}

SmallnessEstimate exponential_smallness(const Rational& alpha, std::int64_t total, ParticleKind kind) {
    if (kind == ParticleKind::distinguishable) {
        throw std::invalid_argument("exponential_smallness is defined for bosons and fermions");
    }
    if (alpha <= 0) throw std::invalid_argument("density alpha must be positive");
    if (kind == ParticleKind::fermion && alpha >= 1) {
        throw std::invalid_argument("fermion density alpha must be below 1");
    }
    if (total < 1) throw std::invalid_argument("exponential_smallness needs N >= 1");
    const double a = alpha.get_d();
    const double s = statistics_sign(kind);
    const double gamma = std::log(1.0 / a) + (1.0 + s / a) * std::log1p(s * a);
    const double n = static_cast<double>(total);
    const double log_p = 0.5 * std::log(2.0 * std::numbers::pi * n * (1.0 + s * a)) - gamma * n;
    return {gamma, log_p};
}

ProbValue LayerDecomposition::product(NumericMode mode) const {
    std::int64_t total = layers.empty() ? 0 : layers.front().total;
    const bool exact = use_exact(mode, total);
    Rational value = 1;
    double log_value = 0.0;
    for (const auto& layer : layers) {
        // A fermion layer holding more particles than ports means some bin
        // from this layer on overflows, so the whole product vanishes.
        if (kind == ParticleKind::fermion && layer.total > layer.ports) {
            return exact ? ProbValue::exact(0) : ProbValue::log_space(-std::numeric_limits<double>::infinity());
        }
        const ProbValue p = binary_prob(layer.count, layer.total, layer.bin_ports, layer.ports, kind,
                                        exact ? NumericMode::exact : NumericMode::logspace);
        if (exact) {
            value *= p.rational();
        } else {
            log_value += p.log();
        }
    }
    return exact ? ProbValue::exact(value) : ProbValue::log_space(log_value);
}

LayerDecomposition factorize(const CountVector& n, const BinPartition& bins, ParticleKind kind) {
    check_dimensions(n, bins);
    if (bins.bins() < 2) throw std::invalid_argument("factorize needs at least two bins");
    if (kind == ParticleKind::fermion) check_fermion_capacity(n.total(), bins.ports());

    LayerDecomposition out;
    out.kind = kind;
    std::int64_t remaining_particles = n.total();
    std::int64_t remaining_ports = bins.ports();
    for (std::size_t s = 0; s + 1 < bins.bins(); ++s) {
        Layer layer{s + 1,
                    remaining_particles,
                    remaining_ports,
                    n[s],
                    bins[s],
                    make_fraction(bins[s], remaining_ports),
                    remaining_particles > 0 ? make_fraction(n[s], remaining_particles) : Rational(0)};
        layer.qbar.canonicalize();
        layer.xbar.canonicalize();
        out.layers.push_back(std::move(layer));
        remaining_particles -= n[s];
        remaining_ports -= bins[s];
    }
    return out;
}

namespace {

void visit_counts(std::vector<std::int64_t>& counts, std::size_t slot, std::int64_t remaining,
                  const std::function<void(const CountVector&)>& visit) {
    if (slot + 1 == counts.size()) {
        counts[slot] = remaining;
        visit(CountVector(counts));
        return;
    }
    for (std::int64_t c = remaining; c >= 0; --c) {
        counts[slot] = c;
        visit_counts(counts, slot + 1, remaining - c, visit);
    }
}

}  // namespace

void for_each_count_vector(std::int64_t total, std::size_t bins,
                           const std::function<void(const CountVector&)>& visit) {
    if (bins == 0) throw std::invalid_argument("need at least one bin");
    if (total < 0) throw std::invalid_argument("negative particle number");
    std::vector<std::int64_t> counts(bins, 0);
    visit_counts(counts, 0, total, visit);
}

std::int64_t count_vector_space_size(std::int64_t total, std::size_t bins) {
    // C(N + r - 1, r - 1) built as a running product of exact binomials.
    __int128 value = 1;
    const auto k = static_cast<std::int64_t>(bins) - 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        value = value * (total + i) / i;
        if (value > std::numeric_limits<std::int64_t>::max()) return std::numeric_limits<std::int64_t>::max();
    }
    return static_cast<std::int64_t>(value);
}

}  // namespace qcount
