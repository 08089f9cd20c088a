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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "qcount/binned_stats.hpp"

using namespace qcount;

namespace {

Rational frac(long a, long b) { return make_fraction(a, b); }

Rational exact_p(std::vector<std::int64_t> n, std::vector<std::int64_t> k, ParticleKind kind) {
    return quantum_prob(CountVector(std::move(n)), BinPartition(std::move(k)), kind, NumericMode::exact).rational();
}

// Count Fock states by bin occupation. Independent of the library: plain
// recursion over ports, each port holding 0..cap particles.
std::map<std::vector<std::int64_t>, Rational> fock_census(std::int64_t total, const std::vector<std::int64_t>& k,
                                                          ParticleKind kind) {
    std::vector<int> bin_of;
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::int64_t j = 0; j < k[i]; ++j) bin_of.push_back(static_cast<int>(i));
    const int ports = static_cast<int>(bin_of.size());
    std::map<std::vector<std::int64_t>, Rational> counts;
    Rational states = 0;
    std::vector<std::int64_t> bins(k.size(), 0);

    if (kind == ParticleKind::distinguishable) {
        // every particle lands on any of the M ports with weight 1/M^N
        std::function<void(std::int64_t)> rec = [&](std::int64_t left) {
            if (left == 0) {
                counts[bins] += 1;
                states += 1;
                return;
            }
            for (int p = 0; p < ports; ++p) {
                ++bins[static_cast<std::size_t>(bin_of[static_cast<std::size_t>(p)])];
                rec(left - 1);
                --bins[static_cast<std::size_t>(bin_of[static_cast<std::size_t>(p)])];
            }
        };
        rec(total);
    } else {
        const std::int64_t cap = kind == ParticleKind::fermion ? 1 : total;
        std::function<void(int, std::int64_t)> rec = [&](int port, std::int64_t left) {
            if (port == ports) {
                if (left == 0) {
                    counts[bins] += 1;
                    states += 1;
                }
                return;
            }
            for (std::int64_t c = 0; c <= std::min(cap, left); ++c) {
                bins[static_cast<std::size_t>(bin_of[static_cast<std::size_t>(port)])] += c;
                rec(port + 1, left - c);
                bins[static_cast<std::size_t>(bin_of[static_cast<std::size_t>(port)])] -= c;
            }
        };
        rec(0, total);
    }
    for (auto& [key, v] : counts) v /= states;
    return counts;
}

}  // namespace

TEST_CASE("classical multinomial examples") {
    CHECK(classical_prob(CountVector({3, 0}), BinPartition({1, 2})).rational() == frac(1, 27));
    CHECK(classical_prob(CountVector({1, 1}), BinPartition({1, 1})).rational() == frac(1, 2));
    CHECK(classical_prob(CountVector({1, 3}), BinPartition({1, 3})).rational() == frac(27, 64));
}

TEST_CASE("quantum factor examples") {
    CHECK(quantum_factor(CountVector({2, 0}), BinPartition({1, 1}), ParticleKind::boson).rational() == frac(4, 3));
    CHECK(quantum_factor(CountVector({1, 1}), BinPartition({2, 2}), ParticleKind::fermion).rational() == frac(4, 3));
    for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
        CHECK(quantum_factor(CountVector({0, 1, 0}), BinPartition({2, 3, 1}), kind).rational() == 1);
    }
}

TEST_CASE("quantum_prob examples") {
    CHECK(exact_p({1, 1}, {1, 1}, ParticleKind::boson) == frac(1, 3));
    CHECK(exact_p({1, 1}, {2, 2}, ParticleKind::fermion) == frac(2, 3));
    const CountVector n({1, 2, 1});
    const BinPartition k({2, 1, 3});
    CHECK(quantum_prob(n, k, ParticleKind::distinguishable, NumericMode::exact).rational() ==
          classical_prob(n, k, NumericMode::exact).rational());
}

TEST_CASE("frozen Fock-state oracle values") {
    // Rational values from an independent Python enumeration.
    CHECK(exact_p({2, 1, 0}, {1, 2, 2}, ParticleKind::boson) == frac(2, 35));
    CHECK(exact_p({1, 1, 1}, {2, 2, 2}, ParticleKind::boson) == frac(1, 7));
    CHECK(exact_p({3, 2}, {2, 5}, ParticleKind::boson) == frac(10, 77));
    CHECK(exact_p({2, 1, 1}, {2, 3, 1}, ParticleKind::fermion) == frac(1, 5));
    CHECK(exact_p({1, 2}, {3, 3}, ParticleKind::fermion) == frac(9, 20));
    CHECK(exact_p({1, 1, 2}, {1, 2, 3}, ParticleKind::distinguishable) == frac(1, 6));
    CHECK(exact_p({2, 3}, {3, 4}, ParticleKind::distinguishable) == frac(5760, 16807));
}

TEST_CASE("live Fock enumeration matches every count vector") {
    const std::vector<std::vector<std::int64_t>> partitions = {{1, 1}, {2, 1}, {1, 2, 2}, {3, 1, 2}, {1, 1, 1, 2}};
    for (auto kind : {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion}) {
        for (const auto& k : partitions) {
            const BinPartition bins(k);
            for (std::int64_t total = 1; total <= 4; ++total) {
                if (kind == ParticleKind::fermion && total > bins.ports()) continue;
                const auto census = fock_census(total, k, kind);
                for_each_count_vector(total, k.size(), [&](const CountVector& n) {
                    const std::vector<std::int64_t> key(n.counts().begin(), n.counts().end());
                    const auto it = census.find(key);
                    const Rational expected = it == census.end() ? Rational(0) : it->second;
                    CHECK(quantum_prob(n, bins, kind, NumericMode::exact).rational() == expected);
                });
            }
        }
    }
}

TEST_CASE("fermion overflow is exactly zero") {
    CHECK(exact_p({2, 0}, {1, 3}, ParticleKind::fermion) == 0);
    CHECK(exact_p({0, 4, 0}, {2, 3, 1}, ParticleKind::fermion) == 0);
    const auto logp = quantum_prob(CountVector({2, 0}), BinPartition({1, 3}), ParticleKind::fermion,
                                   NumericMode::logspace);
    CHECK(std::isinf(logp.log()));
    CHECK(logp.log() < 0);
    CHECK(factorize(CountVector({3, 0, 1}), BinPartition({2, 1, 1}), ParticleKind::fermion).product().rational() == 0);
}

TEST_CASE("supported fermion counts have positive quantum factor") {
    for_each_count_vector(4, 3, [](const CountVector& n) {
        if (n[0] <= 2 && n[1] <= 1 && n[2] <= 3) {
            CHECK(quantum_factor(n, BinPartition({2, 1, 3}), ParticleKind::fermion, NumericMode::exact).rational() > 0);
        }
    });
}

TEST_CASE("empty system is a point mass") {
    CHECK(exact_p({0, 0}, {2, 3}, ParticleKind::boson) == 1);
    CHECK(exact_p({0, 0}, {2, 3}, ParticleKind::fermion) == 1);
    CHECK(exact_p({0}, {4}, ParticleKind::distinguishable) == 1);
}

TEST_CASE("single bin holds everything") {
    for (auto kind : {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion}) {
        CHECK(exact_p({3}, {5}, kind) == 1);
    }
}

TEST_CASE("average configuration probability") {
    CHECK(avg_configuration_prob(1, 5, ParticleKind::boson).rational() == frac(1, 5));
    CHECK(avg_configuration_prob(2, 2, ParticleKind::boson).rational() == frac(1, 3));
    CHECK(avg_configuration_prob(2, 4, ParticleKind::fermion).rational() == frac(1, 6));
    CHECK_THROWS(avg_configuration_prob(5, 4, ParticleKind::fermion));
}

TEST_CASE("exponential smallness") {
    const double two_ln2 = 2.0 * std::numbers::ln2;
    CHECK(exponential_smallness(Rational(1), 10, ParticleKind::boson).gamma == doctest::Approx(two_ln2).epsilon(1e-14));
    CHECK(exponential_smallness(frac(1, 2), 10, ParticleKind::fermion).gamma ==
          doctest::Approx(two_ln2).epsilon(1e-14));

    // leading order against 1/C(2N-1, N) and 1/C(2N, N) at N = 100
    const auto b = exponential_smallness(Rational(1), 100, ParticleKind::boson);
    const auto f = exponential_smallness(frac(1, 2), 100, ParticleKind::fermion);
    CHECK(std::abs(b.log_p - (-135.06008890071855)) < 0.02);
    CHECK(std::abs(f.log_p - (-135.75323608127849)) < 0.02);

    // N = 2 against the exact 1/3 within an O(1/N) factor
    const double small = exponential_smallness(Rational(1), 2, ParticleKind::boson).log_p;
    CHECK(std::abs(small - std::log(1.0 / 3.0)) < 0.5);
}

TEST_CASE("layer decomposition") {
    const CountVector n({1, 1, 2});
    const BinPartition k({1, 2, 3});
    const auto d = factorize(n, k, ParticleKind::distinguishable);
    REQUIRE(d.layers.size() == 2);
    CHECK(d.layers[0].total == 4);
    CHECK(d.layers[0].ports == 6);
    CHECK(d.layers[1].total == 3);
    CHECK(d.layers[1].ports == 5);
    CHECK(d.layers[1].qbar == frac(2, 5));
    CHECK(d.layers[1].xbar == frac(1, 3));
    CHECK(d.product().rational() == classical_prob(n, k, NumericMode::exact).rational());

    const CountVector nb({1, 1, 1});
    const BinPartition kb({2, 2, 2});
    CHECK(factorize(nb, kb, ParticleKind::boson).product().rational() == exact_p({1, 1, 1}, {2, 2, 2}, ParticleKind::boson));

    const auto single = factorize(CountVector({3, 2}), BinPartition({2, 5}), ParticleKind::boson);
    CHECK(single.layers.size() == 1);
    CHECK(single.product().rational() == frac(10, 77));
}

TEST_CASE("logspace agrees with exact") {
    for (auto kind : {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion}) {
        const CountVector n({7, 11, 4});
        const BinPartition k({10, 20, 12});
        const double exact = log_of(quantum_prob(n, k, kind, NumericMode::exact).rational());
        const double logs = quantum_prob(n, k, kind, NumericMode::logspace).log();
        CHECK(std::abs(logs - exact) <= 1e-12 * std::abs(exact));
    }
}

TEST_CASE("batched binary range matches single calls") {
    std::vector<double> out(41);
    for (auto kind : {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion}) {
        binary_log_prob_range(300, 250, 600, kind, 120, out);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto k = 120 + static_cast<std::int64_t>(i);
            const double one = binary_prob(k, 300, 250, 600, kind, NumericMode::logspace).log();
            CHECK(std::abs(out[i] - one) <= 1e-10 * std::abs(one));
        }
    }
}

TEST_CASE("count vector enumeration") {
    std::int64_t seen = 0;
    for_each_count_vector(5, 3, [&](const CountVector& n) {
        CHECK(n.total() == 5);
        ++seen;
    });
    CHECK(seen == 21);
    CHECK(count_vector_space_size(5, 3) == 21);
    CHECK(count_vector_space_size(12, 4) == 455);
}

TEST_CASE("invalid inputs throw") {
    CHECK_THROWS(classical_prob(CountVector({1, 1}), BinPartition({1, 1, 1})));
    CHECK_THROWS(BinPartition({2, 0}));
    CHECK_THROWS(CountVector({1, -1}));
}
