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
#include <complex>
#include <cstdlib>
#include <random>
#include <string_view>
#include <vector>

#include "qcount/haar_mc.hpp"
#include "qcount/kernels.hpp"
#include "qcount/log_factorial.hpp"

using namespace qcount;

namespace {

const kernels::KernelSet* fast_or_skip() {
    const auto* fast = kernels::avx2_kernels();
    if (fast == nullptr) MESSAGE("AVX2 kernels unavailable on this host, equivalence checks skipped");
    return fast;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("dispatch picks a kernel set") {
    const auto& k = kernels::active();
    const char* forced = std::getenv("QCOUNT_FORCE_SCALAR");
    const bool scalar_only = forced != nullptr && std::string_view(forced) != "0" && *forced != '\0';
    if (kernels::avx2_kernels() != nullptr && !scalar_only) {
        CHECK(k.isa == kernels::Isa::avx2);
    } else {
        CHECK(k.isa == kernels::Isa::scalar);
    }
    CHECK(kernels::scalar_kernels().isa == kernels::Isa::scalar);
    CHECK(kernels::to_string(kernels::Isa::avx2) == "avx2");
}

TEST_CASE("scalar gather against a direct sum") {
    const auto table = log_factorial_table();
    const std::vector<kernels::GatherTerm> terms = {{1.0, 0, 1}, {-1.0, 10, -1}, {2.0, 5, 0}};
    std::vector<double> out(9);
    kernels::scalar_kernels().gather_linear_sum(table, terms, 0.5, 0.25, 1, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto k = static_cast<std::int64_t>(i) + 1;
        const double expected = 0.5 + 0.25 * static_cast<double>(k) + log_factorial(k) - log_factorial(10 - k) +
                                2.0 * log_factorial(5);
        CHECK(out[i] == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("gather equivalence across lengths") {
    const auto* fast = fast_or_skip();
    if (fast == nullptr) return;
    std::mt19937_64 rng(1);
    const auto table = random_vector(5000, rng);
    const std::vector<kernels::GatherTerm> terms = {{1.0, 3, 1}, {-0.5, 4000, -2}, {3.0, 17, 0}, {-1.0, 100, 3}};
    for (std::size_t len : {0u, 1u, 3u, 4u, 5u, 15u, 64u, 257u}) {
        std::vector<double> a(len);
        std::vector<double> b(len);
        kernels::scalar_kernels().gather_linear_sum(table, terms, -1.0, 0.01, 7, a);
        fast->gather_linear_sum(table, terms, -1.0, 0.01, 7, b);
        CHECK(a == b);
    }
}

TEST_CASE("quadratic batch equivalence") {
    const auto* fast = fast_or_skip();
    if (fast == nullptr) return;
    for (std::size_t len : {1u, 4u, 7u, 33u, 1000u}) {
        std::vector<double> a(len);
        std::vector<double> b(len);
        kernels::scalar_kernels().quadratic_batch(-3.25, -0.002, 412.5, 380, a);
        fast->quadratic_batch(-3.25, -0.002, 412.5, 380, b);
        CHECK(a == b);
    }
}

TEST_CASE("ryser update and product equivalence") {
    const auto* fast = fast_or_skip();
    if (fast == nullptr) return;
    std::mt19937_64 rng(2);
    for (std::size_t len : {1u, 2u, 3u, 4u, 5u, 8u, 13u, 14u}) {
        const auto re = random_vector(len, rng);
        const auto im = random_vector(len, rng);
        const auto cr = random_vector(len, rng);
        const auto ci = random_vector(len, rng);
        for (double sign : {1.0, -1.0}) {
            auto r1 = re;
            auto i1 = im;
            auto r2 = re;
            auto i2 = im;
            kernels::scalar_kernels().ryser_update(r1, i1, cr, ci, sign);
            fast->ryser_update(r2, i2, cr, ci, sign);
            CHECK(r1 == r2);
            CHECK(i1 == i2);
        }
        const auto p1 = kernels::scalar_kernels().complex_product(re, im);
        const auto p2 = fast->complex_product(re, im);
        CHECK(std::abs(p1 - p2) <= 1e-13 * std::abs(p1));
    }
}

TEST_CASE("unitarity deviation equivalence") {
    const auto* fast = fast_or_skip();
    if (fast == nullptr) return;
    Rng rng(3);
    for (int dim = 1; dim <= 12; ++dim) {
        ComplexMatrix m = sample_haar_unitary(dim, rng).entries();
        m(0, 0) += 1e-6;
        const std::span<const std::complex<double>> view(m.data(), static_cast<std::size_t>(dim * dim));
        const double a = kernels::scalar_kernels().unitarity_deviation(view, static_cast<std::size_t>(dim));
        const double b = fast->unitarity_deviation(view, static_cast<std::size_t>(dim));
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a > 1e-7);
    }
}

TEST_CASE("permanent does not depend on the kernel path") {
    Rng rng(4);
    std::normal_distribution<double> g;
    for (int dim = 1; dim <= 9; ++dim) {
        ComplexMatrix a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) = {g(rng), g(rng)};
        const auto fast = permanent(a);
        const auto slow = permanent_naive(a);
        CHECK(std::abs(fast - slow) <= 1e-10 * std::max(1.0, std::abs(slow)));
    }
}
