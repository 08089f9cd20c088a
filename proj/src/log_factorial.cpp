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

#include "qcount/log_factorial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qcount {

namespace {

// Bernoulli-number coefficients of the Stirling series for ln n!.
constexpr double kStirlingCoefficients[] = {
    1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0,
};

double stirling_series(double n) {
    const double inv = 1.0 / n;
    const double inv2 = inv * inv;
    double term = inv;
    double sum = 0.0;
    for (double c : kStirlingCoefficients) {
        sum += c * term;
        term *= inv2;
    }
    return sum;
}

std::vector<double> build_table() {
    std::vector<double> table(static_cast<std::size_t>(kLogFactorialTableMax) + 1);
    // Exact products while they fit in a double's 53-bit mantissa range,
    // lgamma afterwards.
    double factorial = 1.0;
    table[0] = 0.0;
    for (std::size_t n = 1; n < table.size(); ++n) {
        if (n <= 20) {
            factorial *= static_cast<double>(n);
            table[n] = std::log(factorial);
        } else {
            table[n] = std::lgamma(static_cast<double>(n) + 1.0);
        }
    }
    return table;
}

}  // namespace

std::span<const double> log_factorial_table() {
    static const std::vector<double> table = build_table();
    return table;
}

double log_factorial(std::int64_t n) {
    if (n < 0) throw std::domain_error("log_factorial of a negative integer");
    if (n <= kLogFactorialTableMax) return log_factorial_table()[static_cast<std::size_t>(n)];
    const double x = static_cast<double>(n);
    return x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x) + stirling_series(x);
}

double log_rising(std::int64_t a, std::int64_t n) {
    if (a < 1 || n < 0) throw std::domain_error("log_rising needs a >= 1 and n >= 0");
    return log_factorial(a + n - 1) - log_factorial(a - 1);
}

double log_falling(std::int64_t a, std::int64_t n) {
    if (n < 0 || n > a) throw std::domain_error("log_falling needs 0 <= n <= a");
    return log_factorial(a) - log_factorial(a - n);
}

double stirling_remainder(std::int64_t n) {
    if (n < 1) throw std::domain_error("stirling_remainder needs n >= 1");
    const double x = static_cast<double>(n);
    if (n >= 64) return stirling_series(x);
    return log_factorial(n) - (x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x));
}

}  // namespace qcount
