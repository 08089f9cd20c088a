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

#include <cstdint>
#include <span>

namespace qcount {

/// Largest n served from the cached ln(n!) table.
inline constexpr std::int64_t kLogFactorialTableMax = 1'000'000;

/// ln(0!), ..., ln(kLogFactorialTableMax!). Built once on first use.
std::span<const double> log_factorial_table();

/// ln(n!) for n >= 0; Stirling series above the table.
double log_factorial(std::int64_t n);

/// ln(a (a+1) ... (a+n-1)) for integer a >= 1.
double log_rising(std::int64_t a, std::int64_t n);

/// ln(a (a-1) ... (a-n+1)) for 0 <= n <= a.
double log_falling(std::int64_t a, std::int64_t n);

/// ln(n!) - [n ln n - n + ln(2 pi n)/2], the Stirling remainder, for n >= 1.
/// Evaluated by its asymptotic series for large n so it keeps full relative
/// precision where the direct difference would cancel.
double stirling_remainder(std::int64_t n);

}  // namespace qcount
