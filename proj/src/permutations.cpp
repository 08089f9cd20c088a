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

#include "qcount/permutations.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace qcount {

std::vector<Permutation> all_permutations(int n) {
    if (n < 0) throw std::invalid_argument("permutation size must be non-negative");
    Permutation p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<Permutation> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::size_t permutation_rank(const Permutation& p) {
    // Lehmer code in the factorial number system.
    const std::size_t n = p.size();
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller = 0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (p[j] < p[i]) ++smaller;
        }
        rank = rank * (n - i) + smaller;
    }
    return rank;
}

Permutation compose(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) throw std::invalid_argument("composing permutations of different sizes");
    Permutation out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[static_cast<std::size_t>(b[i])];
    return out;
}

Permutation inverse(const Permutation& p) {
    Permutation out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
    return out;
}

std::vector<int> cycle_type(const Permutation& p) {
    std::vector<bool> seen(p.size(), false);
    std::vector<int> lengths;
    for (std::size_t start = 0; start < p.size(); ++start) {
        if (seen[start]) continue;
        int length = 0;
        for (std::size_t i = start; !seen[i]; i = static_cast<std::size_t>(p[i])) {
            seen[i] = true;
            ++length;
        }
        lengths.push_back(length);
    }
    std::sort(lengths.begin(), lengths.end(), std::greater<>());
    return lengths;
}

int cycle_count(const Permutation& p) { return static_cast<int>(cycle_type(p).size()); }

int permutation_sign(const Permutation& p) {
    return ((static_cast<int>(p.size()) - cycle_count(p)) % 2 == 0) ? 1 : -1;
}

}  // namespace qcount
