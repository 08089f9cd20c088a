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

#include <cstddef>
#include <vector>

namespace qcount {

/// p[i] is the image of i.
using Permutation = std::vector<int>;

/// All n! permutations in lexicographic order; index 0 is the identity.
std::vector<Permutation> all_permutations(int n);

/// Lexicographic rank of p among permutations of the same size.
std::size_t permutation_rank(const Permutation& p);

/// (a after b)(i) = a[b[i]].
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& p);

int cycle_count(const Permutation& p);
int permutation_sign(const Permutation& p);

/// Cycle lengths in descending order.
std::vector<int> cycle_type(const Permutation& p);

}  // namespace qcount
