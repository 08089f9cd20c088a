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

// Exact Haar integrals over U(M) for small moment order N <= 4.
//
//   < prod_i U_{r_i c_i} prod_j conj(U_{r'_j c'_j}) >
//       = sum_{sigma, tau in S_N} prod_i delta(r_i, r'_sigma(i)) delta(c_i, c'_tau(i)) Wg(tau sigma^-1)
//
// Wg is obtained by inverting the Gram matrix G(a, b) = M^{#cycles(a^-1 b)}
// of permutation operators in exact rational arithmetic.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qcount/permutations.hpp"
#include "qcount/types.hpp"

namespace qcount {

inline constexpr int kMaxMomentOrder = 4;

class WeingartenTable {
public:
    WeingartenTable(int order, std::int64_t dimension, std::vector<Permutation> permutations,
                    std::vector<Rational> values);

    int order() const { return order_; }
    std::int64_t dimension() const { return dimension_; }
    std::span<const Permutation> permutations() const { return permutations_; }
    std::span<const Rational> values() const { return values_; }

    /// Wg(p); p must have order() entries.
    const Rational& operator()(const Permutation& p) const;
    const Rational& at_rank(std::size_t rank) const { return values_[rank]; }

private:
    int order_;
    std::int64_t dimension_;
    std::vector<Permutation> permutations_;
    std::vector<Rational> values_;
};

/// Requires 1 <= N <= 4 and M >= N.
WeingartenTable weingarten_table(int order, std::int64_t dimension);

/// Shared, cached table; safe to call from several threads.
std::shared_ptr<const WeingartenTable> cached_weingarten_table(int order, std::int64_t dimension);

/// Exact < prod U_{rows[i], cols[i]} prod conj(U_{conj_rows[j], conj_cols[j]}) >
/// over U(M). Indices are zero-based ports.
Rational haar_moment(std::span<const int> rows, std::span<const int> cols, std::span<const int> conj_rows,
                     std::span<const int> conj_cols, std::int64_t dimension);

struct PairAverage {
    Rational closed_form;     ///< delta_{n,m} s! n! N! / (M (M+1) ... ) or the fermion analogue
    Rational weingarten_sum;  ///< term-by-term expansion of both permanents (determinants)

    bool agree() const { return closed_form == weingarten_sum; }
};

/// < per(U[n|s]) conj(per(U[m|s])) > for bosons, with determinants for
/// fermions. Both routes are always evaluated.
PairAverage permanent_pair_average(const OccupationVector& n, const OccupationVector& m, const OccupationVector& s,
                                   std::int64_t dimension, ParticleKind kind);

/// N! sum_sigma Wg(sigma) for bosons, N! sum_sigma sgn(sigma) Wg(sigma) for
/// fermions, read off the Weingarten table.
Rational weingarten_sum_identity(int order, std::int64_t dimension, ParticleKind kind);

}  // namespace qcount
