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

#include "qcount/group_integrals.hpp"

#include <fmt/format.h>

#include <map>
#include <mutex>
#include <utility>

namespace qcount {

namespace {

BigInt factorial(std::int64_t n) {
    BigInt out;
    mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
    return out;
}

// Solves A x = b in place by Gauss-Jordan elimination over the rationals.
std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) throw std::domain_error("singular Gram system");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        const Rational inv = 1 / a[col][col];
        for (std::size_t k = col; k < n; ++k) a[col][k] *= inv;
        b[col] *= inv;
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const Rational factor = a[row][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    return b;
}

// Index tables shared by the moment expansions of one order.
struct SymmetricGroup {
    std::vector<Permutation> perms;
    std::vector<std::vector<std::size_t>> product;  // rank of (a after b)
    std::vector<std::size_t> inverse_rank;
    std::vector<int> sign;

    explicit SymmetricGroup(int order) : perms(all_permutations(order)) {
        const std::size_t count = perms.size();
        product.assign(count, std::vector<std::size_t>(count));
        inverse_rank.resize(count);
        sign.resize(count);
        for (std::size_t a = 0; a < count; ++a) {
            inverse_rank[a] = permutation_rank(inverse(perms[a]));
            sign[a] = permutation_sign(perms[a]);
            for (std::size_t b = 0; b < count; ++b) product[a][b] = permutation_rank(compose(perms[a], perms[b]));
        }
    }
};

const SymmetricGroup& symmetric_group(int order) {
    static const std::vector<SymmetricGroup> groups = [] {
        std::vector<SymmetricGroup> out;
        for (int k = 0; k <= kMaxMomentOrder; ++k) out.emplace_back(k);
        return out;
    }();
    return groups[static_cast<std::size_t>(order)];
}

void check_order(std::size_t order) {
    if (order < 1 || order > static_cast<std::size_t>(kMaxMomentOrder)) {
        throw std::invalid_argument(
            fmt::format("moment order {} outside the supported range 1..{}", order, kMaxMomentOrder));
    }
}

// Adds weight to counts[rank(tau sigma^-1)] for every sigma matching the rows
// and tau matching the columns.
void accumulate_moment(const SymmetricGroup& group, std::span<const int> rows, std::span<const int> cols,
                       std::span<const int> conj_rows, std::span<const int> conj_cols, long weight,
                       std::vector<long>& counts) {
    const std::size_t order = rows.size();
    std::vector<std::size_t> col_matches;
    for (std::size_t t = 0; t < group.perms.size(); ++t) {
        const auto& tau = group.perms[t];
        bool ok = true;
        for (std::size_t i = 0; i < order && ok; ++i) ok = cols[i] == conj_cols[static_cast<std::size_t>(tau[i])];
        if (ok) col_matches.push_back(t);
    }
    if (col_matches.empty()) return;
    for (std::size_t s = 0; s < group.perms.size(); ++s) {
        const auto& sigma = group.perms[s];
        bool ok = true;
        for (std::size_t i = 0; i < order && ok; ++i) ok = rows[i] == conj_rows[static_cast<std::size_t>(sigma[i])];
        if (!ok) continue;
        const std::size_t sigma_inv = group.inverse_rank[s];
        for (std::size_t t : col_matches) counts[group.product[t][sigma_inv]] += weight;
    }
}

Rational contract(const WeingartenTable& table, const std::vector<long>& counts) {
    Rational sum = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] != 0) sum += table.at_rank(k) * counts[k];
    }
    return sum;
}

}  // namespace

WeingartenTable::WeingartenTable(int order, std::int64_t dimension, std::vector<Permutation> permutations,
                                 std::vector<Rational> values)
    : order_(order), dimension_(dimension), permutations_(std::move(permutations)), values_(std::move(values)) {}

const Rational& WeingartenTable::operator()(const Permutation& p) const {
    if (static_cast<int>(p.size()) != order_) throw std::invalid_argument("permutation size does not match table");
    return values_[permutation_rank(p)];
}

WeingartenTable weingarten_table(int order, std::int64_t dimension) {
    check_order(static_cast<std::size_t>(order));
    if (dimension < order) {
        throw std::invalid_argument(fmt::format(
            "Weingarten system is singular for M = {} < N = {}", dimension, order));
    }
    auto perms = all_permutations(order);
    const std::size_t count = perms.size();
    std::vector<std::vector<Rational>> gram(count, std::vector<Rational>(count));
    for (std::size_t a = 0; a < count; ++a) {
        const Permutation a_inv = inverse(perms[a]);
        for (std::size_t b = 0; b < count; ++b) {
            BigInt entry;
            mpz_ui_pow_ui(entry.get_mpz_t(), static_cast<unsigned long>(dimension),
                          static_cast<unsigned long>(cycle_count(compose(a_inv, perms[b]))));
            gram[a][b] = Rational(entry);
        }
    }
    std::vector<Rational> rhs(count, Rational(0));
    rhs[0] = 1;  // identity has rank 0
    auto values = solve_exact(std::move(gram), std::move(rhs));
    for (auto& v : values) v.canonicalize();
    return WeingartenTable(order, dimension, std::move(perms), std::move(values));
}

std::shared_ptr<const WeingartenTable> cached_weingarten_table(int order, std::int64_t dimension) {
    static std::mutex mutex;
    static std::map<std::pair<int, std::int64_t>, std::shared_ptr<const WeingartenTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{order, dimension}];
    if (!slot) slot = std::make_shared<const WeingartenTable>(weingarten_table(order, dimension));
    return slot;
}

Rational haar_moment(std::span<const int> rows, std::span<const int> cols, std::span<const int> conj_rows,
                     std::span<const int> conj_cols, std::int64_t dimension) {
    const std::size_t order = rows.size();
    if (cols.size() != order || conj_rows.size() != order || conj_cols.size() != order) {
        throw std::invalid_argument("haar_moment index lists must have equal lengths");
    }
    check_order(order);
    for (auto list : {rows, cols, conj_rows, conj_cols}) {
        for (int idx : list) {
            if (idx < 0 || idx >= dimension) throw std::invalid_argument(fmt::format("index {} out of range", idx));
        }
    }
    const auto& group = symmetric_group(static_cast<int>(order));
    std::vector<long> counts(group.perms.size(), 0);
    accumulate_moment(group, rows, cols, conj_rows, conj_cols, 1, counts);
    return contract(*cached_weingarten_table(static_cast<int>(order), dimension), counts);
}

PairAverage permanent_pair_average(const OccupationVector& n, const OccupationVector& m, const OccupationVector& s,
                                   std::int64_t dimension, ParticleKind kind) {
    if (kind == ParticleKind::distinguishable) {
        throw std::invalid_argument("permanent_pair_average needs bosons or fermions");
    }
    if (n.total() != m.total() || n.total() != s.total()) {
        throw std::invalid_argument("occupations n, m and s must hold the same number of particles");
    }
    if (n.ports() != dimension || m.ports() != dimension || s.ports() != dimension) {
        throw std::invalid_argument(fmt::format("occupation vectors must have M = {} entries", dimension));
    }
    const int order = n.total();
    check_order(static_cast<std::size_t>(order));
    if (kind == ParticleKind::fermion &&
        !(n.at_most_one_per_port() && m.at_most_one_per_port() && s.at_most_one_per_port())) {
        throw std::invalid_argument("fermion occupations must be 0 or 1");
    }

    PairAverage out;
    if (n == m) {
        BigInt denominator = 1;
        for (std::int64_t l = 0; l < order; ++l) {
            denominator *= static_cast<unsigned long>(dimension + statistics_sign(kind) * l);
        }
        out.closed_form = Rational(s.factorial_product() * n.factorial_product() * factorial(order), denominator);
        out.closed_form.canonicalize();
    } else {
        out.closed_form = 0;
    }

    // Expand per(U[n|s]) = sum_pi prod_i U_{k_pi(i), l_i} (det: with sgn pi)
    // on both sides and integrate term by term.
    const auto& group = symmetric_group(order);
    const std::vector<int> k = n.port_list();
    const std::vector<int> k_conj = m.port_list();
    const std::vector<int> l = s.port_list();
    std::vector<long> counts(group.perms.size(), 0);
    std::vector<int> rows(static_cast<std::size_t>(order));
    std::vector<int> conj_rows(static_cast<std::size_t>(order));
    const bool signed_sum = kind == ParticleKind::fermion;
    for (std::size_t a = 0; a < group.perms.size(); ++a) {
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = k[static_cast<std::size_t>(group.perms[a][i])];
        for (std::size_t b = 0; b < group.perms.size(); ++b) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                conj_rows[i] = k_conj[static_cast<std::size_t>(group.perms[b][i])];
            }
            const long weight = signed_sum ? group.sign[a] * group.sign[b] : 1;
            accumulate_moment(group, rows, l, conj_rows, l, weight, counts);
        }
    }
    out.weingarten_sum = contract(*cached_weingarten_table(order, dimension), counts);
    return out;
}

Rational weingarten_sum_identity(int order, std::int64_t dimension, ParticleKind kind) {
    if (kind == ParticleKind::distinguishable) {
        throw std::invalid_argument("weingarten_sum_identity needs bosons or fermions");
    }
    const auto table = cached_weingarten_table(order, dimension);
    Rational sum = 0;
    for (std::size_t r = 0; r < table->values().size(); ++r) {
        const int sign = kind == ParticleKind::fermion ? permutation_sign(table->permutations()[r]) : 1;
        sum += sign * table->values()[r];
    }
    sum *= Rational(factorial(order));
    sum.canonicalize();
    return sum;
}

}  // namespace qcount
