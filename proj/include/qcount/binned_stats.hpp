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

// Haar-averaged probabilities of counting N particles in r output bins.
//
//   classical:  P(n|K) = N! / prod n_i!  prod q_i^{n_i},   q_i = K_i / M
//   quantum:    P(n|K) = P_classical(n|K) * Q(n|K)
//               Q(n|K) = prod_i prod_{l<n_i} (1 +- l/K_i) / prod_{l<N} (1 +- l/M)
//
// with + for bosons and - for fermions. Exact mode returns reduced
// rationals; log-space mode returns natural logs built from ln(n!).

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qcount/types.hpp"

namespace qcount {

ProbValue classical_prob(const CountVector& n, const BinPartition& bins,
                         NumericMode mode = NumericMode::automatic);

/// The boson/fermion correction factor Q. Zero for fermions with some
/// n_i > K_i. Throws for distinguishable particles and for fermions with N > M.
ProbValue quantum_factor(const CountVector& n, const BinPartition& bins, ParticleKind kind,
                         NumericMode mode = NumericMode::automatic);

/// Average counting probability for any particle kind; distinguishable
/// particles give exactly classical_prob.
ProbValue quantum_prob(const CountVector& n, const BinPartition& bins, ParticleKind kind,
                       NumericMode mode = NumericMode::automatic);

/// Two-bin probability P_{N,M}(n|K) = P(n, N-n | K, M-K).
ProbValue binary_prob(std::int64_t n, std::int64_t total, std::int64_t bin_ports, std::int64_t ports,
                      ParticleKind kind, NumericMode mode = NumericMode::automatic);

/// ln P_{N,M}(n|K) for n = first, ..., first + out.size() - 1 through the
/// vectorised log-factorial gather kernel. Entries with zero probability
/// (fermion overflow, or an empty bin with particles) are -infinity.
void binary_log_prob_range(std::int64_t total, std::int64_t bin_ports, std::int64_t ports,
                           ParticleKind kind, std::int64_t first, std::span<double> out);

/// Average probability of one particular input-to-output transition:
/// N!/(M (M+1) ... (M+N-1)) for bosons, N!/(M (M-1) ... (M-N+1)) for
/// fermions, M^-N for distinguishable particles.
ProbValue avg_configuration_prob(std::int64_t total, std::int64_t ports, ParticleKind kind,
                                 NumericMode mode = NumericMode::automatic);

struct SmallnessEstimate {
    double gamma;  ///< exponential rate per particle
    double log_p;  ///< leading-order ln of the configuration probability
};

/// Rate gamma = ln(1/alpha) + (1 +- 1/alpha) ln(1 +- alpha) at fixed density
/// alpha = N/M, and ln p = ln sqrt(2 pi N (1 +- alpha)) - gamma N.
SmallnessEstimate exponential_smallness(const Rational& alpha, std::int64_t total, ParticleKind kind);

struct Layer {
    std::size_t index;     ///< 1-based layer number s
    std::int64_t total;    ///< N_s: particles not yet assigned to earlier bins
    std::int64_t ports;    ///< M_s: ports not in earlier bins
    std::int64_t count;    ///< n_s
    std::int64_t bin_ports;  ///< K_s
    Rational qbar;         ///< K_s / M_s
    Rational xbar;         ///< n_s / N_s (0 when N_s = 0)
};

/// The r-1 two-bin layers whose probabilities multiply to the r-bin one.
struct LayerDecomposition {
    ParticleKind kind = ParticleKind::distinguishable;
    std::vector<Layer> layers;

    /// prod_s P_{N_s,M_s}(n_s|K_s).
    ProbValue product(NumericMode mode = NumericMode::exact) const;
};

/// Layers in bin order 1, ..., r-1. Requires r >= 2.
LayerDecomposition factorize(const CountVector& n, const BinPartition& bins, ParticleKind kind);

/// Calls visit(n) for every count vector with sum N over r bins, in
/// lexicographically descending order of (n_1, ..., n_r).
void for_each_count_vector(std::int64_t total, std::size_t bins,
                           const std::function<void(const CountVector&)>& visit);

/// C(N + r - 1, r - 1), saturating at INT64_MAX.
std::int64_t count_vector_space_size(std::int64_t total, std::size_t bins);

}  // namespace qcount
