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

// Monte Carlo side of the library: Haar-random unitaries, permanents and
// determinants, fixed-network transition probabilities and the seeded
// averaging engine.
//
// Matrix convention: U(k, l) is the amplitude for a particle entering port k
// to leave through port l, so a transition n -> s uses rows from the input
// occupation n and columns from the output occupation s.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qcount/types.hpp"

namespace qcount {

using ComplexMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline constexpr int kMaxPermanentDim = 14;
inline constexpr int kMaxTransitionParticles = 10;
inline constexpr int kMaxBinnedParticles = 8;
inline constexpr int kMaxBinnedPorts = 12;
inline constexpr double kUnitarityTolerance = 1e-12;

class UnitaryMatrix {
public:
    /// Throws std::invalid_argument when the matrix is not square or
    /// max |U^dagger U - I| exceeds kUnitarityTolerance.
    explicit UnitaryMatrix(ComplexMatrix entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const ComplexMatrix& entries() const { return entries_; }
    std::complex<double> operator()(int k, int l) const { return entries_(k, l); }

    /// max_{ij} |(U^dagger U - I)_{ij}|
    double unitarity_deviation() const;

    static UnitaryMatrix identity(int dim);

private:
    ComplexMatrix entries_;
};

/// splitmix64 finaliser, used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the stream that handles chunk `index` under master seed `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// QR of a standard complex Gaussian matrix, with the phases of diag(R)
/// moved into Q so the result is Haar distributed.
UnitaryMatrix sample_haar_unitary(int dim, Rng& rng);
UnitaryMatrix sample_haar_unitary(int dim, std::uint64_t seed);

/// Ryser formula over a Gray-code walk of column subsets.
std::complex<double> permanent(const ComplexMatrix& a);

/// Sum over all n! permutations; reference for small matrices.
std::complex<double> permanent_naive(const ComplexMatrix& a);

std::complex<double> determinant(const ComplexMatrix& a);

/// U[n|s]: row k repeated n_k times, column l repeated s_l times.
ComplexMatrix submatrix(const UnitaryMatrix& u, const OccupationVector& rows, const OccupationVector& cols);

/// |per U[in|out]|^2 / (in! out!) for bosons, |det U[in|out]|^2 for
/// fermions, per(|U[in|out]|^2) / out! for distinguishable particles.
double transition_prob(const UnitaryMatrix& u, const OccupationVector& in, const OccupationVector& out,
                       ParticleKind kind);

/// Calls visit(occ) for every occupation of `ports` ports holding `total`
/// particles, at most `cap` per port, in lexicographically descending order.
void for_each_occupation(int total, int ports, int cap, const std::function<void(const OccupationVector&)>& visit);

/// Bin counts of an output occupation; bin i covers the next K_i ports.
CountVector bin_counts(const OccupationVector& occ, const BinPartition& bins);

/// Counting distribution of one fixed network and input, from all output
/// occupations. Requires N <= 8 and M <= 12.
std::map<CountVector, double> binned_prob_fixed_U(const UnitaryMatrix& u, const OccupationVector& in,
                                                  const BinPartition& bins, ParticleKind kind);

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;  ///< sample standard deviation / sqrt(samples)
    std::int64_t samples = 0;
    std::uint64_t seed = 0;

    /// |mean - target| <= k std_error, with a floor of 1e-12 for
    /// estimators that are exactly constant.
    bool consistent_with(double target, double k = 3.0) const;
};

enum class McMode { haar_average, input_average, scattershot };

std::string_view to_string(McMode mode);
McMode parse_mc_mode(std::string_view text);

struct McParams {
    ParticleKind kind = ParticleKind::boson;
    BinPartition bins{std::vector<std::int64_t>{1}};
    int total = 1;
    /// haar_average input; defaults to one particle in each of the first N
    /// ports (wrapping around when N > M).
    std::optional<OccupationVector> input;
    /// input_average network; defaults to a Haar draw from the master seed.
    std::optional<UnitaryMatrix> unitary;
    /// 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Per-count estimates of the average counting probability. Each sample
/// contributes the exact distribution of its network and input, so the
/// estimator is unbiased with low variance. Results depend only on the
/// seed, never on the thread count.
std::map<CountVector, MCEstimate> mc_average(McMode mode, const McParams& params, std::int64_t samples,
                                             std::uint64_t seed);

/// The network used by input_average when McParams::unitary is empty.
UnitaryMatrix default_fixed_unitary(int dim, std::uint64_t seed);

struct DensityCoefficient {
    OccupationVector n;
    OccupationVector m;
    std::complex<double> weight;  ///< rho_{n m}
};

struct MomentCheck {
    OccupationVector n;
    OccupationVector m;
    OccupationVector s;
    Rational exact;
    MCEstimate real;
    MCEstimate imag;
    bool consistent = false;
};

struct BinCheck {
    CountVector counts;
    double exact = 0.0;
    MCEstimate estimate;
    bool consistent = false;
};

struct MixedStateReport {
    std::vector<MomentCheck> moments;
    std::vector<BinCheck> bins;

    bool all_consistent() const;
};

/// Averages per(U[n|s]) conj(per(U[m|s])) (determinants for fermions) over
/// Haar unitaries for every coefficient pair and every output s in
/// `outputs` (all outputs when empty), and the binned distribution of the
/// mixed input rho against the pure-state average. Requires N <= 4, M <= 6,
/// rho Hermitian with unit trace.
MixedStateReport mixed_state_check(std::span<const DensityCoefficient> rho, int ports, const BinPartition& bins,
                                   ParticleKind kind, std::int64_t samples, std::uint64_t seed,
                                   std::span<const OccupationVector> outputs = {}, unsigned threads = 0);

}  // namespace qcount
