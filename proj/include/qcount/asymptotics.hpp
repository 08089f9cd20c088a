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

// Large-N behaviour of the binned counting probabilities: the Gaussian law
// inside the window |n_i - N q_i| <= A N^{2/3 - eps}, explicit tail bounds
// outside it, and the Kullback-Leibler and product-asymptotic machinery
// both rest on.
//
// Everything returns natural logs. Gaussian error terms are reported as
// scales only; the certified inequalities are tail_bound,
// product_asymptotic's bracket and quantum_factor_asymptotic's bounds.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcount/types.hpp"

namespace qcount {

/// Window constants A > 0 and 0 < epsilon < 1/6.
class Window {
public:
    Window(double amplitude, double epsilon);

    /// A = 1, epsilon = 0.1.
    static Window defaults() { return Window(1.0, 0.1); }

    double amplitude() const { return amplitude_; }
    double epsilon() const { return epsilon_; }

    /// A N^{2/3 - epsilon}.
    double half_width(std::int64_t total) const;

    /// A^2 N^{1/3 - 2 epsilon}, the exponent scale of the tail bounds.
    double tail_exponent(std::int64_t total) const;

private:
    double amplitude_;
    double epsilon_;
};

/// Particle density alpha = N/M and bin fractions q (summing to 1).
struct DensityParams {
    Rational alpha;
    std::vector<Rational> q;

    DensityParams(Rational alpha, std::vector<Rational> q);

    /// M = N / alpha; throws unless it is an integer.
    std::int64_t ports_for(std::int64_t total) const;
    /// Bins for N particles: K_i = q_i N / alpha.
    BinPartition bins_for(std::int64_t total) const;
};

/// Shifted fractions X_i = (q_i +- alpha x_i) / (1 +- alpha).
struct XVars {
    std::vector<double> X;
};

/// Binary Kullback-Leibler divergence x ln(x/q) + (1-x) ln((1-x)/(1-q)),
/// with 0 ln 0 = 0. Requires 0 < q < 1 and 0 <= x <= 1.
double kl2(double x, double q);
/// Same divergence from exact fractions; x - q is formed exactly first.
double kl2(const Rational& x, const Rational& q);

/// sum_i x_i ln(x_i/q_i) over two probability vectors, q_i > 0.
double klr(std::span<const double> x, std::span<const double> q);
/// Exact-fraction variant; both vectors must sum to exactly 1.
double klr(std::span<const Rational> x, std::span<const Rational> q);

/// Whether every bin satisfies |n_i - N q_i| <= A N^{2/3 - epsilon}.
bool in_window(const CountVector& n, const BinPartition& bins, const Window& window);

/// Index of the first bin violating the window, if any.
std::optional<std::size_t> first_window_violation(const CountVector& n, const BinPartition& bins,
                                                  const Window& window);

/// The layered form |n_l - N_l qbar_l| <= Abar N^{2/3 - epsilon},
/// l = 1..r-1, with Abar = window.amplitude().
bool in_layered_window(const CountVector& n, const BinPartition& bins, const Window& window);

struct GaussianLaw {
    double log_value;
    double leading_error_scale;
};

/// ln of the Gaussian approximation
///   exp{-N sum (x_i - q_i)^2 / (2 (1 + s alpha) q_i)} /
///   ((2 pi (1 + s alpha) N)^{(r-1)/2} prod sqrt(q_i)),
/// s = +1, -1, 0 for bosons, fermions, distinguishable particles, plus the
/// relative error scale (1 - alpha [fermion])^{-3} N^{-3 eps} + alpha [boson] / N.
/// Throws for counts outside the window and for fermions with alpha >= 1.
GaussianLaw gaussian_law(const CountVector& n, const BinPartition& bins, ParticleKind kind, double alpha,
                         const Window& window = Window::defaults());

/// ln of the fixed-M, N >> M boson form
///   M^{(r-1)/2} exp{-M sum (x_i - q_i)^2/(2 q_i)} / ((2 pi N^2)^{(r-1)/2} prod sqrt(q_i)).
double gaussian_high_density(const CountVector& n, const BinPartition& bins, ParticleKind kind);

/// Joint density of xi = sqrt(M) (x - q):
///   exp{-sum xi_i^2/(2 q_i)} / ((2 pi)^{(r-1)/2} prod sqrt(q_i)).
double high_density_xi_density(std::span<const double> xi, std::span<const double> q);

/// ln of an explicit upper bound on the counting probability for counts
/// outside the window. With T = A^2 N^{1/3 - 2 eps}:
///   distinguishable  ln(2 pi sqrt(N)) - T
///   bosons           ln(2 pi sqrt(N) (1 + alpha)) - T/(1 + alpha)
///   fermions         ln(2 pi q (1 - q) N^{5/2} / alpha^2) - T/(1 - alpha)
/// where q is the fraction of the first violating bin.
double tail_bound(const CountVector& n, const BinPartition& bins, ParticleKind kind, double alpha,
                  const Window& window = Window::defaults());

struct StirlingTerm {
    double ln_factorial;
    double theta;  ///< n! = sqrt(2 pi (n + theta)) (n/e)^n
};

StirlingTerm stirling_lnfact(std::int64_t n);

XVars x_vars(const CountVector& n, const BinPartition& bins, ParticleKind kind, double alpha);

struct ProductAsymptotic {
    double log_product_exact;  ///< sum_{l=1}^n ln(1 +- l/m)
    double log_asymptotic;     ///< (n +- m + 1/2) ln(1 +- n/m) - n
    double log_lower;          ///< exponent n +- m + {0 | 1} (+ | -)
    double log_upper;          ///< exponent n +- m + {1 | 0} (+ | -)
};

/// sign = +1 or -1. The lower/upper values omit the common 1 + O(1/m)
/// factor, so the exact sum can sit O(1/m) outside them.
ProductAsymptotic product_asymptotic(std::int64_t n, std::int64_t m, int sign);

struct QuantumFactorAsymptotic {
    double log_leading;
    double log_bound_upper;
    double log_bound_lower;
};

/// Leading-order ln Q and the bracketing bounds built from
/// Q_as = exp{(N +- N/alpha) K_r(X|q)}:
///   bosons:   upper Q_as (1 + alpha),
///             lower Q_as (1 + alpha)^{-r} prod (X_i/q_i)^{-1}
///   fermions: upper Q_as (1 - alpha)^{-r} prod (X_i/q_i)^{-1},
///             lower Q_as (1 - alpha)
/// Bounds hold up to a 1 + O(1/M) factor.
QuantumFactorAsymptotic quantum_factor_asymptotic(const CountVector& n, const BinPartition& bins,
                                                  ParticleKind kind, double alpha);

/// ln of the Gaussian law over n = first .. first + out.size() - 1 for two
/// bins, through the vectorised quadratic kernel.
void gaussian_log_binary_range(std::int64_t total, const BinPartition& bins, ParticleKind kind, double alpha,
                               std::int64_t first, std::span<double> out);

}  // namespace qcount
