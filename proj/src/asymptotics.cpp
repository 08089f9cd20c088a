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

#include "qcount/asymptotics.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qcount/kernels.hpp"
#include "qcount/log_factorial.hpp"

namespace qcount {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ln(1 + u) - u. The series branch avoids the cancellation near u = 0.
double log1p_minus(double u) {
    if (std::abs(u) >= 0.05) return std::log1p(u) - u;
    double term = -u * u / 2.0;
    double sum = term;
    double power = u * u;
    for (int k = 3; k < 30; ++k) {
        power *= -u;
        term = -power / k;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// sum x_i ln(x_i/q_i) with d_i = x_i - q_i given separately, 0 ln 0 = 0.
// Written as sum x_i (ln(1+u_i) - u_i) + sum d_i + sum d_i^2/q_i with
// u_i = d_i/q_i, so no first-order terms cancel when x is close to q.
double kl_from_offsets(std::span<const double> x, std::span<const double> q, std::span<const double> d) {
    double curved = 0.0;
    double linear = 0.0;
    double square = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0) curved += x[i] * log1p_minus(d[i] / q[i]);
        linear += d[i];
        square += d[i] * d[i] / q[i];
    }
    return std::max(0.0, curved + linear + square);
}

void check_dimensions(const CountVector& n, const BinPartition& bins) {
    if (n.bins() != bins.bins()) {
        throw std::invalid_argument(
            fmt::format("dimension mismatch: {} counts for {} bins", n.bins(), bins.bins()));
    }
}

void check_density(ParticleKind kind, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("density alpha must be finite and >= 0");
    if (kind == ParticleKind::fermion && alpha >= 1.0) {
        throw std::invalid_argument(fmt::format("fermion density alpha = {} must be below 1", alpha));
    }
}

double signed_density(ParticleKind kind, double alpha) { return statistics_sign(kind) * alpha; }

double deviation(const CountVector& n, const BinPartition& bins, std::size_t i) {
    return static_cast<double>(n[i]) - static_cast<double>(n.total()) * bins.fraction_value(i);
}

// sum_i (x_i - q_i)^2 / (2 q_i)
double chi_square_half(const CountVector& n, const BinPartition& bins) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n.bins(); ++i) {
        const double q = bins.fraction_value(i);
        const double d = n.fraction(i) - q;
        sum += d * d / (2.0 * q);
    }
    return sum;
}

double sum_log_fractions(const BinPartition& bins) {
    double sum = 0.0;
    for (std::size_t i = 0; i < bins.bins(); ++i) sum += std::log(bins.fraction_value(i));
    return sum;
}

}  // namespace

Window::Window(double amplitude, double epsilon) : amplitude_(amplitude), epsilon_(epsilon) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
        throw std::invalid_argument(fmt::format("window amplitude A = {} must be positive", amplitude));
    }
    if (!(epsilon > 0.0 && epsilon < 1.0 / 6.0)) {
        throw std::invalid_argument(fmt::format("window epsilon = {} must lie in (0, 1/6)", epsilon));
    }
}

double Window::half_width(std::int64_t total) const {
    return amplitude_ * std::pow(static_cast<double>(total), 2.0 / 3.0 - epsilon_);
}

double Window::tail_exponent(std::int64_t total) const {
    return amplitude_ * amplitude_ * std::pow(static_cast<double>(total), 1.0 / 3.0 - 2.0 * epsilon_);
}

DensityParams::DensityParams(Rational a, std::vector<Rational> fractions)
    : alpha(std::move(a)), q(std::move(fractions)) {
    if (alpha <= 0) throw std::invalid_argument("density alpha must be positive");
    if (q.empty()) throw std::invalid_argument("need at least one bin fraction");
    Rational sum = 0;
    for (const auto& v : q) {
        if (v <= 0 || v > 1) throw std::invalid_argument(fmt::format("bin fraction {} outside (0, 1]", v.get_str()));
        sum += v;
    }
    if (sum != 1) throw std::invalid_argument(fmt::format("bin fractions sum to {}, not 1", sum.get_str()));
}

std::int64_t DensityParams::ports_for(std::int64_t total) const {
    Rational m = Rational(total) / alpha;
    m.canonicalize();
    if (m.get_den() != 1 || m < 1) {
        throw std::invalid_argument(
            fmt::format("N = {} over alpha = {} is not a positive integer port count", total, alpha.get_str()));
    }
    return m.get_num().get_si();
}

BinPartition DensityParams::bins_for(std::int64_t total) const {
    return BinPartition::from_fractions(q, ports_for(total));
}

double kl2(double x, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error(fmt::format("kl2 needs 0 < q < 1, got q = {}", q));
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error(fmt::format("kl2 needs 0 <= x <= 1, got x = {}", x));
    const std::array<double, 2> xs = {x, 1.0 - x};
    const std::array<double, 2> qs = {q, 1.0 - q};
    const std::array<double, 2> ds = {x - q, q - x};
    return kl_from_offsets(xs, qs, ds);
}

double kl2(const Rational& x, const Rational& q) {
    if (!(q > 0 && q < 1)) throw std::domain_error(fmt::format("kl2 needs 0 < q < 1, got q = {}", q.get_str()));
    if (!(x >= 0 && x <= 1)) throw std::domain_error(fmt::format("kl2 needs 0 <= x <= 1, got x = {}", x.get_str()));
    const Rational d = x - q;
    const std::array<double, 2> xs = {x.get_d(), Rational(1 - x).get_d()};
    const std::array<double, 2> qs = {q.get_d(), Rational(1 - q).get_d()};
    const std::array<double, 2> ds = {d.get_d(), -d.get_d()};
    return kl_from_offsets(xs, qs, ds);
}

double klr(std::span<const double> x, std::span<const double> q) {
    if (x.size() != q.size() || x.empty()) throw std::invalid_argument("klr needs two vectors of equal length");
    double sx = 0.0;
    double sq = 0.0;
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(q[i] > 0.0)) throw std::domain_error("klr needs every q_i > 0");
        if (!(x[i] >= 0.0)) throw std::domain_error("klr needs every x_i >= 0");
        sx += x[i];
        sq += q[i];
        d[i] = x[i] - q[i];
    }
    if (std::abs(sx - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9) {
        throw std::domain_error("klr arguments must each sum to 1");
    }
    return kl_from_offsets(x, q, d);
}

double klr(std::span<const Rational> x, std::span<const Rational> q) {
    if (x.size() != q.size() || x.empty()) throw std::invalid_argument("klr needs two vectors of equal length");
    Rational sx = 0;
    Rational sq = 0;
    std::vector<double> xd(x.size());
    std::vector<double> qd(x.size());
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(q[i] > 0)) throw std::domain_error("klr needs every q_i > 0");
        if (!(x[i] >= 0)) throw std::domain_error("klr needs every x_i >= 0");
        sx += x[i];
        sq += q[i];
        xd[i] = x[i].get_d();
        qd[i] = q[i].get_d();
        d[i] = Rational(x[i] - q[i]).get_d();
    }
    if (sx != 1 || sq != 1) throw std::domain_error("klr arguments must each sum to 1");
    return kl_from_offsets(xd, qd, d);
}

std::optional<std::size_t> first_window_violation(const CountVector& n, const BinPartition& bins,
                                                  const Window& window) {
    check_dimensions(n, bins);
    const double width = window.half_width(n.total());
    for (std::size_t i = 0; i < n.bins(); ++i) {
        if (std::abs(deviation(n, bins, i)) > width) return i;
    }
    return std::nullopt;
}

bool in_window(const CountVector& n, const BinPartition& bins, const Window& window) {
    return !first_window_violation(n, bins, window).has_value();
}

bool in_layered_window(const CountVector& n, const BinPartition& bins, const Window& window) {
    check_dimensions(n, bins);
    const double width = window.half_width(n.total());
    std::int64_t remaining_particles = n.total();
    std::int64_t remaining_ports = bins.ports();
    for (std::size_t l = 0; l + 1 < bins.bins(); ++l) {
        const double qbar = static_cast<double>(bins[l]) / static_cast<double>(remaining_ports);
        if (std::abs(static_cast<double>(n[l]) - static_cast<double>(remaining_particles) * qbar) > width) {
            return false;
        }
        remaining_particles -= n[l];
        remaining_ports -= bins[l];
    }
    return true;
}

GaussianLaw gaussian_law(const CountVector& n, const BinPartition& bins, ParticleKind kind, double alpha,
                         const Window& window) {
    check_dimensions(n, bins);
    check_density(kind, alpha);
    if (n.total() < 1) throw std::invalid_argument("gaussian_law needs N >= 1");
    if (!in_window(n, bins, window)) {
        throw std::invalid_argument(
            fmt::format("counts ({}) lie outside the Gaussian window; use tail_bound", n.to_string()));
    }
    const double total = static_cast<double>(n.total());
    const double spread = 1.0 + signed_density(kind, alpha);
    const double r = static_cast<double>(n.bins());

    const double log_value = -total * chi_square_half(n, bins) / spread -
                             0.5 * (r - 1.0) * std::log(kTwoPi * spread * total) - 0.5 * sum_log_fractions(bins);

    const double fermion_alpha = kind == ParticleKind::fermion ? alpha : 0.0;
    const double boson_alpha = kind == ParticleKind::boson ? alpha : 0.0;
    const double scale = std::pow(1.0 - fermion_alpha, -3.0) * std::pow(total, -3.0 * window.epsilon()) +
                         boson_alpha / total;
    return {log_value, scale};
}

double gaussian_high_density(const CountVector& n, const BinPartition& bins, ParticleKind kind) {
    check_dimensions(n, bins);
    if (kind != ParticleKind::boson) {
        throw std::invalid_argument("the high-density Gaussian form applies to bosons only");
    }
    if (n.total() < 1) throw std::invalid_argument("gaussian_high_density needs N >= 1");
    const double total = static_cast<double>(n.total());
    const double ports = static_cast<double>(bins.ports());
    const double r = static_cast<double>(n.bins());
    return 0.5 * (r - 1.0) * (std::log(ports) - std::log(kTwoPi * total * total)) -
           ports * chi_square_half(n, bins) - 0.5 * sum_log_fractions(bins);
}

double high_density_xi_density(std::span<const double> xi, std::span<const double> q) {
    if (xi.size() != q.size() || xi.empty()) throw std::invalid_argument("xi and q must have equal length");
    double exponent = 0.0;
    double log_norm = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (!(q[i] > 0.0)) throw std::domain_error("density needs every q_i > 0");
        exponent += xi[i] * xi[i] / (2.0 * q[i]);
        log_norm += 0.5 * std::log(q[i]);
    }
    const double r = static_cast<double>(xi.size());
    return std::exp(-exponent - 0.5 * (r - 1.0) * std::log(kTwoPi) - log_norm);
}

double tail_bound(const CountVector& n, const BinPartition& bins, ParticleKind kind, double alpha,
                  const Window& window) {
    check_dimensions(n, bins);
    check_density(kind, alpha);
    const auto violated = first_window_violation(n, bins, window);
    if (!violated) {
        throw std::invalid_argument(
            fmt::format("counts ({}) lie inside the Gaussian window; use gaussian_law", n.to_string()));
    }
    const double total = static_cast<double>(n.total());
    const double exponent = window.tail_exponent(n.total());
    switch (kind) {
    case ParticleKind::distinguishable:
        return std::log(kTwoPi * std::sqrt(total)) - exponent;
    case ParticleKind::boson:
        return std::log(kTwoPi * std::sqrt(total) * (1.0 + alpha)) - exponent / (1.0 + alpha);
    case ParticleKind::fermion: {
        if (!(alpha > 0.0)) throw std::invalid_argument("fermion tail bound needs alpha > 0");
        // Classical prefactor 2 pi sqrt(N) times the quantum-factor bound
        // q(1-q) / ((1-alpha)^2 X(1-X)) with X, 1-X >= alpha/((1-alpha) N).
        const double q = bins.fraction_value(*violated);
        return std::log(kTwoPi * q * (1.0 - q)) + 2.5 * std::log(total) - 2.0 * std::log(alpha) -
               exponent / (1.0 - alpha);
    }
    }
    return kInf;
}

StirlingTerm stirling_lnfact(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("stirling_lnfact needs n >= 0");
    if (n == 0) return {0.0, 1.0 / kTwoPi};
    // n + theta = n exp(2 R_n) with R_n the Stirling remainder.
    const double theta = static_cast<double>(n) * std::expm1(2.0 * stirling_remainder(n));
    return {log_factorial(n), theta};
}

XVars x_vars(const CountVector& n, const BinPartition& bins, ParticleKind kind, double alpha) {
    check_dimensions(n, bins);
    if (kind == ParticleKind::distinguishable) {
        throw std::invalid_argument("x_vars is defined for bosons and fermions");
    }
    check_density(kind, alpha);
    const double sa = signed_density(kind, alpha);
    XVars out;
    out.X.reserve(n.bins());
    for (std::size_t i = 0; i < n.bins(); ++i) {
        out.X.push_back((bins.fraction_value(i) + sa * n.fraction(i)) / (1.0 + sa));
    }
    return out;
}

ProductAsymptotic product_asymptotic(std::int64_t n, std::int64_t m, int sign) {
    if (m < 1) throw std::invalid_argument("product_asymptotic needs m >= 1");
    if (n < 0) throw std::invalid_argument("product_asymptotic needs n >= 0");
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    if (sign < 0 && n >= m) {
        throw std::domain_error(fmt::format("prod (1 - l/m) reaches zero or below for n = {} >= m = {}", n, m));
    }
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    double exact = 0.0;
    for (std::int64_t l = 1; l <= n; ++l) exact += std::log1p(sign * static_cast<double>(l) / md);

    const double log_ratio = std::log1p(sign * nd / md);
    const double base_exponent = nd + sign * md;
    ProductAsymptotic out{};
    out.log_product_exact = exact;
    out.log_asymptotic = (base_exponent + 0.5) * log_ratio - nd;
    const double with_one = (base_exponent + 1.0) * log_ratio - nd;
    const double without = base_exponent * log_ratio - nd;
    out.log_lower = sign > 0 ? without : with_one;
    out.log_upper = sign > 0 ? with_one : without;
    return out;
}

QuantumFactorAsymptotic quantum_factor_asymptotic(const CountVector& n, const BinPartition& bins,
                                                  ParticleKind kind, double alpha) {
    check_dimensions(n, bins);
    if (kind == ParticleKind::distinguishable) {
        throw std::invalid_argument("the quantum factor is identically 1 for distinguishable particles");
    }
    check_density(kind, alpha);
    if (!(alpha > 0.0)) throw std::invalid_argument("density alpha must be positive");
    if (n.total() < 1) throw std::invalid_argument("quantum_factor_asymptotic needs N >= 1");

    const double total = static_cast<double>(n.total());
    const double sa = signed_density(kind, alpha);
    const double r = static_cast<double>(n.bins());

    QuantumFactorAsymptotic out{};
    out.log_leading = total * (sa / (1.0 + sa)) * chi_square_half(n, bins) - 0.5 * (r - 1.0) * std::log1p(sa);

    const XVars xv = x_vars(n, bins, kind, alpha);
    std::vector<double> q(bins.bins());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = bins.fraction_value(i);
    std::vector<double> d(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d[i] = xv.X[i] - q[i];
    const double kl = kl_from_offsets(xv.X, q, d);
    double log_ratio_sum = 0.0;
    bool any_zero = false;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (xv.X[i] > 0.0) {
            log_ratio_sum += std::log(xv.X[i] / q[i]);
        } else {
            any_zero = true;
        }
    }
    const double log_q_as = (total + statistics_sign(kind) * total / alpha) * kl;

    if (kind == ParticleKind::boson) {
        out.log_bound_upper = log_q_as + std::log1p(alpha);
        out.log_bound_lower = log_q_as - r * std::log1p(alpha) - log_ratio_sum;
    } else {
        out.log_bound_upper = any_zero ? kInf : log_q_as - r * std::log1p(-alpha) - log_ratio_sum;
        out.log_bound_lower = log_q_as + std::log1p(-alpha);
    }
    return out;
}

void gaussian_log_binary_range(std::int64_t total, const BinPartition& bins, ParticleKind kind, double alpha,
                               std::int64_t first, std::span<double> out) {
    if (bins.bins() != 2) throw std::invalid_argument("gaussian_log_binary_range needs two bins");
    if (total < 1) throw std::invalid_argument("gaussian_log_binary_range needs N >= 1");
    check_density(kind, alpha);
    const double n = static_cast<double>(total);
    const double q = bins.fraction_value(0);
    const double spread = 1.0 + signed_density(kind, alpha);
    // Two bins: sum (x_i - q_i)^2 / q_i = (x - q)^2 / (q (1 - q)).
    const double variance = spread * n * q * (1.0 - q);
    const double base = -0.5 * std::log(kTwoPi * spread * n) - 0.5 * (std::log(q) + std::log1p(-q));
    kernels::active().quadratic_batch(base, -0.5 / variance, n * q, first, out);
}

}  // namespace qcount
