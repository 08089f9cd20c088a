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

// The invariant suite behind `qcount verify`. Each property is a scaled
// down version of a test in the test tree, small enough to finish in
// seconds on one core.

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "qcount/asymptotics.hpp"
#include "qcount/binned_stats.hpp"
#include "qcount/cli.hpp"
#include "qcount/group_integrals.hpp"
#include "qcount/haar_mc.hpp"
#include "qcount/kernels.hpp"
#include "qcount/permutations.hpp"

namespace qcount::cli {

namespace {

constexpr std::array kAllKinds = {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion};

struct Outcome {
    bool passed;
    std::string detail;
};

// Random composition of `ports` into `r` positive parts.
std::vector<std::int64_t> random_composition(std::int64_t ports, std::size_t r, Rng& rng) {
    std::vector<std::int64_t> cuts;
    std::vector<std::int64_t> pool(static_cast<std::size_t>(ports - 1));
    std::iota(pool.begin(), pool.end(), 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    cuts.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(r - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::int64_t> parts;
    std::int64_t prev = 0;
    for (auto c : cuts) {
        parts.push_back(c - prev);
        prev = c;
    }
    parts.push_back(ports - prev);
    return parts;
}

// Random count vector with sum N over r bins (uniform stars and bars).
std::vector<std::int64_t> random_counts(std::int64_t total, std::size_t r, Rng& rng) {
    auto parts = random_composition(total + static_cast<std::int64_t>(r), r, rng);
    for (auto& p : parts) --p;
    return parts;
}

void each_composition(std::int64_t ports, std::size_t r, const std::function<void(std::vector<std::int64_t>)>& f) {
    std::vector<std::int64_t> parts(r);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t left) {
        if (i + 1 == r) {
            if (left >= 1) {
                parts[i] = left;
                f(parts);
            }
            return;
        }
        for (std::int64_t k = 1; k <= left - static_cast<std::int64_t>(r - 1 - i); ++k) {
            parts[i] = k;
            rec(i + 1, left - k);
        }
    };
    rec(0, ports);
}

Outcome normalization() {
    std::int64_t tables = 0;
    for (auto kind : kAllKinds) {
        for (std::int64_t m = 1; m <= 8; ++m) {
            for (std::int64_t n = 1; n <= 6; ++n) {
                if (kind == ParticleKind::fermion && n > m) continue;
                for (std::size_t r = 1; r <= 3 && static_cast<std::int64_t>(r) <= m; ++r) {
                    bool ok = true;
                    each_composition(m, r, [&](std::vector<std::int64_t> k) {
                        const BinPartition bins(std::move(k));
                        Rational sum = 0;
                        for_each_count_vector(n, r, [&](const CountVector& c) {
                            sum += quantum_prob(c, bins, kind, NumericMode::exact).rational();
                        });
                        ok = ok && sum == 1;
                        ++tables;
                    });
                    if (!ok) {
                        return Outcome{false, fmt::format("sum != 1 for {} N={} M={} r={}", to_string(kind), n, m, r)};
                    }
                }
            }
        }
    }
    return {true, fmt::format("{} tables sum to exactly 1", tables)};
}

Outcome fermion_support() {
    const BinPartition bins({1, 2, 3});
    std::int64_t zeros = 0;
    bool ok = true;
    for_each_count_vector(4, 3, [&](const CountVector& n) {
        const bool overflow = n[0] > 1 || n[1] > 2 || n[2] > 3;
        const Rational p = quantum_prob(n, bins, ParticleKind::fermion, NumericMode::exact).rational();
        if (overflow) {
            ok = ok && p == 0;
            ++zeros;
        } else {
            ok = ok && p > 0;
        }
    });
    return {ok, fmt::format("{} overflowing count vectors give exactly 0", zeros)};
}

Outcome factorization(std::uint64_t seed) {
    Rng rng(stream_seed(seed, 1));
    int checked = 0;
    for (auto kind : kAllKinds) {
        for (int trial = 0; trial < 60; ++trial) {
            const std::size_t r = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
            const std::int64_t ports = std::uniform_int_distribution<std::int64_t>(static_cast<std::int64_t>(r), 24)(rng);
            std::int64_t total = std::uniform_int_distribution<std::int64_t>(1, 12)(rng);
            if (kind == ParticleKind::fermion) total = std::min(total, ports);
            const BinPartition bins(random_composition(ports, r, rng));
            const CountVector n(random_counts(total, r, rng));
            const Rational direct = quantum_prob(n, bins, kind, NumericMode::exact).rational();
            const Rational layered = factorize(n, bins, kind).product(NumericMode::exact).rational();
            if (direct != layered) {
                return {false, fmt::format("{} n=({}) K=({}): {} vs {}", to_string(kind), n.to_string(),
                                           fmt::join(bins.sizes(), ","), direct.get_str(), layered.get_str())};
            }
            ++checked;
        }
    }
    return {true, fmt::format("{} instances agree exactly", checked)};
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b) + 1e-14; }

Outcome kl_layer_identities(std::uint64_t seed) {
    Rng rng(stream_seed(seed, 2));
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t r = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        const auto kind = trial % 2 == 0 ? ParticleKind::boson : ParticleKind::fermion;
        std::vector<std::int64_t> k(r);
        std::vector<std::int64_t> c(r);
        for (std::size_t i = 0; i < r; ++i) {
            k[i] = std::uniform_int_distribution<std::int64_t>(2, 40)(rng);
            c[i] = std::uniform_int_distribution<std::int64_t>(1, kind == ParticleKind::fermion ? k[i] - 1 : 60)(rng);
        }
        const BinPartition bins(k);
        const CountVector n(c);
        const auto layers = factorize(n, bins, kind).layers;
        std::vector<double> x(r);
        std::vector<double> q(r);
        for (std::size_t i = 0; i < r; ++i) {
            x[i] = n.fraction(i);
            q[i] = bins.fraction_value(i);
        }
        const double total = static_cast<double>(n.total());
        const double ports = static_cast<double>(bins.ports());

        double layered = 0.0;
        for (const auto& l : layers) layered += static_cast<double>(l.total) * kl2(l.xbar.get_d(), l.qbar.get_d());
        const double full = total * klr(x, q);
        worst = std::max(worst, std::abs(layered - full) / std::max(full, 1e-300));
        if (!close(layered, full, 1e-10)) return {false, fmt::format("classical layer identity off at r={}", r)};

        const double s = statistics_sign(kind);
        const double alpha = total / ports;
        const auto big_x = x_vars(n, bins, kind, alpha).X;
        double q_layered = 0.0;
        for (const auto& l : layers) {
            const double nl = static_cast<double>(l.total);
            const double ml = static_cast<double>(l.ports);
            const double xbar = (l.qbar.get_d() * ml + s * l.xbar.get_d() * nl) / (ml + s * nl);
            q_layered += (nl + s * ml) * kl2(xbar, l.qbar.get_d());
        }
        const double q_full = (total + s * ports) * klr(big_x, q);
        if (!close(q_layered, q_full, 1e-10)) {
            return {false, fmt::format("{} layer identity off at r={}", to_string(kind), r)};
        }
    }
    return {true, fmt::format("300 instances, worst relative gap {:.2e}", worst)};
}

Outcome pinsker() {
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
        for (int j = 0; j < 200; ++j) {
            const double x = (i + 0.5) / 200.0;
            const double q = (j + 0.5) / 200.0;
            margin = std::min(margin, kl2(x, q) - (x - q) * (x - q));
        }
    }
    return {margin >= 0.0, fmt::format("min kl2 - (x-q)^2 = {:.3e} on a 200x200 grid", margin)};
}

Outcome quadratic_expansion() {
    double c_fit = 0.0;
    for (int j = 1; j < 20; ++j) {
        const double q = j / 20.0;
        for (int i = -100; i <= 100; ++i) {
            const double d = i * 0.001;
            const double x = q + d;
            if (d == 0.0 || x <= 0.0 || x >= 1.0) continue;
            const double gap = std::abs(kl2(x, q) - d * d / (2.0 * q * (1.0 - q)));
            c_fit = std::max(c_fit, gap / std::abs(d * d * d));
        }
    }
    return {std::isfinite(c_fit) && c_fit < 1e3, fmt::format("fitted cubic constant C = {:.3f}", c_fit)};
}

Outcome stirling_theta() {
    if (std::abs(stirling_lnfact(0).theta - 1.0 / (2.0 * std::numbers::pi)) > 1e-15) return {false, "theta_0"};
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::int64_t n = 1; n <= 1'000'000; ++n) {
        const double t = stirling_lnfact(n).theta;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    return {lo > 1.0 / 6.0 && hi < 1.77, fmt::format("theta_n in [{:.6f}, {:.6f}] for 1 <= n <= 1e6", lo, hi)};
}

double peak_gap(std::int64_t total) {
    const BinPartition bins({1, 1});
    const CountVector n({total / 2, total / 2});
    const double exact = quantum_prob(n, bins, ParticleKind::distinguishable, NumericMode::logspace).log();
    const double gauss = gaussian_law(n, bins, ParticleKind::distinguishable, 0.5).log_value;
    return std::abs(std::expm1(gauss - exact));
}

Outcome de_moivre_laplace() {
    const double g100 = peak_gap(100);
    const double g10k = peak_gap(10000);
    const bool ok = std::abs(g100 - 0.0025) < 0.0005 && g10k * 5.0 <= g100;
    return {ok, fmt::format("peak gap {:.5f} at N=100, {:.2e} at N=1e4", g100, g10k)};
}

double max_window_error(std::int64_t total, std::int64_t ports, ParticleKind kind) {
    const BinPartition bins({ports / 2, ports / 2});
    const double alpha = static_cast<double>(total) / static_cast<double>(ports);
    const Window window = Window::defaults();
    std::vector<double> exact(static_cast<std::size_t>(total + 1));
    binary_log_prob_range(total, bins[0], ports, kind, 0, exact);
    double worst = 0.0;
    for (std::int64_t k = 0; k <= total; ++k) {
        const CountVector n({k, total - k});
        if (!in_window(n, bins, window)) continue;
        const double g = gaussian_law(n, bins, kind, alpha, window).log_value;
        worst = std::max(worst, std::abs(std::expm1(g - exact[static_cast<std::size_t>(k)])));
    }
    return worst;
}

Outcome gaussian_convergence() {
    std::string detail;
    bool ok = true;
    for (auto kind : kAllKinds) {
        // alpha = 1 for distinguishable particles and bosons, 1/2 for fermions.
        std::vector<double> errs;
        for (std::int64_t total : {256, 1024, 4096}) {
            errs.push_back(max_window_error(total, kind == ParticleKind::fermion ? 2 * total : total, kind));
        }
        ok = ok && errs[0] > errs[1] && errs[1] > errs[2];
        detail += fmt::format("{}{}: {:.2e} {:.2e} {:.2e}", detail.empty() ? "" : "; ", to_string(kind), errs[0],
                              errs[1], errs[2]);
    }
    return {ok, detail};
}

Outcome window_equivalence(std::uint64_t seed) {
    Rng rng(stream_seed(seed, 3));
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t r = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        const std::int64_t ports = std::uniform_int_distribution<std::int64_t>(static_cast<std::int64_t>(r), 60)(rng);
        const BinPartition bins(random_composition(ports, r, rng));
        const std::int64_t total = std::uniform_int_distribution<std::int64_t>(50, 5000)(rng);
        const double amplitude = std::uniform_real_distribution<double>(0.2, 3.0)(rng);
        const Window window(amplitude, 0.1);
        const double w = window.half_width(total);
        std::vector<std::int64_t> c(r);
        std::int64_t used = 0;
        for (std::size_t i = 0; i + 1 < r; ++i) {
            const double centre = static_cast<double>(total) * bins.fraction_value(i);
            c[i] = std::max<std::int64_t>(
                0, std::llround(centre + std::uniform_real_distribution<double>(-w, w)(rng) / static_cast<double>(r)));
            used += c[i];
        }
        if (used > total) continue;
        c[r - 1] = total - used;
        const CountVector n(c);
        if (!in_window(n, bins, window)) continue;
        ++checked;
        if (!in_layered_window(n, bins, Window(amplitude * static_cast<double>(r), 0.1))) {
            return {false, fmt::format("layered window fails for n=({})", n.to_string())};
        }
    }
    return {checked > 50, fmt::format("{} in-window instances satisfy the layered window with A*r", checked)};
}

Outcome gaussian_factorization() {
    // r = 3, q = (1/4, 1/4, 1/2); layer gaussians use each layer's density.
    const std::int64_t total = 4096;
    std::string detail;
    for (auto kind : kAllKinds) {
        const std::int64_t ports = kind == ParticleKind::fermion ? 2 * total : total;
        const BinPartition bins({ports / 4, ports / 4, ports / 2});
        const double alpha = static_cast<double>(total) / static_cast<double>(ports);
        const Window wide(3.0, 0.1);
        double worst_ratio = 0.0;
        for (std::int64_t d1 : {-20, 0, 15}) {
            for (std::int64_t d2 : {-10, 0, 25}) {
                const CountVector n({total / 4 + d1, total / 4 + d2, total / 2 - d1 - d2});
                const GaussianLaw full = gaussian_law(n, bins, kind, alpha);
                double layered = 0.0;
                for (const auto& l : factorize(n, bins, kind).layers) {
                    const CountVector nl({l.count, l.total - l.count});
                    const BinPartition bl({l.bin_ports, l.ports - l.bin_ports});
                    layered += gaussian_law(nl, bl, kind, static_cast<double>(l.total) / static_cast<double>(l.ports),
                                            wide).log_value;
                }
                worst_ratio = std::max(worst_ratio, std::abs(std::expm1(layered - full.log_value)) /
                                                        full.leading_error_scale);
            }
        }
        if (worst_ratio > 1.0) {
            return {false, fmt::format("{}: layered product off by {:.2f} error scales", to_string(kind), worst_ratio)};
        }
        detail += fmt::format("{}{}: {:.3f}", detail.empty() ? "" : "; ", to_string(kind), worst_ratio);
    }
    return {true, "gap / error scale: " + detail};
}

Outcome tail_bounds() {
    int scanned = 0;
    for (std::int64_t total : {200, 500}) {
        const std::int64_t ports = 2 * total;
        const BinPartition bins({total, total});
        for (auto kind : kAllKinds) {
            std::vector<double> exact(static_cast<std::size_t>(total + 1));
            binary_log_prob_range(total, bins[0], ports, kind, 0, exact);
            for (std::int64_t k = 0; k <= total; ++k) {
                const CountVector n({k, total - k});
                if (in_window(n, bins, Window::defaults())) continue;
                ++scanned;
                if (exact[static_cast<std::size_t>(k)] > tail_bound(n, bins, kind, 0.5)) {
                    return {false, fmt::format("{} N={} n=({}) exceeds its bound", to_string(kind), total,
                                               n.to_string())};
                }
            }
        }
    }
    return {true, fmt::format("{} out-of-window counts below their bounds", scanned)};
}

Outcome product_brackets() {
    double c_fit = 0.0;
    for (std::int64_t m : {100, 1000}) {
        for (int sign : {1, -1}) {
            for (std::int64_t n = 0; n <= 50; ++n) {
                const auto p = product_asymptotic(n, m, sign);
                const double below = p.log_lower - p.log_product_exact;
                const double above = p.log_product_exact - p.log_upper;
                c_fit = std::max({c_fit, below * static_cast<double>(m), above * static_cast<double>(m)});
                const double rel = std::abs(std::expm1(p.log_asymptotic - p.log_product_exact));
                const double allowed = n == 0 ? 1e-15
                                              : 10.0 * static_cast<double>(n) /
                                                    (static_cast<double>(m) * static_cast<double>(m + sign * n));
                if (rel > allowed) return {false, fmt::format("asymptotic error {:.3e} at n={} m={}", rel, n, m)};
            }
        }
    }
    return {c_fit < 10.0, fmt::format("bracket violation constant C = {:.3f} (bound 10)", std::max(c_fit, 0.0))};
}

Outcome quantum_factor_bounds() {
    const std::int64_t total = 200;
    const BinPartition bins({200, 200});
    double margin = std::numeric_limits<double>::infinity();
    int scanned = 0;
    for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
        for (std::int64_t k = 0; k <= total; ++k) {
            const CountVector n({k, total - k});
            if (!in_window(n, bins, Window::defaults())) continue;
            ++scanned;
            const double exact = quantum_factor(n, bins, kind, NumericMode::logspace).log();
            const auto b = quantum_factor_asymptotic(n, bins, kind, 0.5);
            margin = std::min({margin, exact - b.log_bound_lower, b.log_bound_upper - exact});
        }
    }
    return {margin >= 0.0, fmt::format("{} counts bracketed, smallest log margin {:.3f}", scanned, margin)};
}

Outcome weingarten_pair_average() {
    int checked = 0;
    for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
        for (int total = 1; total <= 3; ++total) {
            for (int ports = total; ports <= 5; ++ports) {
                std::vector<OccupationVector> states;
                for_each_occupation(total, ports, kind == ParticleKind::fermion ? 1 : total,
                                    [&](const OccupationVector& o) { states.push_back(o); });
                const auto& s = states.back();
                for (const auto& n : states) {
                    for (const auto& m : states) {
                        const auto avg = permanent_pair_average(n, m, s, ports, kind);
                        if (!avg.agree()) {
                            return {false, fmt::format("{} n=({}) m=({}) s=({}): {} vs {}", to_string(kind),
                                                       n.to_string(), m.to_string(), s.to_string(),
                                                       avg.closed_form.get_str(), avg.weingarten_sum.get_str())};
                        }
                        ++checked;
                    }
                }
            }
        }
    }
    return {true, fmt::format("{} closed forms equal their Weingarten sums", checked)};
}

Outcome weingarten_sums() {
    int checked = 0;
    for (int total = 1; total <= 4; ++total) {
        for (int ports = total; ports <= 8; ++ports) {
            for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
                const Rational expected =
                    avg_configuration_prob(total, ports, kind, NumericMode::exact).rational();
                if (weingarten_sum_identity(total, ports, kind) != expected) {
                    return {false, fmt::format("{} N={} M={}", to_string(kind), total, ports)};
                }
                ++checked;
            }
            const auto table = cached_weingarten_table(total, ports);
            for (std::size_t a = 0; a < table->permutations().size(); ++a) {
                for (std::size_t b = 0; b < a; ++b) {
                    if (cycle_type(table->permutations()[a]) == cycle_type(table->permutations()[b]) &&
                        table->values()[a] != table->values()[b]) {
                        return {false, fmt::format("Weingarten values differ within a cycle type at N={}", total)};
                    }
                }
            }
        }
    }
    return {true, fmt::format("{} sum identities exact; values constant on cycle types", checked)};
}

Outcome output_normalization(std::uint64_t seed) {
    Rng rng(stream_seed(seed, 4));
    double worst_unitary = 0.0;
    double worst_sum = 0.0;
    for (int ports = 1; ports <= 6; ++ports) {
        const UnitaryMatrix u = sample_haar_unitary(ports, rng);
        worst_unitary = std::max(worst_unitary, u.unitarity_deviation());
        for (int total = 1; total <= 4; ++total) {
            for (auto kind : kAllKinds) {
                if (kind == ParticleKind::fermion && total > ports) continue;
                std::vector<int> list(static_cast<std::size_t>(total));
                for (int i = 0; i < total; ++i) list[static_cast<std::size_t>(i)] = i % ports;
                const auto in = OccupationVector::from_ports(list, ports);
                if (kind == ParticleKind::fermion && !in.at_most_one_per_port()) continue;
                double sum = 0.0;
                for_each_occupation(total, ports, kind == ParticleKind::fermion ? 1 : total,
                                    [&](const OccupationVector& out) { sum += transition_prob(u, in, out, kind); });
                worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
            }
        }
    }
    return {worst_unitary <= 1e-12 && worst_sum <= 1e-8,
            fmt::format("max |U^dagger U - I| = {:.2e}, max |sum - 1| = {:.2e}", worst_unitary, worst_sum)};
}

Outcome mc_agreement(std::uint64_t seed, unsigned threads) {
    McParams boson;
    boson.kind = ParticleKind::boson;
    boson.bins = BinPartition({1, 1});
    boson.total = 2;
    boson.threads = threads;
    McParams fermion = boson;
    fermion.kind = ParticleKind::fermion;
    fermion.bins = BinPartition({2, 2});
    bool ok = true;
    MCEstimate e11;
    for (const auto* params : {&boson, &fermion}) {
        const auto est = mc_average(McMode::haar_average, *params, 10000, seed);
        for (const auto& [n, e] : est) {
            const double exact = quantum_prob(n, params->bins, params->kind, NumericMode::exact).value();
            ok = ok && e.consistent_with(exact);
        }
        if (params == &fermion) e11 = est.at(CountVector({1, 1}));
    }
    const std::string detail = fmt::format("fermion P(1,1) = {:.4f} +- {:.4f} (exact 2/3)", e11.mean, e11.std_error);
    return {ok, detail};
}

Outcome mixed_state(std::uint64_t seed, unsigned threads) {
    const int ports = 3;
    const OccupationVector a({1, 1, 0});
    const OccupationVector b({2, 0, 0});
    const std::vector<DensityCoefficient> rho = {
        {a, a, 0.5}, {b, b, 0.5}, {a, b, {0.3, 0.1}}, {b, a, {0.3, -0.1}}};
    const std::vector<OccupationVector> probes = {a};
    const auto report =
        mixed_state_check(rho, ports, BinPartition({1, 2}), ParticleKind::boson, 20000, seed, probes, threads);
    return {report.all_consistent(), fmt::format("{} moments and {} bins within 3 standard errors",
                                                 report.moments.size(), report.bins.size())};
}

Outcome seed_determinism(std::uint64_t seed) {
    McParams p;
    p.kind = ParticleKind::boson;
    p.bins = BinPartition({2, 3});
    p.total = 3;
    p.threads = 1;
    const auto a = mc_average(McMode::scattershot, p, 1000, seed);
    p.threads = 3;
    const auto b = mc_average(McMode::scattershot, p, 1000, seed);
    bool same = a.size() == b.size();
    for (const auto& [n, e] : a) {
        const auto& f = b.at(n);
        same = same && e.mean == f.mean && e.std_error == f.std_error;
    }
    return {same, "1 and 3 worker threads give bit-identical estimates"};
}

Outcome kernel_equivalence(std::uint64_t seed) {
    const auto* fast = kernels::avx2_kernels();
    if (fast == nullptr) return {true, "AVX2 variant unavailable; scalar kernels only"};
    const auto& ref = kernels::scalar_kernels();
    Rng rng(stream_seed(seed, 5));
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    std::vector<double> table(4096);
    for (auto& v : table) v = u(rng);
    const std::vector<kernels::GatherTerm> terms = {{1.0, 0, 1}, {-1.0, 7, 2}, {0.5, 100, 0}, {-2.0, 3000, -1}};
    std::vector<double> a(37);
    std::vector<double> b(37);
    ref.gather_linear_sum(table, terms, 0.25, -0.125, 5, a);
    fast->gather_linear_sum(table, terms, 0.25, -0.125, 5, b);
    bool bitwise = a == b;
    ref.quadratic_batch(-1.5, -0.01, 17.3, -3, a);
    fast->quadratic_batch(-1.5, -0.01, 17.3, -3, b);
    bitwise = bitwise && a == b;

    std::vector<double> re(13);
    std::vector<double> im(13);
    for (std::size_t i = 0; i < re.size(); ++i) {
        re[i] = u(rng);
        im[i] = u(rng);
    }
    auto r1 = re;
    auto i1 = im;
    auto r2 = re;
    auto i2 = im;
    ref.ryser_update(r1, i1, re, im, -1.0);
    fast->ryser_update(r2, i2, re, im, -1.0);
    bitwise = bitwise && r1 == r2 && i1 == i2;

    const auto p1 = ref.complex_product(re, im);
    const auto p2 = fast->complex_product(re, im);
    const bool product_close = std::abs(p1 - p2) <= 1e-12 * std::abs(p1);
    const UnitaryMatrix m = sample_haar_unitary(7, rng);
    const std::span<const std::complex<double>> entries(m.entries().data(), 49);
    const bool dev_close = std::abs(ref.unitarity_deviation(entries, 7) - fast->unitarity_deviation(entries, 7)) <= 1e-14;
    return {bitwise && product_close && dev_close, "scalar and AVX2 kernels agree"};
}

Outcome high_density() {
    const BinPartition bins({8, 8});
    auto gap = [&](std::int64_t total) {
        const CountVector n({total / 2, total / 2});
        const double exact = quantum_prob(n, bins, ParticleKind::boson, NumericMode::logspace).log();
        return std::abs(gaussian_high_density(n, bins, ParticleKind::boson) - exact) / std::abs(exact);
    };
    const double g3 = gap(1000);
    const double g4 = gap(10000);
    return {g4 < 0.10 && g4 < g3, fmt::format("log gap {:.4f} at N=1e3, {:.4f} at N=1e4", g3, g4)};
}

}  // namespace

std::vector<PropertyResult> run_verify_suite(unsigned threads, std::uint64_t seed) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> properties = {
        {"normalization_exact", normalization},
        {"fermion_support", fermion_support},
        {"layer_factorization", [&] { return factorization(seed); }},
        {"kl_layer_identities", [&] { return kl_layer_identities(seed); }},
        {"pinsker", pinsker},
        {"kl_quadratic_expansion", quadratic_expansion},
        {"stirling_theta", stirling_theta},
        {"de_moivre_laplace", de_moivre_laplace},
        {"gaussian_convergence", gaussian_convergence},
        {"window_equivalence", [&] { return window_equivalence(seed); }},
        {"gaussian_factorization", gaussian_factorization},
        {"tail_bounds", tail_bounds},
        {"product_brackets", product_brackets},
        {"quantum_factor_bounds", quantum_factor_bounds},
        {"weingarten_pair_average", weingarten_pair_average},
        {"weingarten_sum_identities", weingarten_sums},
        {"output_normalization", [&] { return output_normalization(seed); }},
        {"mc_agreement", [&] { return mc_agreement(seed, threads); }},
        {"mixed_state", [&] { return mixed_state(seed, threads); }},
        {"seed_determinism", [&] { return seed_determinism(seed); }},
        {"kernel_equivalence", [&] { return kernel_equivalence(seed); }},
        {"high_density", high_density},
    };
    std::vector<PropertyResult> out;
    for (const auto& [name, check] : properties) {
        try {
            auto o = check();
            out.push_back({name, o.passed, std::move(o.detail)});
        } catch (const std::exception& e) {
            out.push_back({name, false, fmt::format("threw: {}", e.what())});
        }
    }
    return out;
}

}  // namespace qcount::cli
