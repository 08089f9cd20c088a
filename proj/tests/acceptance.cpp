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

// Full-scale acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Tolerances and sizes are the
// acceptance numbers; nothing here is scaled down.

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qcount/asymptotics.hpp"
#include "qcount/binned_stats.hpp"
#include "qcount/group_integrals.hpp"
#include "qcount/haar_mc.hpp"

using namespace qcount;

namespace {

constexpr std::array kKinds = {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion};

struct Verdict {
    bool passed;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Non-increasing partitions of `ports` into exactly r positive parts.
void each_sorted_partition(std::int64_t ports, std::size_t r, const std::function<void(const std::vector<std::int64_t>&)>& f) {
    std::vector<std::int64_t> parts(r);
    std::function<void(std::size_t, std::int64_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t left,
                                                                           std::int64_t cap) {
        const auto rest = static_cast<std::int64_t>(r - 1 - i);
        if (rest == 0) {
            if (left >= 1 && left <= cap) {
                parts[i] = left;
                f(parts);
            }
            return;
        }
        for (std::int64_t k = std::min(cap, left - rest); k >= 1; --k) {
            if (k * (rest + 1) < left) break;
            parts[i] = k;
            rec(i + 1, left - k, k);
        }
    };
    rec(0, ports, ports);
}

std::vector<std::int64_t> random_composition(std::int64_t total, std::size_t r, Rng& rng) {
    std::vector<std::int64_t> pool(static_cast<std::size_t>(total - 1));
    std::iota(pool.begin(), pool.end(), 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::int64_t> cuts(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(r - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::int64_t> parts;
    std::int64_t prev = 0;
    for (auto c : cuts) {
        parts.push_back(c - prev);
        prev = c;
    }
    parts.push_back(total - prev);
    return parts;
}

// 1. Exact normalization over every (sigma, N <= 12, M <= 24, r <= 4).
// The probability is invariant under relabelling bins, so each multiset of
// bin sizes is visited once. Fermion support is checked on the same sweep.
Verdict normalization_and_support() {
    const auto t0 = Clock::now();
    std::int64_t tables = 0;
    std::int64_t zeros = 0;
    for (auto kind : kKinds) {
        for (std::int64_t ports = 1; ports <= 24; ++ports) {
            for (std::size_t r = 1; r <= 4 && static_cast<std::int64_t>(r) <= ports; ++r) {
                std::string failure;
                each_sorted_partition(ports, r, [&](const std::vector<std::int64_t>& k) {
                    if (!failure.empty()) return;
                    const BinPartition bins(k);
                    for (std::int64_t total = 1; total <= 12; ++total) {
                        if (kind == ParticleKind::fermion && total > ports) break;
                        Rational sum = 0;
                        for_each_count_vector(total, r, [&](const CountVector& n) {
                            const Rational p = quantum_prob(n, bins, kind, NumericMode::exact).rational();
                            if (kind == ParticleKind::fermion) {
                                bool overflow = false;
                                for (std::size_t i = 0; i < r; ++i) overflow = overflow || n[i] > k[i];
                                if (overflow) {
                                    ++zeros;
                                    if (p != 0) failure = fmt::format("non-zero overflow n=({})", n.to_string());
                                } else if (p <= 0) {
                                    failure = fmt::format("zero inside support n=({})", n.to_string());
                                }
                            }
                            sum += p;
                        });
                        ++tables;
                        if (sum != 1) {
                            failure = fmt::format("{} N={} K=({}) sums to {}", to_string(kind), total,
                                                  fmt::join(k, ","), sum.get_str());
                        }
                    }
                });
                if (!failure.empty()) return {false, failure};
            }
        }
    }
    const double t = seconds_since(t0);
    return {t < 60.0, fmt::format("{} tables sum to exactly 1, {} fermion overflows are exactly 0, {:.1f}s", tables,
                                  zeros, t)};
}

// 2. r-bin probability equals the product of r-1 binary layers.
Verdict factorization() {
    const auto t0 = Clock::now();
    Rng rng(20261018);
    int checked = 0;
    for (auto kind : kKinds) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t r = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
            const std::int64_t ports =
                std::uniform_int_distribution<std::int64_t>(static_cast<std::int64_t>(r), 24)(rng);
            const BinPartition bins(random_composition(ports, r, rng));
            const std::int64_t cap = kind == ParticleKind::fermion ? std::min<std::int64_t>(12, ports) : 12;
            const std::int64_t total = std::uniform_int_distribution<std::int64_t>(1, cap)(rng);
            auto c = random_composition(total + static_cast<std::int64_t>(r), r, rng);
            for (auto& x : c) --x;
            const CountVector n(c);
            const Rational direct = quantum_prob(n, bins, kind, NumericMode::exact).rational();
            const Rational layered = factorize(n, bins, kind).product(NumericMode::exact).rational();
            if (direct != layered) {
                return {false, fmt::format("{} n=({}) K=({}): {} vs {}", to_string(kind), n.to_string(),
                                           fmt::join(bins.sizes(), ","), direct.get_str(), layered.get_str())};
            }
            ++checked;
        }
    }
    const double t = seconds_since(t0);
    return {t < 60.0, fmt::format("{} random instances equal their layer products exactly, {:.2f}s", checked, t)};
}

// 3. Layer KL identities (classical and shifted) plus Pinsker.
Verdict kl_identities() {
    const auto t0 = Clock::now();
    Rng rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t r = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
        std::vector<std::int64_t> k(r);
        std::vector<std::int64_t> c(r);
        for (std::size_t i = 0; i < r; ++i) {
            k[i] = std::uniform_int_distribution<std::int64_t>(2, 500)(rng);
            c[i] = std::uniform_int_distribution<std::int64_t>(1, k[i] - 1)(rng);
        }
        const BinPartition bins(k);
        const CountVector n(c);
        std::vector<Rational> x(r);
        std::vector<Rational> q(r);
        for (std::size_t i = 0; i < r; ++i) {
            x[i] = make_fraction(n[i], n.total());
            q[i] = bins.fraction(i);
        }
        const auto layers = factorize(n, bins, ParticleKind::distinguishable).layers;

        double lhs = 0.0;
        for (const auto& l : layers) lhs += static_cast<double>(l.total) * kl2(l.xbar, l.qbar);
        const double rhs = static_cast<double>(n.total()) * klr(x, q);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);

        // shifted fractions X_i = (K_i +- n_i) / (M +- N), layer by layer as well
        for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
            const std::int64_t s = statistics_sign(kind);
            std::vector<Rational> big_x(r);
            for (std::size_t i = 0; i < r; ++i) big_x[i] = make_fraction(k[i] + s * c[i], bins.ports() + s * n.total());
            double qlhs = 0.0;
            for (const auto& l : layers) {
                const Rational xbar = make_fraction(l.bin_ports + s * l.count, l.ports + s * l.total);
                qlhs += static_cast<double>(l.total + s * l.ports) * kl2(xbar, l.qbar);
            }
            const double qrhs = static_cast<double>(n.total() + s * bins.ports()) * klr(big_x, q);
            worst = std::max(worst, std::abs(qlhs - qrhs) / std::abs(qrhs));
        }
    }
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
        for (int j = 0; j < 200; ++j) {
            const double x = i / 199.0;
            const double q = (j + 0.5) / 200.0;
            margin = std::min(margin, kl2(x, q) - (x - q) * (x - q));
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-10 && margin >= 0.0 && t < 10.0,
            fmt::format("worst relative gap {:.2e} over 1000 instances, Pinsker margin {:.2e}, {:.2f}s", worst, margin,
                        t)};
}

double peak_gap(std::int64_t total) {
    const BinPartition bins({1, 1});
    const CountVector n({total / 2, total / 2});
    const double exact = quantum_prob(n, bins, ParticleKind::distinguishable, NumericMode::logspace).log();
    const double gauss = gaussian_law(n, bins, ParticleKind::distinguishable, 0.5).log_value;
    return std::abs(std::expm1(gauss - exact));
}

// 4. Classical peak against the binomial.
Verdict de_moivre_laplace() {
    const BinPartition bins({1, 1});
    const double exact100 = quantum_prob(CountVector({50, 50}), bins, ParticleKind::distinguishable).value();
    const double gauss100 = std::exp(gaussian_law(CountVector({50, 50}), bins, ParticleKind::distinguishable, 0.5).log_value);
    const double g100 = peak_gap(100);
    const double g10k = peak_gap(10000);
    const bool ok = std::abs(exact100 - 0.079589) < 5e-7 && std::abs(gauss100 - 0.079788) < 5e-7 &&
                    std::abs(g100 - 0.0025) < 0.0001 && g10k * 5.0 <= g100;
    return {ok, fmt::format("N=100: exact {:.6f} vs {:.6f}, gap {:.4f}; N=1e4 gap {:.2e} ({:.0f}x smaller)", exact100,
                            gauss100, g100, g10k, g100 / g10k)};
}

double max_window_error(std::int64_t total, std::int64_t ports, ParticleKind kind) {
    const BinPartition bins({ports / 2, ports / 2});
    const double alpha = static_cast<double>(total) / static_cast<double>(ports);
    double worst = 0.0;
    for (std::int64_t k = 0; k <= total; ++k) {
        const CountVector n({k, total - k});
        if (!in_window(n, bins, Window::defaults())) continue;
        const double exact = quantum_prob(n, bins, kind, NumericMode::logspace).log();
        const double g = gaussian_law(n, bins, kind, alpha).log_value;
        worst = std::max(worst, std::abs(std::expm1(g - exact)));
    }
    return worst;
}

// 5. Max in-window relative error falls along N = 256, 1024, 4096.
Verdict gaussian_convergence() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
        std::vector<double> errs;
        for (std::int64_t total : {256, 1024, 4096}) {
            errs.push_back(max_window_error(total, kind == ParticleKind::boson ? total : 2 * total, kind));
        }
        ok = ok && errs[0] > errs[1] && errs[1] > errs[2];
        detail += fmt::format("{}: {:.3e} > {:.3e} > {:.3e}; ", to_string(kind), errs[0], errs[1], errs[2]);
    }
    const double t = seconds_since(t0);
    return {ok && t < 300.0, detail + fmt::format("{:.2f}s", t)};
}

// 6. Every out-of-window count at N=500, M=1000 sits below its bound.
Verdict tail_bounds() {
    const auto t0 = Clock::now();
    const std::int64_t total = 500;
    const BinPartition bins({500, 500});
    int scanned = 0;
    double closest = -std::numeric_limits<double>::infinity();
    for (auto kind : kKinds) {
        for (std::int64_t k = 0; k <= total; ++k) {
            const CountVector n({k, total - k});
            if (in_window(n, bins, Window::defaults())) continue;
            ++scanned;
            const double exact = quantum_prob(n, bins, kind, NumericMode::logspace).log();
            const double bound = tail_bound(n, bins, kind, 0.5);
            closest = std::max(closest, exact - bound);
            if (exact > bound) {
                return {false, fmt::format("{} n=({}) exceeds its bound by {:.3e} in log", to_string(kind),
                                           n.to_string(), exact - bound)};
            }
        }
    }
    const double t = seconds_since(t0);
    return {t < 60.0, fmt::format("{} out-of-window counts, largest log(exact/bound) = {:.3f}, {:.2f}s", scanned,
                                  closest, t)};
}

// 7. Product brackets and the asymptotic product.
Verdict product_brackets() {
    double fitted = 0.0;
    double worst_ratio = 0.0;
    for (std::int64_t m : {100, 1000}) {
        for (int sign : {1, -1}) {
            for (std::int64_t n = 1; n <= 50; ++n) {
                const auto p = product_asymptotic(n, m, sign);
                const double md = static_cast<double>(m);
                fitted = std::max({fitted, (p.log_lower - p.log_product_exact) * md,
                                   (p.log_product_exact - p.log_upper) * md});
                const double rel = std::abs(std::expm1(p.log_asymptotic - p.log_product_exact));
                const double allowed = 10.0 * static_cast<double>(n) / (md * (md + sign * static_cast<double>(n)));
                worst_ratio = std::max(worst_ratio, rel / allowed);
            }
        }
    }
    return {fitted < 10.0 && worst_ratio <= 1.0,
            fmt::format("bracket constant {:.3f} (< 10), asymptotic error at most {:.3f} of 10n/(m(m+-n))",
                        std::max(fitted, 0.0), worst_ratio)};
}

// 8. Haar-averaged binned counts against the exact values.
Verdict mc_agreement() {
    const auto t0 = Clock::now();
    McParams boson;
    boson.kind = ParticleKind::boson;
    boson.bins = BinPartition({1, 1});
    boson.total = 2;
    McParams fermion = boson;
    fermion.kind = ParticleKind::fermion;
    fermion.bins = BinPartition({2, 2});
    bool ok = true;
    std::string detail;
    for (const auto* p : {&boson, &fermion}) {
        for (const auto& [n, e] : mc_average(McMode::haar_average, *p, 10000, 8)) {
            const double exact = quantum_prob(n, p->bins, p->kind, NumericMode::exact).value();
            ok = ok && e.consistent_with(exact);
            detail += fmt::format("{} ({}) {:.4f}+-{:.4f} vs {:.4f}; ", to_string(p->kind), n.to_string(), e.mean,
                                  e.std_error, exact);
        }
    }
    const double t = seconds_since(t0);
    return {ok && t < 120.0, detail + fmt::format("{:.2f}s", t)};
}

// 9. Pair averages, cross moments and Weingarten sums.
Verdict weingarten_suite() {
    const auto t0 = Clock::now();
    int closed = 0;
    for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
        for (int total = 1; total <= 3; ++total) {
            for (int ports = total; ports <= 6; ++ports) {
                std::vector<OccupationVector> states;
                for_each_occupation(total, ports, kind == ParticleKind::fermion ? 1 : total,
                                    [&](const OccupationVector& o) { states.push_back(o); });
                for (const auto& n : states) {
                    for (const auto& m : states) {
                        for (const auto& s : states) {
                            const auto avg = permanent_pair_average(n, m, s, ports, kind);
                            if (!avg.agree()) {
                                return {false, fmt::format("{} n=({}) m=({}) s=({}) M={}", to_string(kind),
                                                           n.to_string(), m.to_string(), s.to_string(), ports)};
                            }
                            ++closed;
                        }
                    }
                }
            }
        }
    }

    int cross = 0;
    bool cross_ok = true;
    const std::vector<std::pair<OccupationVector, OccupationVector>> mixtures = {
        {OccupationVector({1, 1, 0}), OccupationVector({2, 0, 0})},
        {OccupationVector({1, 1, 0}), OccupationVector({0, 1, 1})},
    };
    for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
        for (const auto& [a, b] : mixtures) {
            if (kind == ParticleKind::fermion && !b.at_most_one_per_port()) continue;
            const std::vector<DensityCoefficient> rho = {
                {a, a, 0.5}, {b, b, 0.5}, {a, b, {0.25, 0.1}}, {b, a, {0.25, -0.1}}};
            const auto report = mixed_state_check(rho, 3, BinPartition({1, 2}), kind, 100000, 9);
            for (const auto& mc : report.moments) {
                if (mc.n == mc.m) continue;
                ++cross;
                cross_ok = cross_ok && mc.exact == 0 && mc.real.consistent_with(0.0) && mc.imag.consistent_with(0.0);
            }
        }
    }

    int sums = 0;
    for (int total = 1; total <= 4; ++total) {
        for (int ports = total; ports <= 8; ++ports) {
            for (auto kind : {ParticleKind::boson, ParticleKind::fermion}) {
                if (weingarten_sum_identity(total, ports, kind) !=
                    avg_configuration_prob(total, ports, kind, NumericMode::exact).rational()) {
                    return {false, fmt::format("{} sum identity N={} M={}", to_string(kind), total, ports)};
                }
                ++sums;
            }
        }
    }
    const double t = seconds_since(t0);
    return {cross_ok, fmt::format("{} pair averages exact, {} cross moments within 3 stderr of 0 at 1e5 samples, "
                                  "{} sum identities exact, {:.1f}s",
                                  closed, cross, sums, t)};
}

// 10. Fixed M = 16, boson log probability against the high-density law.
Verdict high_density() {
    const BinPartition bins({8, 8});
    auto gap = [&](std::int64_t total) {
        const CountVector n({total / 2, total / 2});
        const double exact = quantum_prob(n, bins, ParticleKind::boson, NumericMode::logspace).log();
        return std::abs(gaussian_high_density(n, bins, ParticleKind::boson) - exact) / std::abs(exact);
    };
    const double g3 = gap(1000);
    const double g4 = gap(10000);
    return {g4 < 0.10 && g4 < g3, fmt::format("relative log gap {:.4f} at N=1e4 (< 0.10), {:.4f} at N=1e3", g4, g3)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"normalization and fermion support", normalization_and_support},
        {"layer factorization", factorization},
        {"KL identities and Pinsker", kl_identities},
        {"de Moivre-Laplace peak", de_moivre_laplace},
        {"quantum Gaussian convergence", gaussian_convergence},
        {"tail bounds", tail_bounds},
        {"product brackets", product_brackets},
        {"Monte Carlo agreement", mc_agreement},
        {"Weingarten suite", weingarten_suite},
        {"high-density law", high_density},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v{false, ""};
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, fmt::format("threw: {}", e.what())};
        }
        if (!v.passed) ++failed;
        fmt::print("[{}] {:>2} {}: {}\n", v.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
