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

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "qcount/asymptotics.hpp"
#include "qcount/binned_stats.hpp"
#include "qcount/cli.hpp"

namespace qcount::cli {

namespace {

constexpr double kLinearFloor = 1e-300;
constexpr std::uint64_t kDefaultVerifySeed = 20260101;

double linear_from_log(double log_p) {
    const double v = std::exp(log_p);
    return v < kLinearFloor ? 0.0 : v;
}

std::int64_t ports_for(const ExperimentConfig& c, std::size_t idx) {
    const std::int64_t total = c.N[idx];
    if (!c.K.empty()) {
        std::int64_t sum = 0;
        for (auto k : c.K) sum += k;
        return sum;
    }
    if (!c.M.empty()) return c.M.size() == 1 ? c.M.front() : c.M[idx];
    Rational m = Rational(total) / *c.alpha;
    m.canonicalize();
    if (m.get_den() != 1) {
        throw ConfigError("alpha", fmt::format("N / alpha = {} is not an integer port count for N = {}", m.get_str(),
                                               total));
    }
    return m.get_num().get_si();
}

BinPartition resolve_bins(const ExperimentConfig& c, std::size_t idx) {
    const std::int64_t total = c.N[idx];
    const std::int64_t ports = ports_for(c, idx);
    if (c.alpha && make_fraction(total, ports) != *c.alpha) {
        throw ConfigError("alpha", fmt::format("alpha = {} disagrees with N / M = {}/{}", c.alpha->get_str(), total,
                                               ports));
    }
    if (c.sigma == ParticleKind::fermion && total > ports) {
        throw ConfigError("N", fmt::format("{} fermions do not fit in M = {} ports", total, ports));
    }
    if (!c.K.empty()) return BinPartition(c.K);
    try {
        return BinPartition::from_fractions(c.q, ports);
    } catch (const std::exception& e) {
        throw ConfigError("q", e.what());
    }
}

double density(std::int64_t total, const BinPartition& bins) {
    return static_cast<double>(total) / static_cast<double>(bins.ports());
}

void check_density(const ExperimentConfig& c, double alpha) {
    if (c.sigma == ParticleKind::fermion && alpha >= 1.0) {
        throw ConfigError("alpha", fmt::format("fermion asymptotics need N/M < 1, got {}", alpha));
    }
}

Window window_of(const ExperimentConfig& c) { return Window(c.A, c.epsilon); }

// Visits the count vectors inside the window, n_1 .. n_{r-1} ascending.
void for_each_window_vector(std::int64_t total, const BinPartition& bins, const Window& window,
                            const std::function<void(const CountVector&)>& visit) {
    const std::size_t r = bins.bins();
    const double w = window.half_width(total);
    double estimate = 1.0;
    for (std::size_t i = 0; i + 1 < r; ++i) estimate *= 2.0 * w + 1.0;
    if (estimate > static_cast<double>(kMaxTableRows)) {
        throw CostGuardError(fmt::format("about {:.3g} in-window count vectors at N = {}; limit {}", estimate, total,
                                         kMaxTableRows));
    }
    std::vector<std::int64_t> n(r, 0);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t remaining) {
        if (i + 1 == r) {
            n[i] = remaining;
            CountVector v(n);
            if (in_window(v, bins, window)) visit(v);
            return;
        }
        const double centre = static_cast<double>(total) * bins.fraction_value(i);
        const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(centre - w)));
        const auto hi = std::min<std::int64_t>(remaining, static_cast<std::int64_t>(std::floor(centre + w)));
        for (std::int64_t k = lo; k <= hi; ++k) {
            n[i] = k;
            rec(i + 1, remaining - k);
        }
    };
    rec(0, total);
}

void check_space(std::int64_t total, std::size_t r) {
    const auto size = count_vector_space_size(total, r);
    if (size > kMaxTableRows) {
        throw CostGuardError(fmt::format("{} count vectors for N = {}, r = {}; limit {}", size, total, r,
                                         kMaxTableRows));
    }
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    const unsigned pool = std::min<unsigned>(threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads,
                                             static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < pool; ++t) workers.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> count_columns(std::size_t r) {
    std::vector<std::string> cols;
    for (std::size_t i = 1; i <= r; ++i) cols.push_back(fmt::format("n{}", i));
    return cols;
}

void push_counts(std::vector<Cell>& row, const CountVector& n) {
    for (auto x : n.counts()) row.emplace_back(std::int64_t{x});
}

Table start_table(const ExperimentConfig& c) {
    Table t;
    t.metadata.emplace_back("qcount_version", std::string(kVersion));
    for (const auto& [k, v] : echo_config(c)) t.metadata.emplace_back(k, v);
    return t;
}

RunResult run_exact(const ExperimentConfig& c) {
    const BinPartition bins = resolve_bins(c, 0);
    const std::int64_t total = c.N.front();
    check_space(total, bins.bins());
    Table t = start_table(c);
    t.columns = {"N", "M"};
    for (auto& col : count_columns(bins.bins())) t.columns.push_back(col);
    for (const char* col : {"p_exact", "p", "log_p"}) t.columns.emplace_back(col);
    for_each_count_vector(total, bins.bins(), [&](const CountVector& n) {
        const ProbValue p = quantum_prob(n, bins, c.sigma, c.numeric);
        std::vector<Cell> row{total, bins.ports()};
        push_counts(row, n);
        row.emplace_back(p.is_exact() ? Cell(p.rational().get_str()) : Cell());
        row.emplace_back(linear_from_log(p.log()));
        row.emplace_back(p.log());
        t.rows.push_back(std::move(row));
    });
    return {std::move(t), 0};
}

RunResult run_gauss(const ExperimentConfig& c) {
    const Window window = window_of(c);
    const bool boson = c.sigma == ParticleKind::boson;
    std::vector<std::vector<std::vector<Cell>>> blocks(c.N.size());
    std::size_t r = 0;
    for (std::size_t i = 0; i < c.N.size(); ++i) {
        const auto bins = resolve_bins(c, i);
        check_density(c, density(c.N[i], bins));
        r = bins.bins();
    }
    parallel_for(c.N.size(), c.threads, [&](std::size_t i) {
        const std::int64_t total = c.N[i];
        const BinPartition bins = resolve_bins(c, i);
        const double alpha = density(total, bins);
        for_each_window_vector(total, bins, window, [&](const CountVector& n) {
            const double log_exact = quantum_prob(n, bins, c.sigma, NumericMode::logspace).log();
            const GaussianLaw g = gaussian_law(n, bins, c.sigma, alpha, window);
            std::vector<Cell> row{total, bins.ports()};
            push_counts(row, n);
            row.emplace_back(log_exact);
            row.emplace_back(g.log_value);
            row.emplace_back(std::expm1(g.log_value - log_exact));
            row.emplace_back(g.leading_error_scale);
            if (boson) {
                const double hd = gaussian_high_density(n, bins, c.sigma);
                row.emplace_back(hd);
                row.emplace_back(std::expm1(hd - log_exact));
            }
            blocks[i].push_back(std::move(row));
        });
    });
    Table t = start_table(c);
    t.columns = {"N", "M"};
    for (auto& col : count_columns(r)) t.columns.push_back(col);
    for (const char* col : {"log_exact", "log_gauss", "rel_error", "error_scale"}) t.columns.emplace_back(col);
    if (boson) {
        t.columns.emplace_back("log_high_density");
        t.columns.emplace_back("rel_error_high_density");
    }
    for (auto& block : blocks) {
        for (auto& row : block) t.rows.push_back(std::move(row));
    }
    return {std::move(t), 0};
}

RunResult run_tail(const ExperimentConfig& c) {
    const Window window = window_of(c);
    std::vector<std::vector<std::vector<Cell>>> blocks(c.N.size());
    std::size_t r = 0;
    for (std::size_t i = 0; i < c.N.size(); ++i) {
        const auto bins = resolve_bins(c, i);
        check_density(c, density(c.N[i], bins));
        check_space(c.N[i], bins.bins());
        r = bins.bins();
    }
    parallel_for(c.N.size(), c.threads, [&](std::size_t i) {
        const std::int64_t total = c.N[i];
        const BinPartition bins = resolve_bins(c, i);
        const double alpha = density(total, bins);
        for_each_count_vector(total, bins.bins(), [&](const CountVector& n) {
            if (in_window(n, bins, window)) return;
            const double log_exact = quantum_prob(n, bins, c.sigma, NumericMode::logspace).log();
            const double log_bound = tail_bound(n, bins, c.sigma, alpha, window);
            const bool holds = log_exact <= log_bound;
            std::vector<Cell> row{total, bins.ports()};
            push_counts(row, n);
            row.emplace_back(log_exact);
            row.emplace_back(log_bound);
            row.emplace_back(holds);
            blocks[i].push_back(std::move(row));
        });
    });
    Table t = start_table(c);
    t.columns = {"N", "M"};
    for (auto& col : count_columns(r)) t.columns.push_back(col);
    for (const char* col : {"log_exact", "log_bound", "holds"}) t.columns.emplace_back(col);
    for (auto& block : blocks) {
        for (auto& row : block) t.rows.push_back(std::move(row));
    }
    return {std::move(t), 0};
}

struct SweepPoint {
    std::int64_t total = 0;
    std::int64_t ports = 0;
    std::int64_t window_points = 0;
    double max_rel_error = 0.0;
    double error_scale = 0.0;
    double max_rel_error_hd = 0.0;
    std::int64_t tail_points = -1;
    double max_log_excess = -std::numeric_limits<double>::infinity();
};

// Two-bin sweeps go through the vectorised range kernels.
void sweep_binary(const ExperimentConfig& c, const BinPartition& bins, SweepPoint& p) {
    const Window window = window_of(c);
    const std::int64_t total = p.total;
    const double alpha = density(total, bins);
    std::vector<double> exact(static_cast<std::size_t>(total + 1));
    std::vector<double> gauss(static_cast<std::size_t>(total + 1));
    binary_log_prob_range(total, bins[0], bins.ports(), c.sigma, 0, exact);
    gaussian_log_binary_range(total, bins, c.sigma, alpha, 0, gauss);
    p.tail_points = 0;
    for (std::int64_t k = 0; k <= total; ++k) {
        const CountVector n({k, total - k});
        const auto idx = static_cast<std::size_t>(k);
        if (in_window(n, bins, window)) {
            ++p.window_points;
            p.max_rel_error = std::max(p.max_rel_error, std::abs(std::expm1(gauss[idx] - exact[idx])));
            if (c.sigma == ParticleKind::boson) {
                const double hd = gaussian_high_density(n, bins, c.sigma);
                p.max_rel_error_hd = std::max(p.max_rel_error_hd, std::abs(std::expm1(hd - exact[idx])));
            }
        } else {
            ++p.tail_points;
            p.max_log_excess = std::max(p.max_log_excess, exact[idx] - tail_bound(n, bins, c.sigma, alpha, window));
        }
    }
}

void sweep_general(const ExperimentConfig& c, const BinPartition& bins, SweepPoint& p) {
    const Window window = window_of(c);
    const double alpha = density(p.total, bins);
    for_each_window_vector(p.total, bins, window, [&](const CountVector& n) {
        const double log_exact = quantum_prob(n, bins, c.sigma, NumericMode::logspace).log();
        ++p.window_points;
        p.max_rel_error = std::max(p.max_rel_error,
                                   std::abs(std::expm1(gaussian_law(n, bins, c.sigma, alpha, window).log_value - log_exact)));
        if (c.sigma == ParticleKind::boson) {
            p.max_rel_error_hd = std::max(
                p.max_rel_error_hd, std::abs(std::expm1(gaussian_high_density(n, bins, c.sigma) - log_exact)));
        }
    });
    if (count_vector_space_size(p.total, bins.bins()) > kMaxTableRows) return;
    p.tail_points = 0;
    for_each_count_vector(p.total, bins.bins(), [&](const CountVector& n) {
        if (in_window(n, bins, window)) return;
        ++p.tail_points;
        const double log_exact = quantum_prob(n, bins, c.sigma, NumericMode::logspace).log();
        p.max_log_excess = std::max(p.max_log_excess, log_exact - tail_bound(n, bins, c.sigma, alpha, window));
    });
}

RunResult run_sweep(const ExperimentConfig& c) {
    const Window window = window_of(c);
    std::vector<SweepPoint> points(c.N.size());
    for (std::size_t i = 0; i < c.N.size(); ++i) {
        const auto bins = resolve_bins(c, i);
        const double alpha = density(c.N[i], bins);
        check_density(c, alpha);
        if (bins.bins() == 2 && c.N[i] > kMaxTableRows) {
            throw CostGuardError(fmt::format("two-bin sweep limited to N <= {}", kMaxTableRows));
        }
        if (bins.bins() > 2) {
            const double w = window.half_width(c.N[i]);
            if (std::pow(2.0 * w + 1.0, static_cast<double>(bins.bins() - 1)) > static_cast<double>(kMaxTableRows)) {
                throw CostGuardError(fmt::format("too many in-window count vectors at N = {}", c.N[i]));
            }
        }
    }
    parallel_for(c.N.size(), c.threads, [&](std::size_t i) {
        const BinPartition bins = resolve_bins(c, i);
        SweepPoint& p = points[i];
        p.total = c.N[i];
        p.ports = bins.ports();
        // Scale from an arbitrary in-window point; it does not depend on n.
        const double alpha = density(p.total, bins);
        p.error_scale = std::pow(c.sigma == ParticleKind::fermion ? 1.0 - alpha : 1.0, -3.0) *
                            std::pow(static_cast<double>(p.total), -3.0 * c.epsilon) +
                        (c.sigma == ParticleKind::boson ? alpha / static_cast<double>(p.total) : 0.0);
        if (bins.bins() == 2) {
            sweep_binary(c, bins, p);
        } else {
            sweep_general(c, bins, p);
        }
    });

    Table t = start_table(c);
    t.columns = {"N", "M", "window_points", "max_rel_error", "error_scale"};
    const bool boson = c.sigma == ParticleKind::boson;
    if (boson) t.columns.emplace_back("max_rel_error_high_density");
    for (const char* col : {"tail_points", "max_log_excess", "tail_holds", "decreasing"}) t.columns.emplace_back(col);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        std::vector<Cell> row{p.total, p.ports, p.window_points, p.max_rel_error, p.error_scale};
        if (boson) row.emplace_back(p.max_rel_error_hd);
        if (p.tail_points < 0) {
            row.insert(row.end(), {Cell(), Cell(), Cell()});
        } else {
            row.emplace_back(p.tail_points);
            row.emplace_back(p.max_log_excess);
            row.emplace_back(p.max_log_excess <= 0.0);
        }
        row.emplace_back(i == 0 ? Cell() : Cell(p.max_rel_error < points[i - 1].max_rel_error));
        t.rows.push_back(std::move(row));
    }
    return {std::move(t), 0};
}

RunResult run_mc(const ExperimentConfig& c) {
    const BinPartition bins = resolve_bins(c, 0);
    McParams params;
    params.kind = c.sigma;
    params.bins = bins;
    params.total = static_cast<int>(c.N.front());
    params.threads = c.threads;
    const auto estimates = mc_average(c.mode, params, c.samples, *c.seed);

    Table t = start_table(c);
    t.columns = count_columns(bins.bins());
    for (const char* col : {"mean", "std_error", "samples", "seed", "exact", "z_score", "within_3se"}) {
        t.columns.emplace_back(col);
    }
    // Rows in descending count order, matching the exact tables.
    for (auto it = estimates.rbegin(); it != estimates.rend(); ++it) {
        const auto& [n, e] = *it;
        const double exact = quantum_prob(n, bins, c.sigma, NumericMode::logspace).value();
        std::vector<Cell> row;
        push_counts(row, n);
        row.emplace_back(e.mean);
        row.emplace_back(e.std_error);
        row.emplace_back(e.samples);
        row.emplace_back(fmt::format("{}", e.seed));
        row.emplace_back(exact);
        row.emplace_back(e.std_error > 0 ? Cell((e.mean - exact) / e.std_error) : Cell());
        row.emplace_back(e.consistent_with(exact));
        t.rows.push_back(std::move(row));
    }
    return {std::move(t), 0};
}

RunResult run_verify(const ExperimentConfig& c) {
    Table t = start_table(c);
    t.columns = {"property", "passed", "detail"};
    bool all = true;
    for (auto& p : run_verify_suite(c.threads, c.seed.value_or(kDefaultVerifySeed))) {
        all = all && p.passed;
        t.rows.push_back({p.name, p.passed, p.detail});
    }
    return {std::move(t), all ? 0 : 1};
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
    switch (config.command) {
    case Command::exact: return run_exact(config);
    case Command::gauss: return run_gauss(config);
    case Command::tail: return run_tail(config);
    case Command::sweep: return run_sweep(config);
    case Command::mc: return run_mc(config);
    default: return run_verify(config);
    }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Counting statistics of noninteracting particles in binned output ports"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app = nullptr;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
        std::string config_path;
    };
    const std::vector<std::pair<Command, const char*>> commands = {
        {Command::exact, "full table of exact counting probabilities"},
        {Command::gauss, "exact probabilities against the Gaussian laws inside the window"},
        {Command::tail, "exact probabilities against the tail bound outside the window"},
        {Command::sweep, "maximal Gaussian error and tail excess as functions of N"},
        {Command::mc, "Monte Carlo estimates over Haar unitaries or inputs"},
        {Command::verify, "run the invariant suite"},
    };
    const std::map<std::string, std::string> help = {
        {"N", "particle number(s): a,b,c or lo:hi[:step]"},
        {"M", "port count(s)"},
        {"K", "bin sizes, comma separated"},
        {"q", "bin fractions such as 1/2,1/2"},
        {"alpha", "density N/M as a fraction"},
        {"sigma", "distinguishable, boson or fermion"},
        {"A", "window amplitude"},
        {"epsilon", "window exponent offset, in (0, 1/6)"},
        {"samples", "Monte Carlo samples"},
        {"seed", "master RNG seed"},
        {"mode", "haar_average, input_average or scattershot"},
        {"numeric", "exact, logspace or auto"},
        {"out", "output file (default: stdout)"},
        {"format", "csv or json"},
        {"threads", "worker threads (0: all cores)"},
    };
    std::vector<std::unique_ptr<Sub>> subs;
    for (const auto& [command, description] : commands) {
        auto sub = std::make_unique<Sub>();
        sub->app = app.add_subcommand(std::string(to_string(command)), description);
        for (const auto& key : config_keys()) {
            if (key == "command") continue;
            sub->options[key] = sub->app->add_option("--" + key, sub->values[key], help.at(key));
        }
        sub->app->add_option("--config", sub->config_path, "key = value file; flags override it");
        subs.push_back(std::move(sub));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        std::size_t chosen = 0;
        while (chosen < subs.size() && !subs[chosen]->app->parsed()) ++chosen;
        const Sub& sub = *subs[chosen];
        KeyValues flags;
        for (const auto& [key, option] : sub.options) {
            if (option->count() > 0) flags[key] = sub.values.at(key);
        }
        flags["command"] = std::string(to_string(commands[chosen].first));
        KeyValues values = sub.config_path.empty() ? flags : merge(load_config_file(sub.config_path), flags);
        const ExperimentConfig config = build_config(values);

        const RunResult result = run(config);
        if (config.out.empty()) {
            write_table(out, result.table, config.format);
        } else {
            std::ofstream file(config.out, std::ios::binary);
            if (!file) throw ConfigError("out", fmt::format("cannot write '{}'", config.out));
            write_table(file, result.table, config.format);
        }
        return result.exit_code;
    } catch (const ConfigError& e) {
        err << "qcount: error: " << e.what() << '\n';
        return 2;
    } catch (const CostGuardError& e) {
        err << "qcount: cost guard: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "qcount: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "qcount: failed: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace qcount::cli
