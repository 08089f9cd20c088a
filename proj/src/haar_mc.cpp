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

#include "qcount/haar_mc.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "qcount/binned_stats.hpp"
#include "qcount/group_integrals.hpp"
#include "qcount/kernels.hpp"
#include "qcount/permutations.hpp"

namespace qcount {

namespace {

constexpr std::int64_t kChunkSize = 256;

double factorial_value(const BigInt& f) { return f.get_d(); }

void check_particles(const OccupationVector& occ, ParticleKind kind, const char* what) {
    if (kind == ParticleKind::fermion && !occ.at_most_one_per_port()) {
        throw std::invalid_argument(fmt::format("{}: fermion occupations must be 0 or 1, got ({})", what,
                                                occ.to_string()));
    }
}

// Running mean and sum of squared deviations, merged with Chan's update.
struct Moments {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(count + o.count);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.count) / total;
        m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / total;
        count += o.count;
    }
};

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Draws `samples` vectors of `width` values in fixed chunks, each chunk on
// its own stream, and reduces the chunks in index order.
std::vector<MCEstimate> run_chunks(std::size_t width, std::int64_t samples, std::uint64_t seed, unsigned threads,
                                   const std::function<void(Rng&, std::span<double>)>& draw) {
    if (samples < 2) throw std::invalid_argument(fmt::format("samples must be at least 2, got {}", samples));
    const std::int64_t chunks = (samples + kChunkSize - 1) / kChunkSize;
    std::vector<std::vector<Moments>> partial(static_cast<std::size_t>(chunks), std::vector<Moments>(width));
    std::atomic<std::int64_t> next{0};

    std::mutex mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        std::vector<double> values(width);
        try {
            for (std::int64_t c = next++; c < chunks; c = next++) {
                Rng rng(stream_seed(seed, static_cast<std::uint64_t>(c)));
                const std::int64_t begin = c * kChunkSize;
                const std::int64_t end = std::min(samples, begin + kChunkSize);
                auto& acc = partial[static_cast<std::size_t>(c)];
                for (std::int64_t i = begin; i < end; ++i) {
                    std::fill(values.begin(), values.end(), 0.0);
                    draw(rng, values);
                    for (std::size_t k = 0; k < width; ++k) acc[k].add(values[k]);
                }
            }
        } catch (...) {
            std::lock_guard lock(mutex);
            if (!failure) failure = std::current_exception();
            next = chunks;
        }
    };

    const unsigned pool = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(chunks));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(pool);
        for (unsigned t = 0; t < pool; ++t) workers.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Moments> total(width);
    for (const auto& chunk : partial) {
        for (std::size_t k = 0; k < width; ++k) total[k].merge(chunk[k]);
    }
    std::vector<MCEstimate> out(width);
    for (std::size_t k = 0; k < width; ++k) {
        const double n = static_cast<double>(total[k].count);
        const double variance = total[k].m2 / (n - 1.0);
        out[k] = MCEstimate{total[k].mean, std::sqrt(std::max(variance, 0.0) / n), total[k].count, seed};
    }
    return out;
}

// Output occupations of one experiment and the bin slot each one feeds.
struct OutputSpace {
    std::vector<OccupationVector> outputs;
    std::vector<std::size_t> slot;
    std::vector<CountVector> counts;  // one per slot, ascending

    OutputSpace(int total, const BinPartition& bins, ParticleKind kind) {
        const int ports = static_cast<int>(bins.ports());
        const int cap = kind == ParticleKind::fermion ? 1 : total;
        std::map<CountVector, std::size_t> index;
        for_each_occupation(total, ports, cap, [&](const OccupationVector& occ) {
            outputs.push_back(occ);
            index.emplace(bin_counts(occ, bins), 0);
        });
        std::size_t k = 0;
        for (auto& [counts_key, value] : index) {
            value = k++;
            counts.push_back(counts_key);
        }
        slot.reserve(outputs.size());
        for (const auto& occ : outputs) slot.push_back(index.at(bin_counts(occ, bins)));
    }

    void accumulate(const UnitaryMatrix& u, const OccupationVector& in, ParticleKind kind,
                    std::span<double> out) const {
        for (std::size_t k = 0; k < outputs.size(); ++k) out[slot[k]] += transition_prob(u, in, outputs[k], kind);
    }
};

void check_binned_size(int total, std::int64_t ports) {
    if (total > kMaxBinnedParticles || ports > kMaxBinnedPorts) {
        throw CostGuardError(fmt::format("binned enumeration limited to N <= {} and M <= {}, got N = {}, M = {}",
                                         kMaxBinnedParticles, kMaxBinnedPorts, total, ports));
    }
}

std::vector<int> random_subset(int ports, int size, Rng& rng) {
    std::vector<int> all(static_cast<std::size_t>(ports));
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < size; ++i) {
        std::uniform_int_distribution<int> pick(i, ports - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    all.resize(static_cast<std::size_t>(size));
    return all;
}

}  // namespace

UnitaryMatrix::UnitaryMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw std::invalid_argument("unitary matrix must be square and non-empty");
    }
    const double dev = unitarity_deviation();
    if (!(dev <= kUnitarityTolerance)) {
        throw std::invalid_argument(fmt::format("matrix is not unitary: max |U^dagger U - I| = {:.3e}", dev));
    }
}

double UnitaryMatrix::unitarity_deviation() const {
    const auto n = static_cast<std::size_t>(entries_.rows());
    return kernels::active().unitarity_deviation({entries_.data(), n * n}, n);
}

UnitaryMatrix UnitaryMatrix::identity(int dim) { return UnitaryMatrix(ComplexMatrix::Identity(dim, dim)); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

UnitaryMatrix sample_haar_unitary(int dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument(fmt::format("unitary dimension must be positive, got {}", dim));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    ComplexMatrix z(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i, j) = {re, im};
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    const auto& r = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        const std::complex<double> d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(j) *= d / mag;
    }
    return UnitaryMatrix(std::move(q));
}

UnitaryMatrix sample_haar_unitary(int dim, std::uint64_t seed) {
    Rng rng(stream_seed(seed, 0));
    return sample_haar_unitary(dim, rng);
}

std::complex<double> permanent(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("permanent needs a square matrix");
    const int n = static_cast<int>(a.rows());
    if (n > kMaxPermanentDim) {
        throw CostGuardError(fmt::format("permanent dimension {} exceeds the limit {}", n, kMaxPermanentDim));
    }
    if (n == 0) return {1.0, 0.0};

    const auto un = static_cast<std::size_t>(n);
    std::vector<double> col_re(un * un);
    std::vector<double> col_im(un * un);
    for (std::size_t j = 0; j < un; ++j) {
        for (std::size_t i = 0; i < un; ++i) {
            col_re[j * un + i] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)).real();
            col_im[j * un + i] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)).imag();
        }
    }
    std::vector<double> row_re(un, 0.0);
    std::vector<double> row_im(un, 0.0);
    const auto& k = kernels::active();

    std::complex<double> total = 0.0;
    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < subsets; ++step) {
        const int j = std::countr_zero(step);
        const std::uint64_t bit = std::uint64_t{1} << j;
        gray ^= bit;
        const double sign = (gray & bit) ? 1.0 : -1.0;
        const auto col = static_cast<std::size_t>(j) * un;
        k.ryser_update(row_re, row_im, std::span(col_re).subspan(col, un), std::span(col_im).subspan(col, un), sign);
        const std::complex<double> prod = k.complex_product(row_re, row_im);
        if (std::popcount(gray) % 2 == 1) {
            total -= prod;
        } else {
            total += prod;
        }
    }
    return n % 2 == 1 ? -total : total;
}

std::complex<double> permanent_naive(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("permanent needs a square matrix");
    const int n = static_cast<int>(a.rows());
    if (n > 9) throw CostGuardError("naive permanent limited to dimension 9");
    std::complex<double> sum = 0.0;
    for (const auto& p : all_permutations(n)) {
        std::complex<double> prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= a(i, p[static_cast<std::size_t>(i)]);
        sum += prod;
    }
    return sum;
}

std::complex<double> determinant(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant needs a square matrix");
    if (a.rows() == 0) return {1.0, 0.0};
    return a.determinant();
}

ComplexMatrix submatrix(const UnitaryMatrix& u, const OccupationVector& rows, const OccupationVector& cols) {
    if (rows.ports() != u.dim() || cols.ports() != u.dim()) {
        throw std::invalid_argument(
            fmt::format("occupation vectors must have {} ports, got {} and {}", u.dim(), rows.ports(), cols.ports()));
    }
    if (rows.total() != cols.total()) {
        throw std::invalid_argument(
            fmt::format("particle numbers differ: {} in, {} out", rows.total(), cols.total()));
    }
    const auto r = rows.port_list();
    const auto c = cols.port_list();
    const auto n = static_cast<Eigen::Index>(r.size());
    ComplexMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = u(r[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]);
    }
    return out;
}

double transition_prob(const UnitaryMatrix& u, const OccupationVector& in, const OccupationVector& out,
                       ParticleKind kind) {
    if (in.total() > kMaxTransitionParticles) {
        throw CostGuardError(fmt::format("transition probabilities limited to N <= {}, got {}",
                                         kMaxTransitionParticles, in.total()));
    }
    check_particles(in, kind, "input");
    check_particles(out, kind, "output");
    const ComplexMatrix sub = submatrix(u, in, out);
    switch (kind) {
    case ParticleKind::boson: {
        const double denom = factorial_value(in.factorial_product() * out.factorial_product());
        return std::norm(permanent(sub)) / denom;
    }
    case ParticleKind::fermion:
        return std::norm(determinant(sub));
    default: {
        const ComplexMatrix weights = sub.cwiseAbs2().cast<std::complex<double>>();
        return permanent(weights).real() / factorial_value(out.factorial_product());
    }
    }
}

void for_each_occupation(int total, int ports, int cap, const std::function<void(const OccupationVector&)>& visit) {
    if (total < 0 || ports < 1) throw std::invalid_argument("need N >= 0 particles and M >= 1 ports");
    std::vector<int> occ(static_cast<std::size_t>(ports), 0);
    std::function<void(int, int)> fill = [&](int port, int remaining) {
        if (port == ports - 1) {
            if (remaining <= cap) {
                occ[static_cast<std::size_t>(port)] = remaining;
                visit(OccupationVector(occ));
            }
            return;
        }
        for (int k = std::min(cap, remaining); k >= 0; --k) {
            occ[static_cast<std::size_t>(port)] = k;
            fill(port + 1, remaining - k);
        }
        occ[static_cast<std::size_t>(port)] = 0;
    };
    fill(0, total);
}

CountVector bin_counts(const OccupationVector& occ, const BinPartition& bins) {
    if (occ.ports() != bins.ports()) {
        throw std::invalid_argument(
            fmt::format("occupation has {} ports but the bins cover {}", occ.ports(), bins.ports()));
    }
    std::vector<std::int64_t> counts(bins.bins(), 0);
    std::size_t port = 0;
    for (std::size_t b = 0; b < bins.bins(); ++b) {
        for (std::int64_t k = 0; k < bins[b]; ++k) counts[b] += occ[port++];
    }
    return CountVector(std::move(counts));
}

std::map<CountVector, double> binned_prob_fixed_U(const UnitaryMatrix& u, const OccupationVector& in,
                                                  const BinPartition& bins, ParticleKind kind) {
    check_binned_size(in.total(), bins.ports());
    if (bins.ports() != u.dim()) {
        throw std::invalid_argument(fmt::format("bins cover {} ports but U has dimension {}", bins.ports(), u.dim()));
    }
    const OutputSpace space(in.total(), bins, kind);
    std::vector<double> probs(space.counts.size(), 0.0);
    space.accumulate(u, in, kind, probs);
    std::map<CountVector, double> out;
    for (std::size_t k = 0; k < probs.size(); ++k) out.emplace(space.counts[k], probs[k]);
    return out;
}

bool MCEstimate::consistent_with(double target, double k) const {
    return std::abs(mean - target) <= k * std_error + 1e-12;
}

std::string_view to_string(McMode mode) {
    switch (mode) {
    case McMode::haar_average: return "haar_average";
    case McMode::input_average: return "input_average";
    default: return "scattershot";
    }
}

McMode parse_mc_mode(std::string_view text) {
    if (text == "haar_average" || text == "haar") return McMode::haar_average;
    if (text == "input_average" || text == "input") return McMode::input_average;
    if (text == "scattershot") return McMode::scattershot;
    throw std::invalid_argument(
        fmt::format("unknown mc mode '{}' (expected haar_average, input_average or scattershot)", text));
}

UnitaryMatrix default_fixed_unitary(int dim, std::uint64_t seed) {
    return sample_haar_unitary(dim, splitmix64(seed ^ 0x5851f42d4c957f2dULL));
}

std::map<CountVector, MCEstimate> mc_average(McMode mode, const McParams& params, std::int64_t samples,
                                             std::uint64_t seed) {
    const int total = params.total;
    const int ports = static_cast<int>(params.bins.ports());
    const ParticleKind kind = params.kind;
    if (total < 1) throw std::invalid_argument(fmt::format("N must be positive, got {}", total));
    if (kind == ParticleKind::fermion && total > ports) {
        throw std::invalid_argument(fmt::format("{} fermions do not fit in {} ports", total, ports));
    }
    if (mode == McMode::scattershot && total > ports) {
        throw std::invalid_argument(fmt::format("scattershot needs N <= M, got N = {}, M = {}", total, ports));
    }
    if (samples < 2) throw std::invalid_argument(fmt::format("samples must be at least 2, got {}", samples));
    check_binned_size(total, ports);

    const OutputSpace space(total, params.bins, kind);
    std::function<void(Rng&, std::span<double>)> draw;

    switch (mode) {
    case McMode::haar_average: {
        OccupationVector input;
        if (params.input) {
            input = *params.input;
            if (input.total() != total || input.ports() != ports) {
                throw std::invalid_argument(fmt::format("input ({}) does not hold N = {} particles in M = {} ports",
                                                        input.to_string(), total, ports));
            }
        } else {
            std::vector<int> list(static_cast<std::size_t>(total));
            for (int i = 0; i < total; ++i) list[static_cast<std::size_t>(i)] = i % ports;
            input = OccupationVector::from_ports(list, ports);
        }
        check_particles(input, kind, "input");
        draw = [&space, input, ports, kind](Rng& rng, std::span<double> out) {
            space.accumulate(sample_haar_unitary(ports, rng), input, kind, out);
        };
        break;
    }
    case McMode::input_average: {
        const UnitaryMatrix u = params.unitary ? *params.unitary : default_fixed_unitary(ports, seed);
        if (u.dim() != ports) {
            throw std::invalid_argument(fmt::format("fixed unitary has dimension {}, bins need {}", u.dim(), ports));
        }
        if (kind == ParticleKind::distinguishable) {
            // Labelled particles: each one enters a uniformly random port.
            draw = [&space, u, ports, total, kind](Rng& rng, std::span<double> out) {
                std::uniform_int_distribution<int> pick(0, ports - 1);
                std::vector<int> list(static_cast<std::size_t>(total));
                for (auto& p : list) p = pick(rng);
                space.accumulate(u, OccupationVector::from_ports(list, ports), kind, out);
            };
        } else {
            // Uniform over the allowed Fock states, which are exactly the outputs.
            draw = [&space, u, kind](Rng& rng, std::span<double> out) {
                std::uniform_int_distribution<std::size_t> pick(0, space.outputs.size() - 1);
                space.accumulate(u, space.outputs[pick(rng)], kind, out);
            };
        }
        break;
    }
    case McMode::scattershot:
        draw = [&space, ports, total, kind](Rng& rng, std::span<double> out) {
            const UnitaryMatrix u = sample_haar_unitary(ports, rng);
            const auto list = random_subset(ports, total, rng);
            space.accumulate(u, OccupationVector::from_ports(list, ports), kind, out);
        };
        break;
    }

    const auto estimates = run_chunks(space.counts.size(), samples, seed, params.threads, draw);
    std::map<CountVector, MCEstimate> out;
    for (std::size_t k = 0; k < estimates.size(); ++k) out.emplace(space.counts[k], estimates[k]);
    return out;
}

bool MixedStateReport::all_consistent() const {
    return std::all_of(moments.begin(), moments.end(), [](const auto& m) { return m.consistent; }) &&
           std::all_of(bins.begin(), bins.end(), [](const auto& b) { return b.consistent; });
}

MixedStateReport mixed_state_check(std::span<const DensityCoefficient> rho, int ports, const BinPartition& bins,
                                   ParticleKind kind, std::int64_t samples, std::uint64_t seed,
                                   std::span<const OccupationVector> outputs, unsigned threads) {
    if (kind == ParticleKind::distinguishable) {
        throw std::invalid_argument("mixed_state_check needs bosons or fermions");
    }
    if (rho.empty()) throw std::invalid_argument("density matrix has no coefficients");
    if (bins.ports() != ports) {
        throw std::invalid_argument(fmt::format("bins cover {} ports, expected M = {}", bins.ports(), ports));
    }
    const int total = rho.front().n.total();
    if (total > kMaxMomentOrder || ports > 6) {
        throw CostGuardError(fmt::format("mixed-state checks limited to N <= {} and M <= 6, got N = {}, M = {}",
                                         kMaxMomentOrder, total, ports));
    }

    // Merge repeated entries, then demand rho_{mn} = conj(rho_{nm}) and unit trace.
    std::map<std::pair<OccupationVector, OccupationVector>, std::complex<double>> entries;
    for (const auto& c : rho) {
        for (const auto* occ : {&c.n, &c.m}) {
            if (occ->total() != total || occ->ports() != ports) {
                throw std::invalid_argument(fmt::format("coefficient state ({}) must hold N = {} particles in {} ports",
                                                        occ->to_string(), total, ports));
            }
            check_particles(*occ, kind, "density matrix");
        }
        entries[{c.n, c.m}] += c.weight;
    }
    std::complex<double> trace = 0.0;
    for (const auto& [key, w] : entries) {
        const auto mirror = entries.find({key.second, key.first});
        const std::complex<double> partner = mirror == entries.end() ? 0.0 : mirror->second;
        if (std::abs(w - std::conj(partner)) > 1e-12) {
            throw std::invalid_argument(fmt::format("density matrix is not Hermitian at ({}) / ({})",
                                                    key.first.to_string(), key.second.to_string()));
        }
        if (key.first == key.second) trace += w;
    }
    if (std::abs(trace - 1.0) > 1e-12) {
        throw std::invalid_argument(fmt::format("density matrix trace is {:.15g}{:+.3g}i, expected 1", trace.real(),
                                                trace.imag()));
    }

    std::vector<OccupationVector> states;
    for (const auto& [key, w] : entries) {
        states.push_back(key.first);
        states.push_back(key.second);
    }
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    auto state_index = [&](const OccupationVector& occ) {
        return static_cast<std::size_t>(std::lower_bound(states.begin(), states.end(), occ) - states.begin());
    };

    const OutputSpace space(total, bins, kind);
    std::vector<OccupationVector> probes(outputs.begin(), outputs.end());
    if (probes.empty()) probes = space.outputs;
    std::vector<std::size_t> probe_slot;
    for (const auto& s : probes) {
        const auto it = std::find(space.outputs.begin(), space.outputs.end(), s);
        if (it == space.outputs.end()) {
            throw std::invalid_argument(fmt::format("output ({}) is not a valid {}-particle state", s.to_string(), total));
        }
        probe_slot.push_back(static_cast<std::size_t>(it - space.outputs.begin()));
    }

    struct Pair {
        std::size_t n, m;
        std::complex<double> weight;
        OccupationVector n_occ, m_occ;
    };
    std::vector<Pair> pairs;
    for (const auto& [key, w] : entries) {
        pairs.push_back({state_index(key.first), state_index(key.second), w, key.first, key.second});
    }
    std::vector<double> state_norm(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) state_norm[i] = std::sqrt(factorial_value(states[i].factorial_product()));
    std::vector<double> output_norm(space.outputs.size());
    for (std::size_t i = 0; i < space.outputs.size(); ++i) {
        output_norm[i] = std::sqrt(factorial_value(space.outputs[i].factorial_product()));
    }

    const std::size_t moment_width = 2 * pairs.size() * probes.size();
    const std::size_t width = moment_width + space.counts.size();
    auto draw = [&](Rng& rng, std::span<double> out) {
        const UnitaryMatrix u = sample_haar_unitary(ports, rng);
        std::vector<std::complex<double>> amp(states.size() * space.outputs.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            for (std::size_t o = 0; o < space.outputs.size(); ++o) {
                const ComplexMatrix sub = submatrix(u, states[i], space.outputs[o]);
                amp[i * space.outputs.size() + o] = kind == ParticleKind::boson ? permanent(sub) : determinant(sub);
            }
        }
        std::size_t k = 0;
        for (const auto& p : pairs) {
            for (std::size_t slot : probe_slot) {
                const auto v = amp[p.n * space.outputs.size() + slot] * std::conj(amp[p.m * space.outputs.size() + slot]);
                out[k++] = v.real();
                out[k++] = v.imag();
            }
        }
        for (std::size_t o = 0; o < space.outputs.size(); ++o) {
            std::complex<double> prob = 0.0;
            for (const auto& p : pairs) {
                prob += p.weight * amp[p.n * space.outputs.size() + o] * std::conj(amp[p.m * space.outputs.size() + o]) /
                        (state_norm[p.n] * state_norm[p.m]);
            }
            out[moment_width + space.slot[o]] += prob.real() / (output_norm[o] * output_norm[o]);
        }
    };
    const auto estimates = run_chunks(width, samples, seed, threads, draw);

    MixedStateReport report;
    std::size_t k = 0;
    for (const auto& p : pairs) {
        for (const auto& s : probes) {
            MomentCheck check{p.n_occ, p.m_occ, s, permanent_pair_average(p.n_occ, p.m_occ, s, ports, kind).closed_form,
                              estimates[k], estimates[k + 1], false};
            k += 2;
            check.consistent = check.real.consistent_with(check.exact.get_d()) && check.imag.consistent_with(0.0);
            report.moments.push_back(std::move(check));
        }
    }
    for (std::size_t b = 0; b < space.counts.size(); ++b) {
        BinCheck check{space.counts[b], quantum_prob(space.counts[b], bins, kind, NumericMode::exact).value(),
                       estimates[moment_width + b], false};
        check.consistent = check.estimate.consistent_with(check.exact);
        report.bins.push_back(std::move(check));
    }
    return report;
}

}  // namespace qcount
