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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "qcount/binned_stats.hpp"
#include "qcount/haar_mc.hpp"
#include "qcount/permutations.hpp"

using namespace qcount;

namespace {

using cd = std::complex<double>;

ComplexMatrix beam_splitter() {
    ComplexMatrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

// Mean and standard error of f(U) over Haar draws.
template <class F>
std::pair<double, double> haar_mean(int dim, int draws, std::uint64_t seed, F f) {
    Rng rng(seed);
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double v = f(sample_haar_unitary(dim, rng));
        sum += v;
        sq += v * v;
    }
    const double mean = sum / draws;
    const double var = (sq - draws * mean * mean) / (draws - 1);
    return {mean, std::sqrt(var / draws)};
}

double exact_p(const CountVector& n, const BinPartition& k, ParticleKind kind) {
    return quantum_prob(n, k, kind, NumericMode::exact).value();
}

}  // namespace

TEST_CASE("haar samples are unitary") {
    Rng rng(11);
    for (int dim = 1; dim <= 8; ++dim) {
        const auto u = sample_haar_unitary(dim, rng);
        CHECK(u.unitarity_deviation() <= kUnitarityTolerance);
    }
    ComplexMatrix bad = ComplexMatrix::Identity(3, 3);
    bad(0, 1) = 0.1;
    CHECK_THROWS(UnitaryMatrix(bad));
    CHECK_THROWS(UnitaryMatrix(ComplexMatrix::Identity(2, 3)));
}

TEST_CASE("haar moments by sampling") {
    const auto [m2, e2] = haar_mean(4, 100000, 2024, [](const UnitaryMatrix& u) { return std::norm(u(0, 0)); });
    CHECK(std::abs(m2 - 0.25) <= 3 * e2);
    const auto [m4, e4] = haar_mean(4, 100000, 2025, [](const UnitaryMatrix& u) {
        const double a = std::norm(u(0, 0));
        return a * a;
    });
    CHECK(std::abs(m4 - 0.1) <= 3 * e4);
    // <|U11|^2 |U21|^2> = 1/(M(M+1)) at M = 3
    const auto [mc, ec] = haar_mean(3, 100000, 2026, [](const UnitaryMatrix& u) {
        return std::norm(u(0, 0)) * std::norm(u(1, 0));
    });
    CHECK(std::abs(mc - 1.0 / 12.0) <= 3 * ec);
}

TEST_CASE("haar phases are uniform") {
    // chi-square over 8 phase sectors of U11, 7 degrees of freedom
    Rng rng(99);
    std::vector<int> sectors(8, 0);
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) {
        const double phase = std::arg(sample_haar_unitary(3, rng)(0, 0));
        auto idx = static_cast<std::size_t>((phase + M_PI) / (2 * M_PI) * 8.0);
        ++sectors[std::min<std::size_t>(idx, 7)];
    }
    double chi2 = 0.0;
    for (int c : sectors) chi2 += (c - draws / 8.0) * (c - draws / 8.0) / (draws / 8.0);
    CHECK(chi2 < 24.3);  // p = 0.001
}

TEST_CASE("seeded sampling is reproducible") {
    const auto a = sample_haar_unitary(5, std::uint64_t{42});
    const auto b = sample_haar_unitary(5, std::uint64_t{42});
    CHECK(a.entries() == b.entries());
    CHECK(stream_seed(1, 0) != stream_seed(1, 1));
    CHECK(stream_seed(1, 0) != stream_seed(2, 0));
}

TEST_CASE("permanent") {
    ComplexMatrix c(1, 1);
    c(0, 0) = cd(0.3, -1.2);
    CHECK(std::abs(permanent(c) - c(0, 0)) < 1e-15);
    CHECK(std::abs(permanent(ComplexMatrix::Ones(3, 3)) - 6.0) < 1e-12);
    CHECK(std::abs(permanent(ComplexMatrix::Ones(6, 6)) - 720.0) < 1e-9);

    Rng rng(5);
    std::normal_distribution<double> g;
    for (int dim = 2; dim <= 7; ++dim) {
        ComplexMatrix a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) = cd(g(rng), g(rng));
        const cd fast = permanent(a);
        const cd slow = permanent_naive(a);
        CHECK(std::abs(fast - slow) <= 1e-10 * std::abs(slow));
        // brute force over permutations here too
        cd direct = 0.0;
        cd det = 0.0;
        for (const auto& p : all_permutations(dim)) {
            cd term = 1.0;
            for (int i = 0; i < dim; ++i) term *= a(i, p[static_cast<std::size_t>(i)]);
            direct += term;
            det += static_cast<double>(permutation_sign(p)) * term;
        }
        CHECK(std::abs(fast - direct) <= 1e-10 * std::abs(direct));
        CHECK(std::abs(determinant(a) - det) <= 1e-10 * std::abs(det));
    }
    CHECK_THROWS(permanent(ComplexMatrix::Ones(2, 3)));
    CHECK_THROWS(permanent(ComplexMatrix::Ones(kMaxPermanentDim + 1, kMaxPermanentDim + 1)));
}

TEST_CASE("two-particle interference") {
    const UnitaryMatrix h(beam_splitter());
    const OccupationVector in({1, 1});
    CHECK(transition_prob(h, in, in, ParticleKind::boson) == doctest::Approx(0.0));
    CHECK(transition_prob(h, in, in, ParticleKind::fermion) == doctest::Approx(1.0));
    CHECK(transition_prob(h, in, in, ParticleKind::distinguishable) == doctest::Approx(0.5));
    CHECK(transition_prob(h, in, OccupationVector({2, 0}), ParticleKind::boson) == doctest::Approx(0.5));
}

TEST_CASE("single particle transitions") {
    const auto u = sample_haar_unitary(4, std::uint64_t{8});
    for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
            const auto in = OccupationVector::from_ports(std::vector<int>{k}, 4);
            const auto out = OccupationVector::from_ports(std::vector<int>{l}, 4);
            for (auto kind : {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion}) {
                CHECK(transition_prob(u, in, out, kind) == doctest::Approx(std::norm(u(k, l))).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("output distributions are normalized") {
    Rng rng(77);
    for (int ports = 1; ports <= 6; ++ports) {
        const auto u = sample_haar_unitary(ports, rng);
        for (int total = 1; total <= std::min(4, ports); ++total) {
            std::vector<int> list(static_cast<std::size_t>(total));
            std::iota(list.begin(), list.end(), 0);
            const auto in = OccupationVector::from_ports(list, ports);
            for (auto kind : {ParticleKind::distinguishable, ParticleKind::boson, ParticleKind::fermion}) {
                double sum = 0.0;
                for_each_occupation(total, ports, kind == ParticleKind::fermion ? 1 : total,
                                    [&](const OccupationVector& out) { sum += transition_prob(u, in, out, kind); });
                CHECK(std::abs(sum - 1.0) <= 1e-8);
            }
        }
    }
}

TEST_CASE("fixed network binned distributions") {
    const auto id = UnitaryMatrix::identity(4);
    const OccupationVector in({3, 0, 0, 0});
    const auto point = binned_prob_fixed_U(id, in, BinPartition({1, 3}), ParticleKind::distinguishable);
    CHECK(point.at(CountVector({3, 0})) == doctest::Approx(1.0));
    const auto one = binned_prob_fixed_U(sample_haar_unitary(4, std::uint64_t{3}), in, BinPartition({4}),
                                         ParticleKind::boson);
    REQUIRE(one.size() == 1);
    CHECK(one.begin()->second == doctest::Approx(1.0));
    CHECK_THROWS(binned_prob_fixed_U(id, in, BinPartition({1, 3}), ParticleKind::fermion));
}

TEST_CASE("haar averaged binned counts") {
    McParams p;
    p.kind = ParticleKind::boson;
    p.bins = BinPartition({1, 1});
    p.total = 2;
    const auto est = mc_average(McMode::haar_average, p, 10000, 1);
    REQUIRE(est.size() == 3);
    for (const auto& [n, e] : est) {
        CHECK(e.samples == 10000);
        CHECK(e.consistent_with(1.0 / 3.0));
    }

    p.kind = ParticleKind::fermion;
    p.bins = BinPartition({2, 2});
    const auto f = mc_average(McMode::haar_average, p, 10000, 2);
    CHECK(f.at(CountVector({1, 1})).consistent_with(2.0 / 3.0));

    p.kind = ParticleKind::distinguishable;
    p.bins = BinPartition({1, 2});
    p.total = 1;
    const auto d = mc_average(McMode::haar_average, p, 10000, 3);
    CHECK(d.at(CountVector({1, 0})).consistent_with(1.0 / 3.0));
    CHECK(d.at(CountVector({0, 1})).consistent_with(2.0 / 3.0));
}

TEST_CASE("input averaged counts for one fixed network") {
    McParams p;
    p.kind = ParticleKind::boson;
    p.bins = BinPartition({3, 3});
    p.total = 2;
    for (const auto& [n, e] : mc_average(McMode::input_average, p, 20000, 4)) {
        CHECK(e.consistent_with(exact_p(n, p.bins, p.kind)));
    }
    // labelled particles give the multinomial for any fixed network
    p.kind = ParticleKind::distinguishable;
    p.bins = BinPartition({2, 2});
    p.total = 3;
    for (const auto& [n, e] : mc_average(McMode::input_average, p, 20000, 5)) {
        CHECK(e.consistent_with(exact_p(n, p.bins, p.kind)));
    }
}

TEST_CASE("scattershot averages") {
    McParams p;
    p.kind = ParticleKind::boson;
    p.bins = BinPartition({2, 3});
    p.total = 2;
    for (const auto& [n, e] : mc_average(McMode::scattershot, p, 20000, 6)) {
        CHECK(e.consistent_with(exact_p(n, p.bins, p.kind)));
    }
    p.total = 6;
    CHECK_THROWS(mc_average(McMode::scattershot, p, 100, 6));
}

TEST_CASE("estimates are independent of thread count") {
    McParams p;
    p.kind = ParticleKind::fermion;
    p.bins = BinPartition({2, 2, 1});
    p.total = 3;
    p.threads = 1;
    const auto a = mc_average(McMode::haar_average, p, 3000, 17);
    p.threads = 4;
    const auto b = mc_average(McMode::haar_average, p, 3000, 17);
    for (const auto& [n, e] : a) {
        CHECK(e.mean == b.at(n).mean);
        CHECK(e.std_error == b.at(n).std_error);
    }
    const auto c = mc_average(McMode::haar_average, p, 3000, 18);
    CHECK(c.begin()->second.mean != a.begin()->second.mean);
}

TEST_CASE("estimator consistency test") {
    MCEstimate e{0.5, 0.01, 100, 0};
    CHECK(e.consistent_with(0.52));
    CHECK_FALSE(e.consistent_with(0.54));
    MCEstimate zero{0.0, 0.0, 100, 0};
    CHECK(zero.consistent_with(0.0));
}

TEST_CASE("mc parameter checks") {
    McParams p;
    p.kind = ParticleKind::fermion;
    p.bins = BinPartition({1, 1});
    p.total = 3;
    CHECK_THROWS(mc_average(McMode::haar_average, p, 100, 1));
    p.kind = ParticleKind::boson;
    CHECK_THROWS(mc_average(McMode::haar_average, p, 1, 1));
    CHECK(parse_mc_mode("scattershot") == McMode::scattershot);
    CHECK_THROWS(parse_mc_mode("bogus"));
}

TEST_CASE("mixed state moments") {
    const OccupationVector a({1, 1, 0});
    const OccupationVector b({2, 0, 0});
    const std::vector<DensityCoefficient> rho = {{a, a, 0.5}, {b, b, 0.5}, {a, b, cd(0.2, 0.1)}, {b, a, cd(0.2, -0.1)}};
    const std::vector<OccupationVector> probes = {a};
    const auto report = mixed_state_check(rho, 3, BinPartition({1, 2}), ParticleKind::boson, 100000, 9, probes);
    CHECK(report.all_consistent());
    bool saw_cross = false;
    bool saw_diag = false;
    for (const auto& m : report.moments) {
        if (m.n == a && m.m == b) {
            saw_cross = true;
            CHECK(m.exact == 0);
            CHECK(m.real.consistent_with(0.0));
            CHECK(m.imag.consistent_with(0.0));
        }
        if (m.n == a && m.m == a && m.s == a) {
            saw_diag = true;
            CHECK(m.exact == make_fraction(1, 6));
        }
    }
    CHECK(saw_cross);
    CHECK(saw_diag);

    const std::vector<DensityCoefficient> bad = {{a, a, 0.7}};
    CHECK_THROWS(mixed_state_check(bad, 3, BinPartition({1, 2}), ParticleKind::boson, 100, 1));
    const std::vector<DensityCoefficient> skew = {{a, a, 0.5}, {b, b, 0.5}, {a, b, 0.2}};
    CHECK_THROWS(mixed_state_check(skew, 3, BinPartition({1, 2}), ParticleKind::boson, 100, 1));
}

TEST_CASE("diagonal mixed state matches haar averages") {
    const OccupationVector a({1, 1, 0});
    const std::vector<DensityCoefficient> rho = {{a, a, 1.0}};
    const auto report = mixed_state_check(rho, 3, BinPartition({1, 2}), ParticleKind::boson, 20000, 3);
    McParams p;
    p.kind = ParticleKind::boson;
    p.bins = BinPartition({1, 2});
    p.total = 2;
    p.input = a;
    const auto direct = mc_average(McMode::haar_average, p, 20000, 3);
    for (const auto& b : report.bins) {
        CHECK(b.consistent);
        CHECK(b.estimate.mean == doctest::Approx(direct.at(b.counts).mean).epsilon(1e-12));
    }
}
