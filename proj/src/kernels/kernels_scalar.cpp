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

#include <algorithm>
#include <cmath>

#include "qcount/kernels.hpp"

namespace qcount::kernels {

namespace {

void gather_linear_sum(std::span<const double> table, std::span<const GatherTerm> terms, double base,
                       double linear, std::int64_t first, std::span<double> out) {
    for (std::size_t j = 0; j < out.size(); ++j) {
        const std::int64_t n = first + static_cast<std::int64_t>(j);
        double acc = std::fma(linear, static_cast<double>(n), base);
        for (const auto& t : terms) {
            acc = std::fma(t.coeff, table[static_cast<std::size_t>(t.offset + t.slope * n)], acc);
        }
        out[j] = acc;
    }
}

void quadratic_batch(double base, double curvature, double center, std::int64_t first,
                     std::span<double> out) {
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double d = static_cast<double>(first + static_cast<std::int64_t>(j)) - center;
        out[j] = std::fma(curvature, d * d, base);
    }
}

void ryser_update(std::span<double> rows_re, std::span<double> rows_im, std::span<const double> col_re,
                  std::span<const double> col_im, double sign) {
    for (std::size_t i = 0; i < rows_re.size(); ++i) {
        rows_re[i] = std::fma(sign, col_re[i], rows_re[i]);
        rows_im[i] = std::fma(sign, col_im[i], rows_im[i]);
    }
}

std::complex<double> complex_product(std::span<const double> re, std::span<const double> im) {
    double pr = 1.0;
    double pi = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) {
        const double nr = pr * re[i] - pi * im[i];
        const double ni = pr * im[i] + pi * re[i];
        pr = nr;
        pi = ni;
    }
    return {pr, pi};
}

double unitarity_deviation(std::span<const std::complex<double>> a, std::size_t dim) {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const auto* ci = a.data() + i * dim;
        for (std::size_t j = i; j < dim; ++j) {
            const auto* cj = a.data() + j * dim;
            double re = 0.0;
            double im = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                re += ci[k].real() * cj[k].real() + ci[k].imag() * cj[k].imag();
                im += ci[k].real() * cj[k].imag() - ci[k].imag() * cj[k].real();
            }
            if (i == j) re -= 1.0;
            worst = std::max(worst, std::hypot(re, im));
        }
    }
    return worst;
}

}  // namespace

const KernelSet& scalar_kernels() {
    static const KernelSet set{Isa::scalar,   &gather_linear_sum, &quadratic_batch,
                               &ryser_update, &complex_product,   &unitarity_deviation};
    return set;
}

}  // namespace qcount::kernels
