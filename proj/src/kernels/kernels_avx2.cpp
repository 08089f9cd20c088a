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

// Compiled with -mavx2 -mfma. Nothing here may run before dispatch.cpp has
// checked the CPU.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "qcount/kernels.hpp"

namespace qcount::kernels {

namespace {

inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void gather_linear_sum(std::span<const double> table, std::span<const GatherTerm> terms, double base,
                       double linear, std::int64_t first, std::span<double> out) {
    const std::size_t count = out.size();
    const double* tab = table.data();
    const __m256d vbase = _mm256_set1_pd(base);
    const __m256d vlinear = _mm256_set1_pd(linear);
    const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) {
        const std::int64_t n0 = first + static_cast<std::int64_t>(j);
        const __m256d vn = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(n0)), lane);
        __m256d acc = _mm256_fmadd_pd(vlinear, vn, vbase);
        for (const auto& t : terms) {
            const std::int64_t i0 = t.offset + t.slope * n0;
            const __m256i idx = _mm256_set_epi64x(i0 + 3 * t.slope, i0 + 2 * t.slope, i0 + t.slope, i0);
            const __m256d g = _mm256_i64gather_pd(tab, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_set1_pd(t.coeff), g, acc);
        }
        _mm256_storeu_pd(out.data() + j, acc);
    }
    for (; j < count; ++j) {
        const std::int64_t n = first + static_cast<std::int64_t>(j);
        double acc = std::fma(linear, static_cast<double>(n), base);
        for (const auto& t : terms) {
            acc = std::fma(t.coeff, tab[t.offset + t.slope * n], acc);
        }
        out[j] = acc;
    }
}

void quadratic_batch(double base, double curvature, double center, std::int64_t first,
                     std::span<double> out) {
    const std::size_t count = out.size();
    const __m256d vbase = _mm256_set1_pd(base);
    const __m256d vcurv = _mm256_set1_pd(curvature);
    const __m256d vcenter = _mm256_set1_pd(center);
    const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) {
        const double n0 = static_cast<double>(first + static_cast<std::int64_t>(j));
        const __m256d d = _mm256_sub_pd(_mm256_add_pd(_mm256_set1_pd(n0), lane), vcenter);
        _mm256_storeu_pd(out.data() + j, _mm256_fmadd_pd(vcurv, _mm256_mul_pd(d, d), vbase));
    }
    for (; j < count; ++j) {
        const double d = static_cast<double>(first + static_cast<std::int64_t>(j)) - center;
        out[j] = std::fma(curvature, d * d, base);
    }
}

void ryser_update(std::span<double> rows_re, std::span<double> rows_im, std::span<const double> col_re,
                  std::span<const double> col_im, double sign) {
    const std::size_t n = rows_re.size();
    const __m256d vsign = _mm256_set1_pd(sign);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_loadu_pd(rows_re.data() + i);
        const __m256d m = _mm256_loadu_pd(rows_im.data() + i);
        _mm256_storeu_pd(rows_re.data() + i, _mm256_fmadd_pd(vsign, _mm256_loadu_pd(col_re.data() + i), r));
        _mm256_storeu_pd(rows_im.data() + i, _mm256_fmadd_pd(vsign, _mm256_loadu_pd(col_im.data() + i), m));
    }
    for (; i < n; ++i) {
        rows_re[i] = std::fma(sign, col_re[i], rows_re[i]);
        rows_im[i] = std::fma(sign, col_im[i], rows_im[i]);
    }
}

std::complex<double> complex_product(std::span<const double> re, std::span<const double> im) {
    const std::size_t n = re.size();
    std::size_t i = 0;
    double pr = 1.0;
    double pi = 0.0;
    if (n >= 8) {
        // Four interleaved partial products, lane k holding entries k, k+4, ...
        __m256d vr = _mm256_loadu_pd(re.data());
        __m256d vi = _mm256_loadu_pd(im.data());
        for (i = 4; i + 4 <= n; i += 4) {
            const __m256d xr = _mm256_loadu_pd(re.data() + i);
            const __m256d xi = _mm256_loadu_pd(im.data() + i);
            const __m256d nr = _mm256_sub_pd(_mm256_mul_pd(vr, xr), _mm256_mul_pd(vi, xi));
            const __m256d ni = _mm256_add_pd(_mm256_mul_pd(vr, xi), _mm256_mul_pd(vi, xr));
            vr = nr;
            vi = ni;
        }
        alignas(32) double lr[4];
        alignas(32) double li[4];
        _mm256_store_pd(lr, vr);
        _mm256_store_pd(li, vi);
        pr = lr[0];
        pi = li[0];
        for (int k = 1; k < 4; ++k) {
            const double nr = pr * lr[k] - pi * li[k];
            const double ni = pr * li[k] + pi * lr[k];
            pr = nr;
            pi = ni;
        }
    }
    for (; i < n; ++i) {
        const double nr = pr * re[i] - pi * im[i];
        const double ni = pr * im[i] + pi * re[i];
        pr = nr;
        pi = ni;
    }
    return {pr, pi};
}

double unitarity_deviation(std::span<const std::complex<double>> a, std::size_t dim) {
    const double* base = reinterpret_cast<const double*>(a.data());
    const __m256d alternate = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double* ci = base + 2 * i * dim;
        for (std::size_t j = i; j < dim; ++j) {
            const double* cj = base + 2 * j * dim;
            __m256d acc_re = _mm256_setzero_pd();
            __m256d acc_im = _mm256_setzero_pd();
            std::size_t k = 0;
            for (; k + 2 <= dim; k += 2) {
                const __m256d x = _mm256_loadu_pd(ci + 2 * k);
                const __m256d y = _mm256_loadu_pd(cj + 2 * k);
                // [xr yr, xi yi] sums to Re(conj(x) y); [xr yi, xi yr] with
                // alternating sign sums to Im(conj(x) y).
                acc_re = _mm256_fmadd_pd(x, y, acc_re);
                const __m256d y_swapped = _mm256_permute_pd(y, 0b0101);
                acc_im = _mm256_fmadd_pd(_mm256_mul_pd(x, y_swapped), alternate, acc_im);
            }
            double re = horizontal_sum(acc_re);
            double im = horizontal_sum(acc_im);
            for (; k < dim; ++k) {
                const double xr = ci[2 * k];
                const double xi = ci[2 * k + 1];
                const double yr = cj[2 * k];
                const double yi = cj[2 * k + 1];
                re += xr * yr + xi * yi;
                im += xr * yi - xi * yr;
            }
            if (i == j) re -= 1.0;
            worst = std::max(worst, std::hypot(re, im));
        }
    }
    return worst;
}

}  // namespace

extern const KernelSet kAvx2KernelSet;
const KernelSet kAvx2KernelSet{Isa::avx2,   &gather_linear_sum, &quadratic_batch,
                               &ryser_update, &complex_product,   &unitarity_deviation};

}  // namespace qcount::kernels
