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

// Data-parallel inner loops. Every kernel has a scalar reference version and
// an optional AVX2/FMA version; the active set is chosen once at runtime from
// the CPU features (override with QCOUNT_FORCE_SCALAR=1).
//
// gather_linear_sum, quadratic_batch and ryser_update use the same fused
// multiply-add sequence in both variants and agree bit for bit.
// complex_product and unitarity_deviation reassociate sums and agree to
// rounding.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>

namespace qcount::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// One term coeff * table[offset + slope * n] of a gathered linear sum.
struct GatherTerm {
    double coeff;
    std::int64_t offset;
    std::int64_t slope;
};

struct KernelSet {
    Isa isa;

    /// out[j] = base + linear * n + sum_t coeff_t * table[offset_t + slope_t * n],
    /// n = first + j. Terms are accumulated in order with fused multiply-adds.
    /// Caller guarantees every index is inside the table.
    void (*gather_linear_sum)(std::span<const double> table, std::span<const GatherTerm> terms,
                              double base, double linear, std::int64_t first, std::span<double> out);

    /// out[j] = base + curvature * (first + j - center)^2.
    void (*quadratic_batch)(double base, double curvature, double center, std::int64_t first,
                            std::span<double> out);

    /// rows += sign * column on split real/imaginary arrays.
    void (*ryser_update)(std::span<double> rows_re, std::span<double> rows_im,
                         std::span<const double> col_re, std::span<const double> col_im, double sign);

    /// Product of the complex numbers (re[i], im[i]).
    std::complex<double> (*complex_product)(std::span<const double> re, std::span<const double> im);

    /// max_{ij} |(A^dagger A - I)_{ij}| for a column-major dim x dim matrix.
    double (*unitarity_deviation)(std::span<const std::complex<double>> matrix, std::size_t dim);
};

const KernelSet& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelSet* avx2_kernels();

/// The set selected for this process.
const KernelSet& active();

}  // namespace qcount::kernels
