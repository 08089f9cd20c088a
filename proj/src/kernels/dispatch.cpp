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

#include <cstdlib>
#include <string>

#include "qcount/kernels.hpp"

namespace qcount::kernels {

#if defined(QCOUNT_HAVE_AVX2)
extern const KernelSet kAvx2KernelSet;
#endif

namespace {

bool cpu_has_avx2() {
#if defined(QCOUNT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool scalar_forced() {
    const char* env = std::getenv("QCOUNT_FORCE_SCALAR");
    return env != nullptr && std::string(env) != "" && std::string(env) != "0";
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelSet* avx2_kernels() {
#if defined(QCOUNT_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &kAvx2KernelSet : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet& active() {
    static const KernelSet* selected = [] {
        const KernelSet* wide = avx2_kernels();
        return (wide != nullptr && !scalar_forced()) ? wide : &scalar_kernels();
    }();
    return *selected;
}

}  // namespace qcount::kernels
