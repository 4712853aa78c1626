#include "pplda/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace pplda::simd {

#if defined(PPLDA_HAVE_AVX2_TU)
const Kernels* avx2_kernels_impl(); // defined in kernels_avx2.cpp
#endif

const Kernels* avx2_kernels() {
#if defined(PPLDA_HAVE_AVX2_TU)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_kernels_impl();
#endif
    return nullptr;
}

const Kernels& active() {
    static const Kernels* selected = [] {
        const char* env = std::getenv("PPLDA_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        const Kernels* avx2 = avx2_kernels();
        return avx2 ? avx2 : &scalar_kernels();
    }();
    return *selected;
}

} // namespace pplda::simd
