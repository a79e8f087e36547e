#include <cstdlib>
#include <string>

#include "kreinlab/batch.hpp"

#ifndef KREINLAB_HAVE_AVX2_TU
#define KREINLAB_HAVE_AVX2_TU 0
#endif

namespace kreinlab::batch {

bool avx2_available() {
#if KREINLAB_HAVE_AVX2_TU && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

BatchFn backend_by_name(const std::string& name) {
    if (name == "scalar") return &run_batch_scalar;
#if KREINLAB_HAVE_AVX2_TU
    if (name == "avx2" && avx2_available()) return &run_batch_avx2;
#endif
    return nullptr;
}

namespace {

std::string picked_name() {
    if (const char* env = std::getenv("KREINLAB_BACKEND")) {
        if (backend_by_name(env) != nullptr) return env;
        return "scalar";
    }
    return avx2_available() ? "avx2" : "scalar";
}

}  // namespace

BatchFn select_backend() { return backend_by_name(picked_name()); }

std::string backend_name() { return picked_name(); }

}  // namespace kreinlab::batch
