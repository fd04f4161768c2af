#include <atomic>
#include <cstdlib>
#include <string>

#include "saddlescope/kernels.hpp"

namespace saddlescope {
namespace {

bool cpu_supports_avx2() {
#if defined(SADDLESCOPE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const MapKernels* pick(std::string_view name) {
#if defined(SADDLESCOPE_HAVE_AVX2)
    if (name == "avx2") {
        return cpu_supports_avx2() ? &avx2_kernels() : nullptr;
    }
#endif
    if (name == "scalar") return &scalar_kernels();
    if (name == "auto") {
#if defined(SADDLESCOPE_HAVE_AVX2)
        if (cpu_supports_avx2()) return &avx2_kernels();
#endif
        return &scalar_kernels();
    }
    return nullptr;
}

std::atomic<const MapKernels*> g_active{nullptr};

const MapKernels* initial_selection() {
    const char* env = std::getenv("SADDLESCOPE_KERNEL");
    if (env != nullptr) {
        if (const MapKernels* k = pick(env)) return k;
    }
    return pick("auto");
}

}  // namespace

const MapKernels& active_kernels() {
    const MapKernels* k = g_active.load(std::memory_order_acquire);
    if (k == nullptr) {
        k = initial_selection();
        g_active.store(k, std::memory_order_release);
    }
    return *k;
}

bool select_kernels(std::string_view name) {
    const MapKernels* k = pick(name);
    if (k == nullptr) return false;
    g_active.store(k, std::memory_order_release);
    return true;
}

}  // namespace saddlescope
