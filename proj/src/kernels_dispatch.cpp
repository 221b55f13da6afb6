#include "skmm/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace skmm::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SKMM_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend pick_default() {
    if (const char* env = std::getenv("SKMM_KERNELS")) {
        std::string want(env);
        if (want == "scalar") return Backend::scalar;
        if (want == "avx2" && backend_supported(Backend::avx2)) return Backend::avx2;
    }
    return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

Backend& current() {
    static Backend b = pick_default();
    return b;
}

}  // namespace

#if !defined(SKMM_HAVE_AVX2)
const Kernels& avx2_kernels() {
    throw std::logic_error("avx2 backend not compiled in");
}
#endif

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

Backend active_backend() { return current(); }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::invalid_argument("kernel backend not available: " + backend_name(b));
    current() = b;
}

const Kernels& active() {
#if defined(SKMM_HAVE_AVX2)
    if (current() == Backend::avx2) return avx2_kernels();
#endif
    return scalar_kernels();
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

}  // namespace skmm::kernels
