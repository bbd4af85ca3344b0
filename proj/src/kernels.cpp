#include "ccq/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "ccq/errors.hpp"

namespace ccq::kernels {

namespace {

const Table* resolve(const std::string& name) {
    if (name == "scalar") return &scalar_table();
    if (name == "avx2") {
        const Table* t = avx2_table();
        if (t == nullptr || !avx2_supported())
            throw ConfigInvalid("CCQ_KERNELS=avx2 requested but AVX2 is unavailable");
        return t;
    }
    if (name == "auto") {
        const Table* t = avx2_table();
        return (t != nullptr && avx2_supported()) ? t : &scalar_table();
    }
    throw ConfigInvalid("unknown kernel lane '" + name + "' (want auto|scalar|avx2)");
}

std::atomic<const Table*> g_active{nullptr};

} // namespace

const Table& active() {
    const Table* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        const char* env = std::getenv("CCQ_KERNELS");
        t = resolve(env != nullptr && *env != '\0' ? env : "auto");
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void force_lane(const std::string& name) {
    g_active.store(resolve(name), std::memory_order_release);
}

} // namespace ccq::kernels
