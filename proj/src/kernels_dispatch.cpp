#include "slicelab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace slicelab::kernels {
namespace {

const Ops* pick_default() {
    if (const char* env = std::getenv("SLICELAB_KERNEL")) {
        std::string v(env);
        if (v == "scalar") return &scalar();
        if (v == "avx2" && avx2_available()) return &avx2();
    }
    return avx2_available() ? &avx2() : &scalar();
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

#if !(defined(__x86_64__) || defined(_M_X64))
bool avx2_available() { return false; }
const Ops& avx2() { return scalar(); }
#endif

const Ops& active() {
    const Ops* p = g_active.load(std::memory_order_acquire);
    if (!p) {
        p = pick_default();
        g_active.store(p, std::memory_order_release);
    }
    return *p;
}

bool select(const std::string& name) {
    if (name == "scalar" || name == "auto") {
        g_active.store(name == "scalar" ? &scalar() : pick_default(),
                       std::memory_order_release);
        return true;
    }
    if (name == "avx2") {
        if (!avx2_available()) return false;
        g_active.store(&avx2(), std::memory_order_release);
        return true;
    }
    return false;
}

}  // namespace slicelab::kernels
