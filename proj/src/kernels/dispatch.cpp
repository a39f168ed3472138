// SPDX-License-Identifier: Apache-2.0
//
// Runtime backend selection for the complex vector kernels.

#include "irsbf/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace irsbf::kernels {

namespace detail {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend initial_backend() {
    if (const char* env = std::getenv("IRSBF_KERNEL_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available())
            return Backend::Avx2;
    }
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend> g_backend{initial_backend()};

const Vtable& table_for(Backend b) {
    return b == Backend::Avx2 ? avx2_vtable() : scalar_vtable();
}

}  // namespace
}  // namespace detail

Backend active_backend() { return detail::g_backend.load(); }

bool set_backend(Backend backend) {
    if (backend == Backend::Avx2 && !detail::avx2_available()) return false;
    detail::g_backend.store(backend);
    return true;
}

const char* backend_name(Backend backend) {
    return backend == Backend::Avx2 ? "avx2" : "scalar";
}

cxd cdot(const cxd* a, const cxd* b, std::size_t n) {
    return detail::table_for(active_backend()).cdot(a, b, n);
}

double norm2sq(const cxd* x, std::size_t n) {
    return detail::table_for(active_backend()).norm2sq(x, n);
}

void axpy(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    detail::table_for(active_backend()).axpy(alpha, x, y, n);
}

void project_unit_disk(cxd* x, std::size_t n) {
    detail::table_for(active_backend()).project_unit_disk(x, n);
}

void phase_only(cxd* x, std::size_t n) {
    detail::table_for(active_backend()).phase_only(x, n);
}

double quad_eval(const cxd* c, const cxd* u, double k, const cxd* v,
                 std::size_t n) {
    return detail::table_for(active_backend()).quad_eval(c, u, k, v, n);
}

}  // namespace irsbf::kernels
