// SPDX-License-Identifier: Apache-2.0
//
// Complex vector kernels used by the hot loops (link-power evaluation,
// randomization scoring, subgradient accumulation).
//
// Each kernel has a scalar reference implementation and an AVX2+FMA variant.
// The active variant is chosen once at startup from CPU capabilities and can
// be overridden with set_backend() or the IRSBF_KERNEL_BACKEND environment
// variable ("scalar" or "avx2").  All variants are equivalence-tested against
// the scalar reference; results may differ by floating-point reassociation
// only.

#pragma once

#include <complex>
#include <cstddef>

namespace irsbf::kernels {

using cxd = std::complex<double>;

enum class Backend { Scalar, Avx2 };

// Returns the backend all kernels currently dispatch to.
Backend active_backend();

// Selects a backend.  Returns false (and leaves the selection unchanged) if
// the requested backend is not supported by this CPU.
bool set_backend(Backend backend);

const char* backend_name(Backend backend);

// sum_i conj(a[i]) * b[i]
cxd cdot(const cxd* a, const cxd* b, std::size_t n);

// sum_i |x[i]|^2
double norm2sq(const cxd* x, std::size_t n);

// y[i] += alpha * x[i]
void axpy(cxd alpha, const cxd* x, cxd* y, std::size_t n);

// Entrywise projection onto the closed unit disk: x[i] /= max(1, |x[i]|).
void project_unit_disk(cxd* x, std::size_t n);

// Entrywise phase extraction x[i] -> x[i]/|x[i]|.  Zero maps to 1.
void phase_only(cxd* x, std::size_t n);

// |dot(c,v)|^2 + 2*Re(dot(v,u)) + k, the evaluation of a homogenized
// rank-one quadratic form at v.  This is the single hottest kernel.
double quad_eval(const cxd* c, const cxd* u, double k, const cxd* v,
                 std::size_t n);

namespace detail {
// Raw entry points, used by the dispatcher and by the equivalence tests.
struct Vtable {
    cxd (*cdot)(const cxd*, const cxd*, std::size_t);
    double (*norm2sq)(const cxd*, std::size_t);
    void (*axpy)(cxd, const cxd*, cxd*, std::size_t);
    void (*project_unit_disk)(cxd*, std::size_t);
    void (*phase_only)(cxd*, std::size_t);
    double (*quad_eval)(const cxd*, const cxd*, double, const cxd*,
                        std::size_t);
};
const Vtable& scalar_vtable();
const Vtable& avx2_vtable();   // valid only if avx2_available()
bool avx2_available();
}  // namespace detail

}  // namespace irsbf::kernels
