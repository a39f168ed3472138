// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference implementations of the complex vector kernels.  These are
// the ground truth the SIMD variants are tested against.

#include "irsbf/kernels.hpp"

#include <cmath>

namespace irsbf::kernels::detail {

namespace {

cxd cdot_scalar(const cxd* a, const cxd* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

double norm2sq_scalar(const cxd* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

void axpy_scalar(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    const double p = alpha.real(), q = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cxd(p * xr - q * xi, p * xi + q * xr);
    }
}

void project_unit_disk_scalar(cxd* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double m2 =
            x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
        if (m2 > 1.0) x[i] /= std::sqrt(m2);
    }
}

void phase_only_scalar(cxd* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double m2 =
            x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
        x[i] = (m2 > 0.0) ? x[i] / std::sqrt(m2) : cxd(1.0, 0.0);
    }
}

double quad_eval_scalar(const cxd* c, const cxd* u, double k, const cxd* v,
                        std::size_t n) {
    double cv_re = 0.0, cv_im = 0.0;  // dot(c, v)
    double vu_re = 0.0;               // Re dot(v, u)
    for (std::size_t i = 0; i < n; ++i) {
        const double cr = c[i].real(), ci = c[i].imag();
        const double vr = v[i].real(), vi = v[i].imag();
        cv_re += cr * vr + ci * vi;
        cv_im += cr * vi - ci * vr;
        vu_re += vr * u[i].real() + vi * u[i].imag();
    }
    return cv_re * cv_re + cv_im * cv_im + 2.0 * vu_re + k;
}

}  // namespace

const Vtable& scalar_vtable() {
    static const Vtable table = {
        cdot_scalar,    norm2sq_scalar,    axpy_scalar,
        project_unit_disk_scalar, phase_only_scalar, quad_eval_scalar,
    };
    return table;
}

}  // namespace irsbf::kernels::detail
