// SPDX-License-Identifier: Apache-2.0
//
// AVX2+FMA implementations of the complex vector kernels.  A __m256d lane
// holds two interleaved complex doubles [re0 im0 re1 im1].  This translation
// unit is the only one compiled with -mavx2 -mfma; callers reach it through
// the runtime dispatch table.

#include "irsbf/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace irsbf::kernels::detail {

namespace {

// [re0 im0 re1 im1] -> [im0 re0 im1 re1]
inline __m256d swap_pairs(__m256d x) { return _mm256_permute_pd(x, 0b0101); }

inline double hsum(__m256d x) {
    __m128d lo = _mm256_castpd256_pd128(x);
    __m128d hi = _mm256_extractf128_pd(x, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Sums even lanes minus odd lanes: x0 - x1 + x2 - x3.
inline double hsum_evens_minus_odds(__m256d x) {
    __m128d lo = _mm256_castpd256_pd128(x);
    __m128d hi = _mm256_extractf128_pd(x, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_sub_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

cxd cdot_avx2(const cxd* a, const cxd* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);
        acc_im = _mm256_fmadd_pd(va, swap_pairs(vb), acc_im);
    }
    double re = hsum(acc_re);                  // sum(ar*br + ai*bi)
    double im = hsum_evens_minus_odds(acc_im); // sum(ar*bi - ai*br)
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

double norm2sq_avx2(const cxd* x, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(px + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double out = hsum(acc);
    for (; i < n; ++i)
        out += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return out;
}

void axpy_avx2(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* py = reinterpret_cast<double*>(y);
    const __m256d vp = _mm256_set1_pd(alpha.real());
    const __m256d vq = _mm256_set1_pd(alpha.imag());
    // Negates even lanes, so swap_pairs followed by this gives [-xi xr ...].
    const __m256d negeven = _mm256_setr_pd(-0.0, 0.0, -0.0, 0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(px + 2 * i);
        const __m256d vy = _mm256_loadu_pd(py + 2 * i);
        const __m256d rot = _mm256_xor_pd(swap_pairs(vx), negeven);
        const __m256d out =
            _mm256_fmadd_pd(vp, vx, _mm256_fmadd_pd(vq, rot, vy));
        _mm256_storeu_pd(py + 2 * i, out);
    }
    const double p = alpha.real(), q = alpha.imag();
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cxd(p * xr - q * xi, p * xi + q * xr);
    }
}

void project_unit_disk_avx2(cxd* x, std::size_t n) {
    double* px = reinterpret_cast<double*>(x);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(px + 2 * i);
        const __m256d sq = _mm256_mul_pd(v, v);
        // m2 per complex element, broadcast to both lanes of its pair.
        const __m256d m2 = _mm256_hadd_pd(sq, sq);  // [m0 m0 m1 m1]
        const __m256d mask = _mm256_cmp_pd(m2, one, _CMP_GT_OQ);
        const __m256d scaled = _mm256_div_pd(v, _mm256_sqrt_pd(m2));
        _mm256_storeu_pd(px + 2 * i, _mm256_blendv_pd(v, scaled, mask));
    }
    for (; i < n; ++i) {
        const double m2 =
            x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
        if (m2 > 1.0) x[i] /= std::sqrt(m2);
    }
}

void phase_only_avx2(cxd* x, std::size_t n) {
    double* px = reinterpret_cast<double*>(x);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d onezero = _mm256_setr_pd(1.0, 0.0, 1.0, 0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(px + 2 * i);
        const __m256d sq = _mm256_mul_pd(v, v);
        const __m256d m2 = _mm256_hadd_pd(sq, sq);
        const __m256d mask = _mm256_cmp_pd(m2, zero, _CMP_GT_OQ);
        const __m256d scaled = _mm256_div_pd(v, _mm256_sqrt_pd(m2));
        _mm256_storeu_pd(px + 2 * i, _mm256_blendv_pd(onezero, scaled, mask));
    }
    for (; i < n; ++i) {
        const double m2 =
            x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
        x[i] = (m2 > 0.0) ? x[i] / std::sqrt(m2) : cxd(1.0, 0.0);
    }
}

double quad_eval_avx2(const cxd* c, const cxd* u, double k, const cxd* v,
                      std::size_t n) {
    const double* pc = reinterpret_cast<const double*>(c);
    const double* pu = reinterpret_cast<const double*>(u);
    const double* pv = reinterpret_cast<const double*>(v);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    __m256d acc_vu = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vc = _mm256_loadu_pd(pc + 2 * i);
        const __m256d vu = _mm256_loadu_pd(pu + 2 * i);
        const __m256d vv = _mm256_loadu_pd(pv + 2 * i);
        acc_re = _mm256_fmadd_pd(vc, vv, acc_re);
        acc_im = _mm256_fmadd_pd(vc, swap_pairs(vv), acc_im);
        acc_vu = _mm256_fmadd_pd(vv, vu, acc_vu);
    }
    double cv_re = hsum(acc_re);
    double cv_im = hsum_evens_minus_odds(acc_im);
    double vu_re = hsum(acc_vu);
    for (; i < n; ++i) {
        const double cr = c[i].real(), ci = c[i].imag();
        const double vr = v[i].real(), vi = v[i].imag();
        cv_re += cr * vr + ci * vi;
        cv_im += cr * vi - ci * vr;
        vu_re += vr * u[i].real() + vi * u[i].imag();
    }
    return cv_re * cv_re + cv_im * cv_im + 2.0 * vu_re + k;
}

}  // namespace

const Vtable& avx2_vtable() {
    static const Vtable table = {
        cdot_avx2,    norm2sq_avx2,    axpy_avx2,
        project_unit_disk_avx2, phase_only_avx2, quad_eval_avx2,
    };
    return table;
}

}  // namespace irsbf::kernels::detail

#else  // no AVX2/FMA at compile time: dispatcher falls back to scalar.

namespace irsbf::kernels::detail {
const Vtable& avx2_vtable() { return scalar_vtable(); }
}  // namespace irsbf::kernels::detail

#endif
