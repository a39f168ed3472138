// SPDX-License-Identifier: Apache-2.0
//
// Correctness of the scalar reference kernels against plain re-implementations
// written here with long-double accumulation, and equivalence of the AVX2
// variants against the scalar reference (tolerances allow floating-point
// reassociation only).

#include "irsbf/kernels.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "irsbf/rng.hpp"

namespace {

using irsbf::kernels::cxd;

std::vector<cxd> random_vec(std::size_t n, std::uint64_t key) {
    irsbf::rng::Stream st(7, key);
    std::vector<cxd> v(n);
    for (auto& x : v) x = st.next_cnormal();
    return v;
}

// Plain reference in long double, deliberately independent of the library.
cxd ref_cdot(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    long double re = 0, im = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        re += (long double)a[i].real() * b[i].real() +
              (long double)a[i].imag() * b[i].imag();
        im += (long double)a[i].real() * b[i].imag() -
              (long double)a[i].imag() * b[i].real();
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

double ref_norm2sq(const std::vector<cxd>& a) {
    long double acc = 0;
    for (auto& x : a) acc += std::norm((std::complex<long double>)x);
    return static_cast<double>(acc);
}

constexpr double kTol = 1e-12;

bool close(cxd a, cxd b, double scale) {
    return std::abs(a - b) <= kTol * (1.0 + scale);
}

// Lengths that cover empty input, sub-vector-width tails, and full lanes.
const std::size_t kLens[] = {0, 1, 2, 3, 4, 5, 7, 8, 16, 33, 64, 67};

}  // namespace

TEST_CASE("scalar kernels match independent references") {
    using namespace irsbf::kernels;
    REQUIRE(set_backend(Backend::Scalar));
    for (std::size_t n : kLens) {
        auto a = random_vec(n, 100 + n), b = random_vec(n, 200 + n);
        const double scale = std::sqrt(ref_norm2sq(a) * ref_norm2sq(b));
        CHECK(close(cdot(a.data(), b.data(), n), ref_cdot(a, b), scale));
        CHECK(norm2sq(a.data(), n) ==
              doctest::Approx(ref_norm2sq(a)).epsilon(kTol));

        // axpy
        auto y = b;
        const cxd alpha{0.3, -1.7};
        axpy(alpha, a.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(close(y[i], b[i] + alpha * a[i], std::abs(b[i])));

        // quad_eval == |c'v|^2 + 2 Re(v'u) + k elementwise reference
        auto c = random_vec(n, 300 + n), u = random_vec(n, 400 + n),
             v = random_vec(n, 500 + n);
        cxd cv = 0, vu = 0;
        for (std::size_t i = 0; i < n; ++i) {
            cv += std::conj(c[i]) * v[i];
            vu += std::conj(v[i]) * u[i];
        }
        const double want = std::norm(cv) + 2.0 * vu.real() + 0.25;
        CHECK(quad_eval(c.data(), u.data(), 0.25, v.data(), n) ==
              doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("projection and phase kernels") {
    using namespace irsbf::kernels;
    REQUIRE(set_backend(Backend::Scalar));
    std::vector<cxd> x = {{0.3, 0.2}, {3.0, -4.0}, {0.0, 0.0}, {-1.0, 0.0},
                          {0.0, 2.0}, {1e-12, 0.0}};
    auto p = x;
    project_unit_disk(p.data(), p.size());
    CHECK(p[0] == x[0]);  // already inside the disk
    CHECK(std::abs(p[1] - cxd{0.6, -0.8}) < 1e-15);
    CHECK(p[2] == cxd{0.0, 0.0});  // origin is a fixed point
    CHECK(std::abs(std::abs(p[1]) - 1.0) < 1e-15);

    auto q = x;
    phase_only(q.data(), q.size());
    CHECK(std::abs(q[2] - cxd{1.0, 0.0}) < 1e-15);  // zero maps to 1
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(std::abs(std::abs(q[i]) - 1.0) < 1e-12);
        if (std::abs(x[i]) > 1e-300 && i != 2)
            CHECK(std::abs(std::arg(q[i]) - std::arg(x[i])) < 1e-12);
    }
}

TEST_CASE("avx2 variants are equivalent to the scalar reference") {
    using namespace irsbf::kernels;
    if (!detail::avx2_available()) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    const auto& sc = detail::scalar_vtable();
    const auto& vx = detail::avx2_vtable();
    for (std::size_t n : kLens) {
        auto a = random_vec(n, 1000 + n), b = random_vec(n, 2000 + n),
             u = random_vec(n, 3000 + n);
        CHECK(close(vx.cdot(a.data(), b.data(), n),
                    sc.cdot(a.data(), b.data(), n), 2.0 * n));
        CHECK(vx.norm2sq(a.data(), n) ==
              doctest::Approx(sc.norm2sq(a.data(), n)).epsilon(kTol));
        CHECK(vx.quad_eval(a.data(), u.data(), 1.5, b.data(), n) ==
              doctest::Approx(sc.quad_eval(a.data(), u.data(), 1.5,
                                           b.data(), n))
                  .epsilon(1e-11));

        auto y1 = b, y2 = b;
        sc.axpy({-0.4, 2.2}, a.data(), y1.data(), n);
        vx.axpy({-0.4, 2.2}, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(close(y1[i], y2[i], std::abs(y1[i])));

        auto p1 = a, p2 = a;
        sc.project_unit_disk(p1.data(), n);
        vx.project_unit_disk(p2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(close(p1[i], p2[i], 1.0));

        auto f1 = a, f2 = a;
        sc.phase_only(f1.data(), n);
        vx.phase_only(f2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(close(f1[i], f2[i], 1.0));
    }
}

TEST_CASE("backend selection round-trips") {
    using namespace irsbf::kernels;
    const Backend initial = active_backend();
    CHECK(set_backend(Backend::Scalar));
    CHECK(active_backend() == Backend::Scalar);
    if (detail::avx2_available()) {
        CHECK(set_backend(Backend::Avx2));
        CHECK(active_backend() == Backend::Avx2);
    } else {
        CHECK_FALSE(set_backend(Backend::Avx2));
        CHECK(active_backend() == Backend::Scalar);
    }
    set_backend(initial);
    CHECK(backend_name(Backend::Scalar) == std::string("scalar"));
    CHECK(backend_name(Backend::Avx2) == std::string("avx2"));
}
