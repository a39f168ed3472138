// SPDX-License-Identifier: Apache-2.0
//
// SINR bookkeeping tests.  The reference is a term-enumeration oracle that
// recomputes every link power from raw channel segments with plain Eigen
// expressions, independent of the cached quadratic forms.

#include "irsbf/metrics.hpp"

#include <complex>
#include <vector>

#include "doctest.h"
#include "irsbf/rng.hpp"

using namespace irsbf;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

model::SystemConfig tiny_config() {
    model::SystemConfig cfg;
    cfg.num_bs = 2;
    cfg.num_antennas = 2;
    cfg.num_irs = 3;
    cfg.users_per_cell = {2, 1};
    cfg.bs_pos = {{-50.0, 0.0}, {50.0, 0.0}};
    cfg.user_pos = {{{-45.0, 20.0}, {-60.0, 25.0}}, {{55.0, 18.0}}};
    cfg.irs_pos = {0.0, 10.0};
    cfg.pmax_w = {1.0, 1.0};
    cfg.weights = {{1.0, 2.0}, {0.5}};
    return cfg;
}

metrics::TxBeams random_beams(const model::SystemConfig& cfg,
                              std::uint64_t key) {
    rng::Stream st(5, key);
    metrics::TxBeams W;
    for (int b = 0; b < cfg.num_bs; ++b) {
        MatrixXcd w(cfg.num_antennas, cfg.users_per_cell[b]);
        for (int k = 0; k < w.cols(); ++k)
            for (int m = 0; m < w.rows(); ++m) w(m, k) = st.next_cnormal();
        W.w.push_back(1e-5 * w);  // realistic channel-scale amplitudes
    }
    return W;
}

VectorXcd random_reflect(int n, std::uint64_t key) {
    rng::Stream st(6, key);
    VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = st.next_cnormal();
    return v;
}

// Oracle: SINR of every user directly from channel segments, Eq.-by-term.
VectorXd oracle_sinr(const model::SystemConfig& cfg,
                     const model::ChannelSet& ch, const metrics::TxBeams& W,
                     const VectorXcd& v) {
    const int K = cfg.total_users();
    VectorXd out(K);
    for (int j = 0; j < K; ++j) {
        const auto [b, k] = cfg.user_of_index(j);
        double desired = 0.0, interference = 0.0;
        for (int i = 0; i < cfg.num_bs; ++i) {
            // combined channel BS i -> user j for the given reflection
            VectorXcd a =
                ch.direct[i * K + j] +
                ch.bs_irs[i].adjoint() * (ch.irs_user[j].asDiagonal() * v);
            for (int u = 0; u < cfg.users_per_cell[i]; ++u) {
                const double p = std::norm(
                    (a.adjoint() * W.w[i].col(u)).value());
                if (i == b && u == k)
                    desired = p;
                else
                    interference += p;
            }
        }
        out(j) = desired / (interference + cfg.noise_w);
    }
    return out;
}

}  // namespace

TEST_CASE("cached quadratic forms reproduce term-enumerated SINRs") {
    auto cfg = tiny_config();
    auto ch = model::sample_channels(cfg, 21);
    auto comp = model::composite(cfg, ch);
    auto W = random_beams(cfg, 1);
    auto v = random_reflect(cfg.num_irs, 2);

    auto qf = metrics::quad_forms(cfg, ch, comp, W);
    VectorXd got = metrics::sinr_all(cfg, qf, v);
    VectorXd want = oracle_sinr(cfg, ch, W, v);
    REQUIRE(got.size() == want.size());
    for (int j = 0; j < got.size(); ++j)
        CHECK(got(j) == doctest::Approx(want(j)).epsilon(1e-12));

    // effective-channel path agrees with the quadratic-form path
    auto a = model::effective_channels(cfg, ch, comp, v);
    VectorXd got2 = metrics::sinr_all_effective(cfg, a, W);
    for (int j = 0; j < got.size(); ++j)
        CHECK(got2(j) == doctest::Approx(want(j)).epsilon(1e-12));
}

TEST_CASE("lifted forms evaluate identically to the quadratic forms") {
    auto cfg = tiny_config();
    auto ch = model::sample_channels(cfg, 22);
    auto comp = model::composite(cfg, ch);
    auto W = random_beams(cfg, 3);
    auto v = random_reflect(cfg.num_irs, 4);

    auto qf = metrics::quad_forms(cfg, ch, comp, W);
    auto lf = metrics::lifted_forms(qf);
    REQUIRE(lf.order == cfg.num_irs + 1);

    VectorXcd vbar(cfg.num_irs + 1);
    vbar << v, std::complex<double>(1.0, 0.0);
    const int K = cfg.total_users();
    for (int tx = 0; tx < K; ++tx)
        for (int rx = 0; rx < K; ++rx) {
            const auto l = qf.link(tx, rx);
            const double quad = metrics::link_power(qf, tx, rx, v);
            const double lifted =
                (vbar.adjoint() * lf.R[l] * vbar).value().real() +
                lf.dsq[l];
            CHECK(lifted == doctest::Approx(quad).epsilon(1e-10));
            // R is Hermitian with a zero bottom-right corner
            CHECK((lf.R[l] - lf.R[l].adjoint()).norm() < 1e-18);
            CHECK(std::abs(lf.R[l](lf.order - 1, lf.order - 1)) == 0.0);
        }
}

TEST_CASE("min weighted SINR selects the bottleneck user") {
    auto cfg = tiny_config();
    auto ch = model::sample_channels(cfg, 23);
    auto comp = model::composite(cfg, ch);
    auto W = random_beams(cfg, 5);
    auto v = random_reflect(cfg.num_irs, 6);
    auto qf = metrics::quad_forms(cfg, ch, comp, W);

    VectorXd sinr = metrics::sinr_all(cfg, qf, v);
    double best = std::numeric_limits<double>::infinity();
    int who = -1;
    for (int j = 0; j < sinr.size(); ++j) {
        const double val = sinr(j) / metrics::weight_of(cfg, j);
        if (val < best) {
            best = val;
            who = j;
        }
    }
    auto res = metrics::min_weighted_sinr(cfg, qf, v);
    CHECK(res.value == doctest::Approx(best).epsilon(1e-12));
    REQUIRE(!res.argmin.empty());
    CHECK(res.argmin.front() == who);

    CHECK(metrics::min_weighted_sinr_value(cfg, qf, v) ==
          doctest::Approx(best).epsilon(1e-12));

    auto a = model::effective_channels(cfg, ch, comp, v);
    auto res2 = metrics::min_weighted_sinr_effective(cfg, a, W);
    CHECK(res2.value == doctest::Approx(best).epsilon(1e-10));
    CHECK(res2.argmin == res.argmin);

    CHECK(metrics::evaluate(cfg, ch, comp, W, v) ==
          doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("argmin reports ties within 1e-12 relative, ascending") {
    std::vector<double> w = {3.0, 1.0, 1.0 + 1e-13, 2.0, 1.0};
    auto res = metrics::argmin_from_weighted(w);
    CHECK(res.value == doctest::Approx(1.0));
    CHECK(res.argmin == std::vector<int>{1, 2, 4});

    std::vector<double> strict = {2.0, 1.0, 1.0 + 1e-9};
    auto res2 = metrics::argmin_from_weighted(strict);
    CHECK(res2.argmin == std::vector<int>{1});
}
