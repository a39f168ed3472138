// SPDX-License-Identifier: Apache-2.0

#include "cone_internal.hpp"

#include <cmath>
#include <limits>

namespace irsbf::conic::internal {

namespace {

// x' J y over a SOC segment, J = diag(1, -I).
double jdot(const double* x, const double* y, int m) {
    double head = x[0] * y[0], tail = 0.0;
    for (int i = 1; i < m; ++i) tail += x[i] * y[i];
    return head - tail;
}

// sqrt(x' J x), clamped at 0.
double jnrm2(const double* x, int m) {
    return std::sqrt(std::max(0.0, jdot(x, x, m)));
}

using MapMat = Eigen::Map<MatrixXd>;
using CMapMat = Eigen::Map<const MatrixXd>;

}  // namespace

Dims Dims::from(const std::vector<ConeBlock>& cones) {
    Dims d;
    for (const auto& blk : cones) {
        switch (blk.tag) {
            case ConeTag::Orthant: d.l += blk.dim; break;
            case ConeTag::Soc: d.q.push_back(blk.dim); break;
            case ConeTag::Psd: d.s.push_back(blk.dim); break;
        }
    }
    int ofs = d.l;
    for (int m : d.q) {
        d.qofs.push_back(ofs);
        ofs += m;
        d.sumq += m;
    }
    for (int m : d.s) {
        d.sofs.push_back(ofs);
        ofs += m * m;
        d.sums += m;
    }
    d.cdim = ofs;
    d.cdim_diag = d.l + d.sumq + d.sums;
    int dofs = d.l + d.sumq;
    for (int m : d.s) {
        d.sdiag.push_back(dofs);
        dofs += m;
    }
    return d;
}

Scaling Scaling::identity(const Dims& dims) {
    Scaling W;
    W.d = VectorXd::Ones(dims.l);
    W.di = VectorXd::Ones(dims.l);
    for (int m : dims.q) {
        W.beta.push_back(1.0);
        VectorXd v = VectorXd::Zero(m);
        v(0) = 1.0;
        W.v.push_back(std::move(v));
    }
    for (int m : dims.s) {
        W.r.push_back(MatrixXd::Identity(m, m));
        W.rti.push_back(MatrixXd::Identity(m, m));
    }
    return W;
}

void symm(VectorXd& x, const Dims& dims) {
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        MapMat X(x.data() + dims.sofs[k], m, m);
        X.triangularView<Eigen::StrictlyUpper>() =
            X.transpose().triangularView<Eigen::StrictlyUpper>();
    }
}

double sdot(const VectorXd& x, const VectorXd& y, const Dims& dims) {
    const int nlq = dims.l + dims.sumq;
    double a = x.head(nlq).dot(y.head(nlq));
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        CMapMat X(x.data() + dims.sofs[k], m, m);
        CMapMat Y(y.data() + dims.sofs[k], m, m);
        a += X.diagonal().dot(Y.diagonal());
        for (int c = 0; c < m - 1; ++c)
            a += 2.0 * X.col(c).tail(m - 1 - c).dot(Y.col(c).tail(m - 1 - c));
    }
    return a;
}

double snrm2(const VectorXd& x, const Dims& dims) {
    return std::sqrt(std::max(0.0, sdot(x, x, dims)));
}

void sprod(VectorXd& x, const VectorXd& y, const Dims& dims, bool diag_y) {
    x.head(dims.l).array() *= y.head(dims.l).array();
    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        const double dd = x.segment(ofs, m).dot(y.segment(ofs, m));
        const double x0 = x(ofs);
        x.segment(ofs + 1, m - 1) *= y(ofs);
        x.segment(ofs + 1, m - 1) += x0 * y.segment(ofs + 1, m - 1);
        x(ofs) = dd;
    }
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        MapMat X(x.data() + dims.sofs[k], m, m);
        if (diag_y) {
            // y diagonal: scale lower entries by (y_i + y_j) / 2.
            const double* lam = y.data() + dims.sdiag[k];
            for (int c = 0; c < m; ++c)
                for (int r = c; r < m; ++r)
                    X(r, c) *= 0.5 * (lam[r] + lam[c]);
        } else {
            MatrixXd A = X.selfadjointView<Eigen::Lower>();
            CMapMat Ymap(y.data() + dims.sofs[k], m, m);
            MatrixXd Y = Ymap.selfadjointView<Eigen::Lower>();
            X.noalias() = 0.5 * (A * Y + Y * A);
        }
    }
}

void sinv(VectorXd& x, const VectorXd& y, const Dims& dims) {
    x.head(dims.l).array() /= y.head(dims.l).array();
    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        const double aa = jdot(y.data() + ofs, y.data() + ofs, m);
        const double cc = x(ofs);
        const double dd =
            y.segment(ofs + 1, m - 1).dot(x.segment(ofs + 1, m - 1));
        x(ofs) = cc * y(ofs) - dd;
        const double f = aa / y(ofs);
        x.segment(ofs + 1, m - 1) *= f;
        x.segment(ofs + 1, m - 1) +=
            (dd / y(ofs) - cc) * y.segment(ofs + 1, m - 1);
        x.segment(ofs, m) /= aa;
    }
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        MapMat X(x.data() + dims.sofs[k], m, m);
        const double* lam = y.data() + dims.sdiag[k];
        for (int c = 0; c < m; ++c)
            for (int r = c; r < m; ++r)
                X(r, c) /= 0.5 * (lam[r] + lam[c]);
    }
}

void ssqr(VectorXd& x, const VectorXd& y, const Dims& dims) {
    x.head(dims.l).array() = y.head(dims.l).array().square();
    int ofs = dims.l;
    for (int m : dims.q) {
        x(ofs) = y.segment(ofs, m).squaredNorm();
        x.segment(ofs + 1, m - 1) =
            2.0 * y(ofs) * y.segment(ofs + 1, m - 1);
        ofs += m;
    }
    const int ns = dims.sums;
    x.segment(ofs, ns).array() = y.segment(ofs, ns).array().square();
}

double max_step(const VectorXd& x, const Dims& dims) {
    double t = -std::numeric_limits<double>::infinity();
    bool any = false;
    if (dims.l > 0) {
        t = std::max(t, -x.head(dims.l).minCoeff());
        any = true;
    }
    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        t = std::max(t, x.segment(ofs + 1, m - 1).norm() - x(ofs));
        any = true;
    }
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        CMapMat X(x.data() + dims.sofs[k], m, m);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(
            X, Eigen::EigenvaluesOnly);
        t = std::max(t, -es.eigenvalues()(0));
        any = true;
    }
    return any ? t : 0.0;
}

double max_step_eig(VectorXd& x, VectorXd& sig, const Dims& dims) {
    double t = -std::numeric_limits<double>::infinity();
    bool any = false;
    if (dims.l > 0) {
        t = std::max(t, -x.head(dims.l).minCoeff());
        any = true;
    }
    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        t = std::max(t, x.segment(ofs + 1, m - 1).norm() - x(ofs));
        any = true;
    }
    int sofs = 0;
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        MapMat X(x.data() + dims.sofs[k], m, m);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(X);  // reads lower
        sig.segment(sofs, m) = es.eigenvalues();
        X = es.eigenvectors();
        t = std::max(t, -sig(sofs));
        sofs += m;
        any = true;
    }
    return any ? t : 0.0;
}

void scale(VectorXd& x, const Scaling& W, const Dims& dims, bool trans,
           bool inverse) {
    if (dims.l > 0)
        x.head(dims.l).array() *=
            (inverse ? W.di : W.d).head(dims.l).array();

    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        const VectorXd& v = W.v[k];
        // forward: x := beta * (2*v*(v'x) - J*x)
        // inverse: x := 1/beta * (2*Jv*(v'Jx) - J*x)
        if (inverse) x(ofs) = -x(ofs);
        const double w = v.dot(x.segment(ofs, m));
        x(ofs) = -x(ofs);
        x.segment(ofs, m) += 2.0 * w * v;
        if (inverse) x(ofs) = -x(ofs);
        const double a = inverse ? 1.0 / W.beta[k] : W.beta[k];
        x.segment(ofs, m) *= a;
    }

    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        // Select the factor so the result is
        //   trans=false: r' X r   (inverse: rti X rti')
        //   trans=true:  r X r'   (inverse: rti' X rti)
        const MatrixXd& f = inverse ? W.rti[k] : W.r[k];
        const bool left_transposed = inverse ? trans : !trans;
        MapMat X(x.data() + dims.sofs[k], m, m);
        // Use only the lower triangle of X: with L = tril(X, half diagonal),
        // X = L + L', so   f' X f = f' L f + (f' L f)'   (and likewise for
        // the f X f' form), which avoids requiring a valid upper triangle.
        MatrixXd L = X.triangularView<Eigen::Lower>();
        L.diagonal() *= 0.5;
        MatrixXd half;
        if (left_transposed)
            half.noalias() = f.transpose() * L * f;
        else
            half.noalias() = f * L * f.transpose();
        X = half + half.transpose();
    }
}

void scale2(const VectorXd& lmbda, VectorXd& x, const Dims& dims,
            bool inverse) {
    if (!inverse)
        x.head(dims.l).array() /= lmbda.head(dims.l).array();
    else
        x.head(dims.l).array() *= lmbda.head(dims.l).array();

    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        const double a = jnrm2(lmbda.data() + ofs, m);
        VectorXd ell = lmbda.segment(ofs, m) / a;
        const double x0 = x(ofs);
        if (!inverse) {
            const double lJx =
                ell(0) * x0 -
                ell.tail(m - 1).dot(x.segment(ofs + 1, m - 1));
            x(ofs) = lJx;
            x.segment(ofs + 1, m - 1) -=
                (x0 + lJx) / (ell(0) + 1.0) * ell.tail(m - 1);
            x.segment(ofs, m) /= a;
        } else {
            const double lx = ell.dot(x.segment(ofs, m));
            x(ofs) = lx;
            x.segment(ofs + 1, m - 1) +=
                (x0 + lx) / (ell(0) + 1.0) * ell.tail(m - 1);
            x.segment(ofs, m) *= a;
        }
    }

    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        MapMat X(x.data() + dims.sofs[k], m, m);
        const double* lam = lmbda.data() + dims.sdiag[k];
        for (int c = 0; c < m; ++c)
            for (int r = 0; r < m; ++r) {
                const double f = std::sqrt(lam[r]) * std::sqrt(lam[c]);
                if (!inverse)
                    X(r, c) /= f;
                else
                    X(r, c) *= f;
            }
    }
}

bool compute_scaling(Scaling& W, const VectorXd& s, const VectorXd& z,
                     VectorXd& lmbda, const Dims& dims) {
    W.d.resize(dims.l);
    W.di.resize(dims.l);
    for (int i = 0; i < dims.l; ++i) {
        if (s(i) <= 0.0 || z(i) <= 0.0) return false;
        W.d(i) = std::sqrt(s(i) / z(i));
        W.di(i) = 1.0 / W.d(i);
        lmbda(i) = std::sqrt(s(i) * z(i));
    }

    W.beta.assign(dims.q.size(), 0.0);
    W.v.assign(dims.q.size(), VectorXd());
    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        const double aa = jnrm2(s.data() + ofs, m);
        const double bb = jnrm2(z.data() + ofs, m);
        if (aa <= 0.0 || bb <= 0.0) return false;
        W.beta[k] = std::sqrt(aa / bb);
        const double cc = std::sqrt(
            (s.segment(ofs, m).dot(z.segment(ofs, m)) / aa / bb + 1.0) /
            2.0);
        VectorXd v = -z.segment(ofs, m) / bb;
        v(0) = -v(0);
        v += s.segment(ofs, m) / aa;
        v /= 2.0 * cc;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * v(0));
        W.v[k] = std::move(v);

        lmbda(ofs) = cc;
        const double dd = 2.0 * cc + s(ofs) / aa + z(ofs) / bb;
        lmbda.segment(ofs + 1, m - 1) =
            ((cc + z(ofs) / bb) / dd / aa) * s.segment(ofs + 1, m - 1) +
            ((cc + s(ofs) / aa) / dd / bb) * z.segment(ofs + 1, m - 1);
        lmbda.segment(ofs, m) *= std::sqrt(aa * bb);
    }

    W.r.assign(dims.s.size(), MatrixXd());
    W.rti.assign(dims.s.size(), MatrixXd());
    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        CMapMat Smat(s.data() + dims.sofs[k], m, m);
        CMapMat Zmat(z.data() + dims.sofs[k], m, m);
        Eigen::LLT<MatrixXd> chs(
            MatrixXd(Smat.selfadjointView<Eigen::Lower>()));
        Eigen::LLT<MatrixXd> chz(
            MatrixXd(Zmat.selfadjointView<Eigen::Lower>()));
        if (chs.info() != Eigen::Success || chz.info() != Eigen::Success)
            return false;
        const MatrixXd Ls = chs.matrixL();
        const MatrixXd Lz = chz.matrixL();

        // SVD of Lz' Ls = U diag(lambda) V'.
        Eigen::JacobiSVD<MatrixXd> svd(
            Lz.transpose() * Ls,
            Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd& sig = svd.singularValues();
        lmbda.segment(dims.sdiag[k], m) = sig;

        MatrixXd r = Lz.transpose()
                         .triangularView<Eigen::Upper>()
                         .solve(svd.matrixU());
        MatrixXd rti = Lz * svd.matrixU();
        for (int i = 0; i < m; ++i) {
            const double a = std::sqrt(sig(i));
            if (!(a > 0.0)) return false;
            r.col(i) *= a;
            rti.col(i) /= a;
        }
        W.r[k] = std::move(r);
        W.rti[k] = std::move(rti);
    }
    return true;
}

bool update_scaling(Scaling& W, VectorXd& lmbda, VectorXd& s, VectorXd& z,
                    const Dims& dims) {
    const int ml = dims.l;
    for (int i = 0; i < ml; ++i) {
        if (s(i) < 0.0 || z(i) < 0.0) return false;
        s(i) = std::sqrt(s(i));
        z(i) = std::sqrt(z(i));
        W.d(i) *= s(i) / z(i);
        W.di(i) = 1.0 / W.d(i);
        lmbda(i) = s(i) * z(i);
    }

    for (std::size_t k = 0; k < dims.q.size(); ++k) {
        const int ofs = dims.qofs[k], m = dims.q[k];
        const double aa = jnrm2(s.data() + ofs, m);
        const double bb = jnrm2(z.data() + ofs, m);
        if (aa <= 0.0 || bb <= 0.0) return false;
        s.segment(ofs, m) /= aa;
        z.segment(ofs, m) /= bb;
        const double cc = std::sqrt(
            (1.0 + s.segment(ofs, m).dot(z.segment(ofs, m))) / 2.0);
        const VectorXd& v = W.v[k];
        const double vs = v.dot(s.segment(ofs, m));
        const double vz = jdot(v.data(), z.data() + ofs, m);
        const double vq = (vs + vz) / 2.0 / cc;
        const double vu = vs - vz;
        lmbda(ofs) = cc;
        const double wk0 = 2.0 * v(0) * vq - (s(ofs) + z(ofs)) / 2.0 / cc;
        const double dd =
            (v(0) * vu - s(ofs) / 2.0 + z(ofs) / 2.0) / (wk0 + 1.0);

        lmbda.segment(ofs + 1, m - 1) =
            (2.0 * (-dd * vq + 0.5 * vu)) * v.tail(m - 1) +
            (0.5 * (1.0 - dd / cc)) * s.segment(ofs + 1, m - 1) +
            (0.5 * (1.0 + dd / cc)) * z.segment(ofs + 1, m - 1);
        lmbda.segment(ofs, m) *= std::sqrt(aa * bb);

        VectorXd& vk = W.v[k];
        vk *= 2.0 * vq;
        vk(0) -= s(ofs) / 2.0 / cc;
        vk.tail(m - 1) += (0.5 / cc) * s.segment(ofs + 1, m - 1);
        vk -= (0.5 / cc) * z.segment(ofs, m);
        vk(0) += 1.0;
        vk /= std::sqrt(2.0 * vk(0));
        W.beta[k] *= std::sqrt(aa / bb);
    }

    for (std::size_t k = 0; k < dims.s.size(); ++k) {
        const int m = dims.s[k];
        MapMat Ls(s.data() + dims.sofs[k], m, m);
        MapMat Lz(z.data() + dims.sofs[k], m, m);
        MatrixXd r = W.r[k] * Ls;
        MatrixXd rti = W.rti[k] * Lz;
        Eigen::JacobiSVD<MatrixXd> svd(
            Lz.transpose() * Ls,
            Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd& sig = svd.singularValues();
        lmbda.segment(dims.sdiag[k], m) = sig;
        r = r * svd.matrixV();
        rti = rti * svd.matrixU();
        for (int i = 0; i < m; ++i) {
            const double a = std::sqrt(sig(i));
            if (!(a > 0.0)) return false;
            r.col(i) /= a;
            rti.col(i) /= a;
        }
        W.r[k] = std::move(r);
        W.rti[k] = std::move(rti);
    }
    return true;
}

}  // namespace irsbf::conic::internal
