// SPDX-License-Identifier: Apache-2.0
//
// Internal cone algebra for the interior-point solver: Nesterov-Todd
// scalings, Jordan products, and step-length computations over the cone
// product R^l_+ x SOC(q_1) x ... x PSD(s_1) x ...
//
// Vectors over the cone ("s-space") have length cdim = l + sum q_i +
// sum s_i^2, with PSD blocks stored as full column-major matrices of which
// only the lower triangle is guaranteed valid.  Every routine here reads
// lower triangles only; routines that produce full symmetric blocks say so.
// "Diagonal" vectors (the scaled point lambda) have length cdim_diag =
// l + sum q_i + sum s_i and store only PSD eigenvalues.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "irsbf/conic.hpp"

namespace irsbf::conic::internal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Dims {
    int l = 0;
    std::vector<int> q, s;
    std::vector<int> qofs, sofs;   // block offsets into cdim vectors
    std::vector<int> sdiag;        // offsets of PSD eigenvalue sections
    int sumq = 0, sums = 0;
    int cdim = 0, cdim_diag = 0;

    static Dims from(const std::vector<ConeBlock>& cones);
};

struct Scaling {
    VectorXd d, di;                // orthant
    std::vector<double> beta;      // SOC
    std::vector<VectorXd> v;       // SOC Householder vectors
    std::vector<MatrixXd> r, rti;  // PSD factors
    static Scaling identity(const Dims& dims);
};

// Mirrors the lower triangle of every PSD block into the upper one.
void symm(VectorXd& x, const Dims& dims);

// Symmetric inner product; PSD blocks via diag + 2 * strict lower.
double sdot(const VectorXd& x, const VectorXd& y, const Dims& dims);
double snrm2(const VectorXd& x, const Dims& dims);

// x := y o x (Jordan product).  diag_y: y is a cdim_diag vector.
void sprod(VectorXd& x, const VectorXd& y, const Dims& dims,
           bool diag_y = false);
// x := y o\ x with diagonal y (a cdim_diag vector).
void sinv(VectorXd& x, const VectorXd& y, const Dims& dims);
// x := y o y for cdim_diag vectors.
void ssqr(VectorXd& x, const VectorXd& y, const Dims& dims);

// min { t | x + t*e >= 0 }.  With eigs/eigvecs output: PSD blocks of x are
// replaced by their eigenvector matrices and `sig` receives the ascending
// eigenvalues (sections laid out like the lambda diag parts).
double max_step(const VectorXd& x, const Dims& dims);
double max_step_eig(VectorXd& x, VectorXd& sig, const Dims& dims);

// x := W x (trans=false) or W' x (trans=true); inverse applies W^{-1} /
// W^{-T}.  PSD blocks: reads lower triangles, writes full symmetric blocks.
void scale(VectorXd& x, const Scaling& W, const Dims& dims, bool trans,
           bool inverse);

// x := H(lambda^{1/2}) x (inverse=false) or its inverse (inverse=true),
// where H is the Hessian of the barrier at the scaled point lambda.
void scale2(const VectorXd& lmbda, VectorXd& x, const Dims& dims,
            bool inverse);

// Nesterov-Todd scaling at (s, z): W z = W^{-T} s = lambda.  Requires s, z
// strictly feasible; returns false on factorization failure.
bool compute_scaling(Scaling& W, const VectorXd& s, const VectorXd& z,
                     VectorXd& lmbda, const Dims& dims);

// Rank-preserving update after a step.  On entry the l/q parts of s and z
// hold the updated iterates in the current scaling, and the PSD parts hold
// Cholesky-like factors Ls, Lz of them.  Returns false on failure.
bool update_scaling(Scaling& W, VectorXd& lmbda, VectorXd& s, VectorXd& z,
                    const Dims& dims);

}  // namespace irsbf::conic::internal
