// SPDX-License-Identifier: Apache-2.0
//
// Conic-program description and native interior-point solver.
//
// Programs are in the standard primal form
//     minimize    c'x
//     subject to  G x + s = h,   A x = b,   s in K,
// where K is a Cartesian product of nonnegative-orthant, second-order, and
// PSD cones, in that row order inside G and h.  PSD blocks of order p occupy
// p*p rows of G/h (column-major, lower triangle referenced; strictly upper
// entries are ignored).
//
// Complex quantities enter through the real/imaginary stacking convention: a
// complex vector variable of length L becomes 2L reals (all real parts, then
// all imaginary parts); a Hermitian PSD constraint of order L becomes one
// real symmetric PSD block of order 2L, [[Re, -Im], [Im, Re]].  VarMap
// records where each complex block lives so solutions can be decoded.
//
// The solver is a homogeneous self-dual interior-point method with
// Nesterov-Todd scaling and a Mehrotra predictor-corrector, with the KKT
// systems solved through a Cholesky factorization of the Schur complement
// G' (W'W)^{-1} G that exploits column sparsity (dominant for the PSD
// feasibility probes solved here).

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace irsbf::conic {

enum class ConeTag { Orthant, Soc, Psd };

struct ConeBlock {
    ConeTag tag;
    int dim;  // orthant: #rows; SOC: total dim; PSD: matrix order p
    int rows() const { return tag == ConeTag::Psd ? dim * dim : dim; }
};

// Where a complex block of a decision variable lives in the real vector x:
// Re parts at [offset, offset+len), Im parts at [offset+len, offset+2*len).
struct ComplexBlock {
    std::string name;
    int offset = 0;
    int len = 0;
};

struct VarMap {
    std::vector<ComplexBlock> blocks;
    std::vector<std::pair<std::string, int>> reals;  // named real scalars
};

struct ConicProgram {
    int nvars = 0;
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd h;
    Eigen::SparseMatrix<double> A;  // 0 x nvars when no equalities
    Eigen::VectorXd b;
    std::vector<ConeBlock> cones;
    VarMap vars;

    int cone_rows() const {
        int n = 0;
        for (const auto& blk : cones) n += blk.rows();
        return n;
    }
    // Throws std::invalid_argument when dimensions are inconsistent.
    void validate() const;
    // One line per constraint block; documented in the implementation.
    void dump(std::ostream& os) const;
};

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

struct ConicSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
    double pres = 0.0;    // primal residual (scaled)
    double dres = 0.0;    // dual residual (scaled)
    double gap = 0.0;     // duality gap
    std::string detail;   // human-readable termination note

    // Decoded complex block (by VarMap name).
    Eigen::VectorXcd complex_block(const ConicProgram& p,
                                   const std::string& name) const;
    double real_var(const ConicProgram& p, const std::string& name) const;
};

struct SolverOptions {
    double abstol = 1e-7;
    double reltol = 1e-6;
    double feastol = 1e-7;
    int max_iters = 100;
    int refinement = 1;
    // On a numerical breakdown late in the iteration, fall back to the best
    // recorded iterate when it meets 100x the tolerances above (the usual
    // "close to optimal" grade).  Disable for probes whose solutions feed
    // tight post-conditions and that have their own failure protocol.
    bool accept_loose = true;
};

ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts = {});

// --- construction helpers -------------------------------------------------

// Incremental triplet-based builder; rows are appended cone block by cone
// block in the canonical order (orthant rows first, then SOC, then PSD).
class ProgramBuilder {
  public:
    explicit ProgramBuilder(int nvars);

    // Decision-variable metadata.
    int add_complex_var(const std::string& name, int len);  // returns offset
    int add_real_var(const std::string& name);              // returns index

    void set_objective(int var, double coeff);

    // All orthant rows must be added before any SOC/PSD block.  Each row
    // means  h - sum_i coeff_i x_i >= 0.
    int begin_orthant_row(double h);
    // A SOC block of dimension dim: rows r specify s_r = h_r - g_r'x with
    // s_0 >= ||s_1:||.
    int begin_soc_block(int dim);
    // A PSD block of order p; entries are set with psd_entry below.
    int begin_psd_block(int order);

    void set_h(int row, double value);
    // Adds value*x_var to the row's affine map: s_row = h_row - sum_i v_i x_i.
    void coeff(int row, int var, double value);
    // For the PSD block started last: adds G coefficient at matrix entry
    // (r, c), r >= c, for variable var.  s-block entry (r,c) = h(r,c) - sum.
    void psd_coeff(int block_row0, int order, int r, int c, int var,
                   double value);
    void psd_h(int block_row0, int order, int r, int c, double value);

    // Complex-valued helpers: append the real resp. imaginary part of
    // q^H w  (w = complex block at offset, q complex coefficients) to row.
    void coeff_inner_re(int row, int offset, const Eigen::VectorXcd& q,
                        double scale = 1.0);
    void coeff_inner_im(int row, int offset, const Eigen::VectorXcd& q,
                        double scale = 1.0);

    // Equality row a'x = b.
    int begin_equality(double b);
    void eq_coeff(int row, int var, double value);

    ConicProgram take();

  private:
    ConicProgram prog_;
    std::vector<Eigen::Triplet<double>> g_trip_, a_trip_;
    std::vector<double> h_, b_;
    int next_row_ = 0;
    int next_eq_ = 0;
    bool soc_or_psd_started_ = false;
};

}  // namespace irsbf::conic
