// SPDX-License-Identifier: Apache-2.0

#include "irsbf/conic.hpp"

#include <ostream>
#include <stdexcept>

namespace irsbf::conic {

void ConicProgram::validate() const {
    if (c.size() != nvars) throw std::invalid_argument("objective size");
    if (G.cols() != nvars || A.cols() != nvars)
        throw std::invalid_argument("constraint matrix width");
    if (G.rows() != cone_rows() || h.size() != G.rows())
        throw std::invalid_argument("cone rows mismatch");
    if (A.rows() != b.size()) throw std::invalid_argument("equality rows");
    for (const auto& blk : cones)
        if (blk.dim <= 0) throw std::invalid_argument("empty cone block");
}

// Dump format, one line per item:
//   var <n>
//   min <i>:<ci> ...                (nonzeros of the objective)
//   orthant <dim> | soc <dim> | psd <order>     (cone blocks, in row order)
//   g <row> <i>:<gij> ...           (nonzeros of that row of G)
//   h <row> <value>                 (nonzeros of h)
//   eq <row> <b> <i>:<aij> ...      (equality rows)
void ConicProgram::dump(std::ostream& os) const {
    os << "var " << nvars << "\n";
    os << "min";
    for (int i = 0; i < c.size(); ++i)
        if (c(i) != 0.0) os << ' ' << i << ':' << c(i);
    os << "\n";
    for (const auto& blk : cones) {
        switch (blk.tag) {
            case ConeTag::Orthant: os << "orthant "; break;
            case ConeTag::Soc: os << "soc "; break;
            case ConeTag::Psd: os << "psd "; break;
        }
        os << blk.dim << "\n";
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> gr(G);
    for (int r = 0; r < gr.rows(); ++r) {
        bool any = false;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
                 gr, r);
             it; ++it) {
            if (!any) os << "g " << r;
            any = true;
            os << ' ' << it.col() << ':' << it.value();
        }
        if (any) os << "\n";
    }
    for (int r = 0; r < h.size(); ++r)
        if (h(r) != 0.0) os << "h " << r << ' ' << h(r) << "\n";
    Eigen::SparseMatrix<double, Eigen::RowMajor> ar(A);
    for (int r = 0; r < ar.rows(); ++r) {
        os << "eq " << r << ' ' << b(r);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
                 ar, r);
             it; ++it)
            os << ' ' << it.col() << ':' << it.value();
        os << "\n";
    }
}

Eigen::VectorXcd ConicSolution::complex_block(const ConicProgram& p,
                                              const std::string& name) const {
    for (const auto& blk : p.vars.blocks) {
        if (blk.name != name) continue;
        Eigen::VectorXcd out(blk.len);
        for (int i = 0; i < blk.len; ++i)
            out(i) = {x(blk.offset + i), x(blk.offset + blk.len + i)};
        return out;
    }
    throw std::invalid_argument("unknown complex block: " + name);
}

double ConicSolution::real_var(const ConicProgram& p,
                               const std::string& name) const {
    for (const auto& [n, idx] : p.vars.reals)
        if (n == name) return x(idx);
    throw std::invalid_argument("unknown real var: " + name);
}

ProgramBuilder::ProgramBuilder(int nvars) {
    prog_.nvars = nvars;
    prog_.c = Eigen::VectorXd::Zero(nvars);
}

int ProgramBuilder::add_complex_var(const std::string& name, int len) {
    // Blocks are laid out in registration order.
    int offset = 0;
    for (const auto& b : prog_.vars.blocks)
        offset = std::max(offset, b.offset + 2 * b.len);
    for (const auto& [n, idx] : prog_.vars.reals)
        offset = std::max(offset, idx + 1);
    prog_.vars.blocks.push_back({name, offset, len});
    return offset;
}

int ProgramBuilder::add_real_var(const std::string& name) {
    int idx = 0;
    for (const auto& b : prog_.vars.blocks)
        idx = std::max(idx, b.offset + 2 * b.len);
    for (const auto& [n, i] : prog_.vars.reals) idx = std::max(idx, i + 1);
    prog_.vars.reals.emplace_back(name, idx);
    return idx;
}

void ProgramBuilder::set_objective(int var, double coeff) {
    prog_.c(var) = coeff;
}

int ProgramBuilder::begin_orthant_row(double hval) {
    if (soc_or_psd_started_)
        throw std::logic_error("orthant rows must precede SOC/PSD blocks");
    if (!prog_.cones.empty() && prog_.cones.back().tag == ConeTag::Orthant)
        prog_.cones.back().dim += 1;
    else
        prog_.cones.push_back({ConeTag::Orthant, 1});
    h_.push_back(hval);
    return next_row_++;
}

int ProgramBuilder::begin_soc_block(int dim) {
    soc_or_psd_started_ = true;
    if (!prog_.cones.empty() && prog_.cones.back().tag == ConeTag::Psd)
        throw std::logic_error("SOC blocks must precede PSD blocks");
    prog_.cones.push_back({ConeTag::Soc, dim});
    const int row0 = next_row_;
    h_.resize(h_.size() + dim, 0.0);
    next_row_ += dim;
    return row0;
}

int ProgramBuilder::begin_psd_block(int order) {
    soc_or_psd_started_ = true;
    prog_.cones.push_back({ConeTag::Psd, order});
    const int row0 = next_row_;
    h_.resize(h_.size() + static_cast<std::size_t>(order) * order, 0.0);
    next_row_ += order * order;
    return row0;
}

void ProgramBuilder::set_h(int row, double value) { h_[row] = value; }

void ProgramBuilder::coeff(int row, int var, double value) {
    if (value != 0.0) g_trip_.emplace_back(row, var, value);
}

void ProgramBuilder::psd_coeff(int block_row0, int order, int r, int c,
                               int var, double value) {
    if (r < c) std::swap(r, c);  // lower triangle storage
    coeff(block_row0 + c * order + r, var, value);
}

void ProgramBuilder::psd_h(int block_row0, int order, int r, int c,
                           double value) {
    if (r < c) std::swap(r, c);
    h_[block_row0 + c * order + r] = value;
}

void ProgramBuilder::coeff_inner_re(int row, int offset,
                                    const Eigen::VectorXcd& q, double scale) {
    // Re(q^H w) = Re(q)'Re(w) + Im(q)'Im(w)
    const int L = static_cast<int>(q.size());
    for (int i = 0; i < L; ++i) {
        coeff(row, offset + i, scale * q(i).real());
        coeff(row, offset + L + i, scale * q(i).imag());
    }
}

void ProgramBuilder::coeff_inner_im(int row, int offset,
                                    const Eigen::VectorXcd& q, double scale) {
    // Im(q^H w) = Re(q)'Im(w) - Im(q)'Re(w)
    const int L = static_cast<int>(q.size());
    for (int i = 0; i < L; ++i) {
        coeff(row, offset + L + i, scale * q(i).real());
        coeff(row, offset + i, -scale * q(i).imag());
    }
}

int ProgramBuilder::begin_equality(double bval) {
    b_.push_back(bval);
    return next_eq_++;
}

void ProgramBuilder::eq_coeff(int row, int var, double value) {
    if (value != 0.0) a_trip_.emplace_back(row, var, value);
}

ConicProgram ProgramBuilder::take() {
    prog_.G.resize(next_row_, prog_.nvars);
    prog_.G.setFromTriplets(g_trip_.begin(), g_trip_.end());
    prog_.h = Eigen::Map<Eigen::VectorXd>(h_.data(), h_.size());
    prog_.A.resize(next_eq_, prog_.nvars);
    prog_.A.setFromTriplets(a_trip_.begin(), a_trip_.end());
    prog_.b = Eigen::Map<Eigen::VectorXd>(b_.data(), b_.size());
    prog_.validate();
    return std::move(prog_);
}

}  // namespace irsbf::conic
