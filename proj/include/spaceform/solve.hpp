// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <spaceform/errors.hpp>

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdio>
#include <string>

namespace spaceform {

namespace detail {

inline std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

} // namespace detail

enum class Preconditioner {
    Jacobi,   ///< inverse diagonal
    Cholesky, ///< sparse LDL^T factorization (AMD ordering) of A itself
};

struct SolveConfig {
    double tolerance = 1e-10;
    Preconditioner preconditioner = Preconditioner::Jacobi;
    int max_iterations = 200000;
    // The solver is serial, so results are bitwise reproducible either way;
    // the flag is threaded through so reports can drop wall-clock timings.
    bool deterministic = true;
};

struct SolveResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for a symmetric positive definite A.
/// Stops once ||A x - b|| <= tolerance * ||b||, with the residual recomputed
/// from scratch before returning. With the Cholesky preconditioner the
/// iteration reduces to a few steps of iterative refinement.
inline SolveResult solve_spd(
    const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, const SolveConfig& cfg = {})
{
    if (A.rows() != A.cols() || A.rows() != b.size()) {
        throw PreconditionError("solve_spd: dimension mismatch");
    }
    const double bnorm = b.norm();
    SolveResult out;
    out.x = Eigen::VectorXd::Zero(b.size());
    if (bnorm == 0.0) return out;

    Eigen::VectorXd inv_diag(A.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double d = A.coeff(i, i);
        if (!(d > 0.0)) throw PreconditionError("solve_spd: non-positive diagonal entry");
        inv_diag[i] = 1.0 / d;
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;
    if (cfg.preconditioner == Preconditioner::Cholesky) {
        factor.compute(A);
        if (factor.info() != Eigen::Success) {
            throw PreconditionError("solve_spd: LDL^T factorization failed");
        }
    }
    auto precondition = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        if (cfg.preconditioner == Preconditioner::Cholesky) return factor.solve(v);
        return inv_diag.cwiseProduct(v);
    };

    Eigen::VectorXd r = b;
    Eigen::VectorXd z = precondition(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd q(b.size());
    double rz = r.dot(z);
    const double target = cfg.tolerance * bnorm;

    int it = 0;
    while (true) {
        if (r.norm() <= target) {
            // Guard against drift between the recurrence and the true residual.
            const Eigen::VectorXd true_r = b - A * out.x;
            if (true_r.norm() <= target) break;
            r = true_r;
            z = precondition(r);
            p = z;
            rz = r.dot(z);
        }
        if (it >= cfg.max_iterations) {
            const double res = (b - A * out.x).norm() / bnorm;
            throw NonConvergenceError(
                "conjugate gradients did not converge in " + std::to_string(it) +
                    " iterations (relative residual " + detail::sci(res) + ")",
                res, it);
        }
        q.noalias() = A * p;
        const double pq = p.dot(q);
        if (!(pq > 0.0)) {
            throw PreconditionError("solve_spd: matrix is not positive definite");
        }
        const double step = rz / pq;
        out.x.noalias() += step * p;
        r.noalias() -= step * q;
        z = precondition(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
        ++it;
    }
    out.iterations = it;
    out.relative_residual = (b - A * out.x).norm() / bnorm;
    return out;
}

} // namespace spaceform
