#pragma once

// Linear solvers for the shifted operator  scale·(-Δ_h) + shift·I.
//
// conjugate_gradient() is matrix-free and used for the one-off solves
// (eigen-iteration, torsion function, auxiliary Poisson problems).
// ShiftedLaplacianFactor keeps a sparse LDLᵀ factorization for the case where
// the same operator is applied to many right-hand sides.

#include <kms/discretization.hpp>
#include <kms/error.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace kms {

struct CgOptions {
    double rel_tol = 1e-12;
    /// 0 selects the default cap of 10·n.
    std::size_t max_iterations = 0;
};

struct CgResult {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

/// Solves (scale·(-Δ_h) + shift·I) x = b. `x` holds the initial guess on entry.
inline CgResult conjugate_gradient(const Mesh& mesh, double scale, double shift, const Field& b,
                                   Field& x, const CgOptions& options = {}) {
    detail::check_size(mesh, b, "conjugate_gradient");
    if (x.size() != b.size()) x = mesh.zeros();
    const std::size_t n = b.size();
    const std::size_t cap = options.max_iterations ? options.max_iterations : 10 * n;

    auto apply = [&](const Field& v, Field& out) {
        apply_neg_laplacian(mesh, v.span(), out.span());
        for (std::size_t i = 0; i < n; ++i) out[i] = scale * out[i] + shift * v[i];
    };
    auto dot = [n](const Field& a, const Field& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * c[i];
        return s;
    };

    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) {
        x = mesh.zeros();
        return {};
    }

    Field r(n), ap(n);
    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    Field p = r;
    double rr = dot(r, r);
    const double target = options.rel_tol * b_norm;

    std::size_t it = 0;
    while (std::sqrt(rr) > target) {
        if (it == cap) {
            throw ConvergenceError("conjugate_gradient: no convergence after " + std::to_string(cap) +
                                   " iterations (relative residual " +
                                   std::to_string(std::sqrt(rr) / b_norm) + ")");
        }
        apply(p, ap);
        const double alpha = rr / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++it;
    }
    return {it, std::sqrt(rr) / b_norm};
}

/// Convenience wrapper: x solves (scale·(-Δ_h) + shift·I) x = b from a zero initial guess.
inline Field solve_shifted(const Mesh& mesh, double scale, double shift, const Field& b,
                           const CgOptions& options = {}) {
    Field x = mesh.zeros();
    conjugate_gradient(mesh, scale, shift, b, x, options);
    return x;
}

/// Assembled sparse matrix of scale·(-Δ_h) + shift·I.
inline Eigen::SparseMatrix<double> assemble_shifted_laplacian(const Mesh& mesh, double scale,
                                                              double shift) {
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    const double cx = scale / (mesh.hx() * mesh.hx());
    const double cy = mesh.dimension() == 2 ? scale / (mesh.hy() * mesh.hy()) : 0.0;
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(mesh.size() * (mesh.dimension() == 2 ? 5 : 3));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const auto n = static_cast<int>(mesh.index(i, j));
            entries.emplace_back(n, n, 2.0 * cx + 2.0 * cy + shift);
            if (i > 0) entries.emplace_back(n, n - 1, -cx);
            if (i + 1 < nx) entries.emplace_back(n, n + 1, -cx);
            if (mesh.dimension() == 2) {
                if (j > 0) entries.emplace_back(n, n - nx, -cy);
                if (j + 1 < ny) entries.emplace_back(n, n + nx, -cy);
            }
        }
    }
    const auto size = static_cast<Eigen::Index>(mesh.size());
    Eigen::SparseMatrix<double> a(size, size);
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

class ShiftedLaplacianFactor {
public:
    ShiftedLaplacianFactor(const Mesh& mesh, double scale, double shift)
        : mesh_(&mesh), matrix_(assemble_shifted_laplacian(mesh, scale, shift)) {
        solver_.compute(matrix_);
        if (solver_.info() != Eigen::Success) {
            throw ConvergenceError("ShiftedLaplacianFactor: factorization failed");
        }
    }

    ShiftedLaplacianFactor(const ShiftedLaplacianFactor&) = delete;
    ShiftedLaplacianFactor& operator=(const ShiftedLaplacianFactor&) = delete;

    void solve(const Field& rhs, Field& out) const {
        detail::check_size(*mesh_, rhs, "ShiftedLaplacianFactor::solve");
        const auto n = static_cast<Eigen::Index>(rhs.size());
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
        if (out.size() != rhs.size()) out = mesh_->zeros();
        Eigen::Map<Eigen::VectorXd> x(out.data(), n);
        x = solver_.solve(b);
    }

private:
    const Mesh* mesh_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

}  // namespace kms
