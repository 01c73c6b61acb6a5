#pragma once

// Principal Dirichlet eigenpair of -Δ_h and the best constant of the
// embedding H¹₀ → L¹ on the same grid.

#include <kms/discretization.hpp>
#include <kms/error.hpp>
#include <kms/linear_solvers.hpp>

#include <cmath>
#include <string>
#include <utility>

namespace kms {

struct EigenPack {
    double lambda1 = 0.0;
    Field phi1;  ///< grad_norm_sq(phi1) == 1
    Field e1;    ///< sup_norm(e1) == 1
    double C1 = 0.0;
    double volume = 0.0;
    double p = 1.0;
    double int_e1_pow_p = 0.0;
    double int_e1_sq = 0.0;
};

enum class NormalizeMode { grad_norm, sup_norm };

struct EigenpairResult {
    double lambda = 0.0;
    Field vector;  ///< sup-normalized, strictly positive
    std::size_t iterations = 0;
    double residual = 0.0;  ///< ‖-Δ_h v - λ v‖_∞ with ‖v‖_∞ = 1
};

/// Inverse power iteration on -Δ_h with CG inner solves, started from the
/// constant field (positive iterates throughout).
inline EigenpairResult principal_eigenpair(const Mesh& mesh, double tol = 1e-10,
                                           std::size_t max_iterations = 2000) {
    if (!(tol > 0.0)) throw InvalidArgument("principal_eigenpair: tol must be > 0");
    const std::size_t n = mesh.size();
    Field v = mesh.constant(1.0);
    Field x = mesh.zeros();
    Field lv(n);
    const CgOptions cg{1e-13, 0};

    for (std::size_t it = 1; it <= max_iterations; ++it) {
        conjugate_gradient(mesh, 1.0, 0.0, v, x, cg);
        const double scale = sup_norm(x);
        if (!(scale > 0.0)) throw ConvergenceError("principal_eigenpair: iterate collapsed to zero");
        for (std::size_t i = 0; i < n; ++i) v[i] = x[i] / scale;
        apply_neg_laplacian(mesh, v.span(), lv.span());
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += v[i] * lv[i];
            den += v[i] * v[i];
        }
        const double lambda = num / den;
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(lv[i] - lambda * v[i]));
        // warm start for the next solve: L^{-1} v ≈ v / λ
        x = v;
        x *= 1.0 / lambda;
        if (res <= tol * lambda) {
            if (min_value(v) <= 0.0) {
                throw ConvergenceError("principal_eigenpair: converged vector is not positive");
            }
            return {lambda, std::move(v), it, res};
        }
    }
    throw ConvergenceError("principal_eigenpair: no convergence after " +
                           std::to_string(max_iterations) + " iterations");
}

inline Field normalize(const Mesh& mesh, const Field& v, NormalizeMode mode) {
    detail::check_size(mesh, v, "normalize");
    const double norm =
        mode == NormalizeMode::grad_norm ? std::sqrt(grad_norm_sq(mesh, v)) : sup_norm(v);
    if (!(norm > 0.0)) throw InvalidArgument("normalize: zero field");
    Field out = v;
    out *= 1.0 / norm;
    return out;
}

/// w with -Δ_h w = 1 and zero boundary data.
inline Field torsion_function(const Mesh& mesh) {
    return solve_shifted(mesh, 1.0, 0.0, mesh.constant(1.0), CgOptions{1e-13, 0});
}

/// Best constant of |u|₁ ≤ C₁‖u‖ on the grid: the maximizer of |u|₁/‖u‖ solves
/// -Δ_h u = const, so C₁ = (∫w)^{1/2} with w the torsion function.
inline double sobolev_c1(const Mesh& mesh) {
    return std::sqrt(integrate(mesh, torsion_function(mesh)));
}

inline EigenPack make_eigen_pack(const Mesh& mesh, double p, double tol = 1e-10) {
    if (!(p >= 1.0)) throw InvalidArgument("make_eigen_pack: p must be >= 1");
    auto eig = principal_eigenpair(mesh, tol);
    EigenPack pack;
    pack.lambda1 = eig.lambda;
    pack.e1 = normalize(mesh, eig.vector, NormalizeMode::sup_norm);
    pack.phi1 = normalize(mesh, eig.vector, NormalizeMode::grad_norm);
    pack.C1 = sobolev_c1(mesh);
    pack.volume = mesh.volume();
    pack.p = p;
    pack.int_e1_pow_p = integrate_power(mesh, pack.e1, p);
    pack.int_e1_sq = integrate_power(mesh, pack.e1, 2.0);
    return pack;
}

}  // namespace kms
