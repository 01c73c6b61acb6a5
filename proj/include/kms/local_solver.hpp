#pragma once

// The frozen problem  -a(α) Δu = f★(u),  u > 0,  u = 0 on ∂Ω,  for one fixed α.
//
// Solved by shifted monotone iteration
//     (-a(α) Δ_h + σ I) u_{n+1} = f★(u_n) + σ u_n
// from the subsolution z_α = ψ⁻¹(λ₁ a(α)) e₁ (nondecreasing iterates) or from
// the constant supersolution t★ (nonincreasing iterates). Both limits coincide
// with the unique positive solution; comparing them is a built-in check.

#include <kms/discretization.hpp>
#include <kms/error.hpp>
#include <kms/linear_solvers.hpp>
#include <kms/model.hpp>
#include <kms/spectral.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace kms {

enum class Side { sub, super };

inline const char* to_string(Side side) { return side == Side::sub ? "sub" : "super"; }

struct LocalProblem {
    double alpha = 0.0;
    double a_alpha = 0.0;
    const ModelSpec& model;
    const Mesh& mesh;
    const EigenPack& eig;
};

/// Refuses α where a(α) is below `a_min` (the operator degenerates at the knots).
inline LocalProblem make_local_problem(const ModelSpec& model, const Mesh& mesh, const EigenPack& eig,
                                       double alpha, double a_min) {
    const double a = model.a(alpha);
    if (!(a > 0.0) || a < a_min) {
        throw InvalidArgument("local problem: a(" + std::to_string(alpha) + ") = " + std::to_string(a) +
                              " is below the floor " + std::to_string(a_min));
    }
    if (eig.e1.size() != mesh.size()) throw InvalidArgument("local problem: eigen data built on another mesh");
    return LocalProblem{alpha, a, model, mesh, eig};
}

/// Default floor for a(α): 1e-6 · max a.
inline double default_a_min(const ModelSpec& model) { return 1e-6 * max_a(model); }

struct LocalSolverOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 100000;
    double monotonicity_slack = 1e-12;
    /// Record the energy every `energy_trace_stride` iterations (0: never).
    std::size_t energy_trace_stride = 0;
};

struct LocalSolution {
    double alpha = 0.0;
    Field u;
    double energy = 0.0;
    double sup_residual = 0.0;
    std::size_t iterations = 0;
    Side side = Side::sub;
    double shift = 0.0;
    std::vector<double> energy_trace;
};

/// σ = 1.1 · max(0, -min f★'), with f★' sampled by finite differences on 10³ points of [0, t★].
/// This keeps t ↦ f★(t) + σ t nondecreasing, which is all the monotone scheme needs.
inline double monotone_shift(const ModelSpec& model) {
    constexpr int samples = 1000;
    const double h = model.t_star() / samples;
    double min_slope = 0.0;
    double prev = eval_fstar(model, 0.0);
    for (int i = 1; i <= samples; ++i) {
        const double cur = eval_fstar(model, i * h);
        min_slope = std::min(min_slope, (cur - prev) / h);
        prev = cur;
    }
    return 1.1 * std::max(0.0, -min_slope);
}

inline double energy(const LocalProblem& problem, const Field& u) {
    const Mesh& mesh = problem.mesh;
    double potential = 0.0;
    for (double v : u) potential += eval_Fstar(problem.model, v);
    return 0.5 * problem.a_alpha * grad_norm_sq(mesh, u) - potential * mesh.cell_volume();
}

/// ‖-a(α) Δ_h u - f★(u)‖_∞.
inline double local_residual(const LocalProblem& problem, const Field& u) {
    const Field lu = neg_laplacian(problem.mesh, u);
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        r = std::max(r, std::abs(problem.a_alpha * lu[i] - eval_fstar(problem.model, u[i])));
    }
    return r;
}

/// z_α = ψ⁻¹(λ₁ a(α)) e₁, checked to be a discrete subsolution.
inline Field subsolution_init(const LocalProblem& problem) {
    const double s = problem.eig.lambda1 * problem.a_alpha;
    if (!(s < problem.model.gamma)) {
        throw InvalidArgument("subsolution_init: lambda1 * a(alpha) >= gamma (H3 violated)");
    }
    const double level = psi_inverse(problem.model, s);
    Field z = problem.eig.e1;
    z *= level;
    const Field lz = neg_laplacian(problem.mesh, z);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (problem.a_alpha * lz[i] > eval_fstar(problem.model, z[i]) + 1e-8) {
            throw ConvergenceError("subsolution_init: z_alpha fails the subsolution inequality at node " +
                                   std::to_string(i));
        }
    }
    return z;
}

inline LocalSolution monotone_solve(const LocalProblem& problem, Side side,
                                    const LocalSolverOptions& options = {}) {
    if (!(options.tol > 0.0)) throw InvalidArgument("monotone_solve: tol must be > 0");
    const Mesh& mesh = problem.mesh;
    const ModelSpec& model = problem.model;
    const double t_star = model.t_star();
    const std::size_t n = mesh.size();

    LocalSolution sol;
    sol.alpha = problem.alpha;
    sol.side = side;
    sol.shift = monotone_shift(model);
    sol.u = side == Side::sub ? subsolution_init(problem) : mesh.constant(t_star);

    const ShiftedLaplacianFactor factor(mesh, problem.a_alpha, sol.shift);
    Field rhs(n);
    Field next(n);
    const double slack = options.monotonicity_slack * std::max(1.0, t_star);
    double prev_increment = 0.0;

    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = eval_fstar(model, sol.u[i]) + sol.shift * sol.u[i];
        factor.solve(rhs, next);

        double increment = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double step = next[i] - sol.u[i];
            if ((side == Side::sub && step < -slack) || (side == Side::super && step > slack)) {
                throw ConvergenceError(std::string("monotone_solve: ") + to_string(side) +
                                       "-side iterate lost monotonicity at node " + std::to_string(i) +
                                       " (step " + std::to_string(step) + ")");
            }
            increment = std::max(increment, std::abs(step));
        }
        std::swap(sol.u, next);
        sol.iterations = it;
        if (options.energy_trace_stride && it % options.energy_trace_stride == 0) {
            sol.energy_trace.push_back(energy(problem, sol.u));
        }

        // Stop on the increment, but only once the contraction-rate estimate says the
        // remaining distance to the limit is also below tol.
        const double rate = prev_increment > 0.0 ? increment / prev_increment : 1.0;
        prev_increment = increment;
        const bool tail_small = rate < 1.0 && increment * rate / (1.0 - rate) <= options.tol;
        if (increment <= options.tol && (tail_small || increment <= 1e-3 * options.tol)) break;
        if (it == options.max_iterations) {
            throw ConvergenceError("monotone_solve: iteration cap " + std::to_string(options.max_iterations) +
                                   " reached (last increment " + std::to_string(increment) + ")");
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!(sol.u[i] > 0.0) || sol.u[i] > t_star + slack) {
            throw ConvergenceError("monotone_solve: solution leaves (0, t_star] at node " + std::to_string(i));
        }
    }
    sol.energy = energy(problem, sol.u);
    sol.sup_residual = local_residual(problem, sol.u);
    return sol;
}

struct EnergyCertificate {
    bool holds = true;
    bool vacuous = false;  ///< γ = +∞ and no ε supplied
    double eps = 0.0;
    double bound = 0.0;
    double energy = 0.0;
};

/// I_k(u) ≤ -½ ε ψ⁻¹(λ₁a(α)+ε)² ∫e₁² (+1e-8 slack), for ε ∈ (0, γ - λ₁a(α)).
/// Without ε: ε = ½(γ - λ₁a(α)) when γ is finite, vacuous when γ = +∞.
inline EnergyCertificate certify_energy_bound(const LocalProblem& problem, double energy_value,
                                              std::optional<double> eps = std::nullopt) {
    EnergyCertificate cert;
    cert.energy = energy_value;
    const double s = problem.eig.lambda1 * problem.a_alpha;
    const double gap = problem.model.gamma - s;
    if (!eps) {
        if (std::isinf(problem.model.gamma)) {
            cert.vacuous = true;
            return cert;
        }
        eps = 0.5 * gap;
    }
    if (!(*eps > 0.0) || !(*eps < gap)) {
        throw InvalidArgument("certify_energy_bound: eps outside (0, gamma - lambda1 a(alpha))");
    }
    const double level = psi_inverse(problem.model, s + *eps);
    cert.eps = *eps;
    cert.bound = -0.5 * *eps * level * level * problem.eig.int_e1_sq;
    cert.holds = energy_value <= cert.bound + 1e-8;
    return cert;
}

inline EnergyCertificate certify_energy_bound(const LocalProblem& problem, const LocalSolution& sol,
                                              std::optional<double> eps = std::nullopt) {
    return certify_energy_bound(problem, sol.energy, eps);
}

}  // namespace kms
