#pragma once

// Shared fixtures for the test binaries: reference models and small oracles that
// deliberately avoid the library code they check.

#include <kms/kms.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace kms::test {

inline std::string config_path(const std::string& name) { return std::string(KMS_CONFIG_DIR) + "/" + name; }

/// -u'' on (0, L) with u(0) = u(L) = 0, f(t) = t★ - t, a = 1.
inline double cosh_solution(double x, double length) {
    return 1.0 - std::cosh(x - 0.5 * length) / std::cosh(0.5 * length);
}

/// Model with affine f on one bump (0, t1) and a = amp·sin.
inline ModelSpec affine_model(double t1 = 10.0, double amp = 1.0) {
    Knots knots({t1}, 1.0);
    Coefficient a(SineBumps{{amp}}, knots);
    return make_model(1.0, knots, a, Nonlinearity(AffineF{}, 1.0));
}

/// Rational model with an explicit c.
inline ModelSpec section3_model(std::vector<double> knots, std::vector<double> amps, double gamma, double c,
                                double t_star = 1.0) {
    Knots k(std::move(knots), t_star);
    Coefficient a(SineBumps{std::move(amps)}, k);
    return make_model(1.0, k, a, Nonlinearity(Section3F{gamma, c, {}, {}, {}}, t_star));
}

/// Generated rational model with amplitudes r·γ/λ₁.
inline ModelSpec generated_model(const EigenPack& eig, std::vector<double> knots, double ratio, double gamma = 1.0,
                                 double t_star = 1.0) {
    Knots k(std::move(knots), t_star);
    std::vector<double> amps(static_cast<std::size_t>(k.K()), ratio * gamma / eig.lambda1);
    Coefficient a(SineBumps{amps}, k);
    return generate_example(k, a, gamma, eig, 1.0);
}

/// Dense Newton solve of a (-u_{i-1} + 2u_i - u_{i+1})/h² = f(u_i), i = 1..n, with
/// zero end values. Plain Gaussian elimination with partial pivoting; no library code.
template <class F, class DF>
std::vector<double> dense_newton(double length, int cells, double a, F&& f, DF&& df, std::vector<double> u,
                                 double tol = 1e-14) {
    const int n = cells - 1;
    const double h = length / cells;
    const double k = a / (h * h);
    std::vector<double> jac(static_cast<std::size_t>(n) * n);
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int it = 0; it < 100; ++it) {
        std::fill(jac.begin(), jac.end(), 0.0);
        double rnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double left = i > 0 ? u[i - 1] : 0.0;
            const double right = i + 1 < n ? u[i + 1] : 0.0;
            r[i] = k * (2 * u[i] - left - right) - f(u[i]);
            rnorm = std::max(rnorm, std::abs(r[i]));
            jac[i * n + i] = 2 * k - df(u[i]);
            if (i > 0) jac[i * n + i - 1] = -k;
            if (i + 1 < n) jac[i * n + i + 1] = -k;
        }
        if (rnorm <= tol) return u;
        // Solve jac · d = r, then u -= d.
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int row = col + 1; row < n; ++row) {
                if (std::abs(jac[row * n + col]) > std::abs(jac[piv * n + col])) piv = row;
            }
            if (piv != col) {
                for (int j = 0; j < n; ++j) std::swap(jac[col * n + j], jac[piv * n + j]);
                std::swap(r[col], r[piv]);
            }
            for (int row = col + 1; row < n; ++row) {
                const double m = jac[row * n + col] / jac[col * n + col];
                if (m == 0.0) continue;
                for (int j = col; j < n; ++j) jac[row * n + j] -= m * jac[col * n + j];
                r[row] -= m * r[col];
            }
        }
        for (int row = n - 1; row >= 0; --row) {
            double acc = r[row];
            for (int j = row + 1; j < n; ++j) acc -= jac[row * n + j] * r[j];
            r[row] = acc / jac[row * n + row];
        }
        for (int i = 0; i < n; ++i) u[i] -= r[i];
    }
    return u;
}

/// γ t (1 - t/t★) / (1 + c t) and its derivative, written out independently.
struct Section3Oracle {
    double gamma, c, t_star;
    double f(double t) const { return t >= t_star ? 0.0 : gamma * t * (1 - t / t_star) / (1 + c * t); }
    double df(double t) const {
        if (t >= t_star) return 0.0;
        const double d = 1 + c * t;
        return gamma * ((1 - 2 * t / t_star) * d - c * t * (1 - t / t_star)) / (d * d);
    }
};

}  // namespace kms::test
