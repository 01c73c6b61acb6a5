#pragma once

// The map 𝒫_k(α) = ∫ u_α^p on each bump (t_{k-1}, t_k): sampling, the pointwise
// bound certificates, bisection for its fixed points and the final assembly of
// ordered solutions of the nonlocal problem.

#include <kms/discretization.hpp>
#include <kms/error.hpp>
#include <kms/linear_solvers.hpp>
#include <kms/local_solver.hpp>
#include <kms/model.hpp>
#include <kms/spectral.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace kms {

/// Immutable inputs shared by every evaluation of 𝒫_k.
struct NonlocalProblem {
    const ModelSpec& model;
    const Mesh& mesh;
    const EigenPack& eig;
    double max_f = 0.0;
    double a_min = 0.0;

    NonlocalProblem(const ModelSpec& m, const Mesh& me, const EigenPack& e,
                    std::optional<double> a_floor = std::nullopt)
        : model(m), mesh(me), eig(e), max_f(kms::max_f(m)), a_min(a_floor.value_or(default_a_min(m))) {}
};

struct Claim2Diagnostic {
    double P_direct = 0.0;
    double P_identity = 0.0;  ///< (1/a(α)) ∫ f★(u_α) w_α
    double gap = 0.0;         ///< relative
    double w_norm = 0.0;
    double w_norm_bound = 0.0;  ///< λ₁^{-1/2} t★^{p-1} |Ω|^{1/2}
    bool w_bound_holds = false;
};

struct PointCertificates {
    double lower_margin = 0.0;  ///< P - lower_bound
    double upper_margin = 0.0;  ///< upper_bound (1 + 1e-6) - P
    Claim2Diagnostic identity;
    double ordering_margin = 0.0;  ///< min(u - z_α)
    EnergyCertificate energy_bound;
    bool all_hold = false;
};

struct CurvePoint {
    double alpha = 0.0;
    double P = 0.0;
    double g = 0.0;
    double a_alpha = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    std::optional<PointCertificates> certificates;
};

struct Evaluation {
    CurvePoint point;
    LocalSolution solution;
};

namespace detail {

inline void check_bump(const ModelSpec& model, int k) {
    if (k < 1 || k > model.K()) {
        throw InvalidArgument("bump index " + std::to_string(k) + " outside 1.." + std::to_string(model.K()));
    }
}

}  // namespace detail

/// Lower bound ψ⁻¹(λ₁a(α))^p ∫e₁^p from the subsolution ordering.
inline double mass_lower_bound(const NonlocalProblem& np, double a_alpha) {
    const double level = psi_inverse(np.model, np.eig.lambda1 * a_alpha);
    return std::pow(level, np.model.p) * np.eig.int_e1_pow_p;
}

/// Upper bound (max f) C₁ t★^{p-1} |Ω|^{1/2} / (a(α) λ₁^{1/2}).
inline double mass_upper_bound(const NonlocalProblem& np, double a_alpha) {
    return np.max_f * np.eig.C1 * std::pow(np.model.t_star(), np.model.p - 1.0) * std::sqrt(np.eig.volume) /
           (a_alpha * std::sqrt(np.eig.lambda1));
}

/// Solves -Δ_h w = u^{p-1} and compares ∫u^p with (1/a(α)) ∫ f★(u) w.
inline Claim2Diagnostic claim2_diagnostic(const NonlocalProblem& np, const LocalProblem& problem,
                                          const LocalSolution& sol) {
    const Mesh& mesh = np.mesh;
    const double p = np.model.p;
    Field rhs(mesh.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = p == 1.0 ? 1.0 : std::pow(sol.u[i], p - 1.0);
    const Field w = solve_shifted(mesh, 1.0, 0.0, rhs, CgOptions{1e-13, 0});

    Claim2Diagnostic d;
    d.P_direct = integrate_power(mesh, sol.u, p);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += eval_fstar(np.model, sol.u[i]) * w[i];
    d.P_identity = acc * mesh.cell_volume() / problem.a_alpha;
    d.gap = std::abs(d.P_direct - d.P_identity) / d.P_direct;
    d.w_norm = std::sqrt(grad_norm_sq(mesh, w));
    d.w_norm_bound = std::pow(np.model.t_star(), p - 1.0) * std::sqrt(np.eig.volume / np.eig.lambda1);
    d.w_bound_holds = d.w_norm <= d.w_norm_bound * (1.0 + 1e-10);
    return d;
}

inline PointCertificates certify_point(const NonlocalProblem& np, const LocalProblem& problem,
                                       const LocalSolution& sol, const CurvePoint& pt) {
    PointCertificates c;
    c.lower_margin = pt.P - pt.lower_bound;
    c.upper_margin = pt.upper_bound * (1.0 + 1e-6) - pt.P;
    c.identity = claim2_diagnostic(np, problem, sol);
    const double level = psi_inverse(np.model, np.eig.lambda1 * problem.a_alpha);
    c.ordering_margin = infinity;
    for (std::size_t i = 0; i < sol.u.size(); ++i) {
        c.ordering_margin = std::min(c.ordering_margin, sol.u[i] - level * np.eig.e1[i]);
    }
    c.energy_bound = certify_energy_bound(problem, sol);
    c.all_hold = c.lower_margin >= -1e-8 && c.upper_margin >= 0.0 && c.identity.gap <= 1e-5 &&
                 c.identity.w_bound_holds && c.ordering_margin >= -1e-8 * np.model.t_star() && c.energy_bound.holds;
    return c;
}

/// 𝒫_k(α) from the sub-side monotone solve, with the pointwise bounds.
inline Evaluation eval_P(const NonlocalProblem& np, int k, double alpha, const LocalSolverOptions& local = {},
                         bool certify = false) {
    detail::check_bump(np.model, k);
    if (!(alpha > np.model.knots[k - 1] && alpha < np.model.knots[k])) {
        throw InvalidArgument("eval_P: alpha " + std::to_string(alpha) + " not inside bump " + std::to_string(k));
    }
    const LocalProblem problem = make_local_problem(np.model, np.mesh, np.eig, alpha, np.a_min);
    Evaluation ev;
    ev.solution = monotone_solve(problem, Side::sub, local);
    CurvePoint& pt = ev.point;
    pt.alpha = alpha;
    pt.a_alpha = problem.a_alpha;
    pt.P = integrate_power(np.mesh, ev.solution.u, np.model.p);
    pt.g = pt.P - alpha;
    pt.lower_bound = mass_lower_bound(np, problem.a_alpha);
    pt.upper_bound = mass_upper_bound(np, problem.a_alpha);
    if (certify) pt.certificates = certify_point(np, problem, ev.solution, pt);
    return ev;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception by index is rethrown, so failures are reported deterministically.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct ScanOptions {
    int n_samples = 64;
    /// Absolute endpoint margin; empty selects 1e-2·(t_k - t_{k-1}).
    std::optional<double> delta;
    LocalSolverOptions local;
    bool certify = false;
    unsigned threads = 0;
};

/// Uniform α-grid on [t_{k-1}+δ, t_k-δ], skipping points with a(α) < a_min; sorted by α.
inline std::vector<CurvePoint> scan_curve(const NonlocalProblem& np, int k, const ScanOptions& options = {}) {
    detail::check_bump(np.model, k);
    const double lo = np.model.knots[k - 1];
    const double hi = np.model.knots[k];
    const double delta = options.delta.value_or(1e-2 * (hi - lo));
    if (options.n_samples < 16) throw InvalidArgument("scan_curve: n_samples must be >= 16");
    if (!(delta > 0.0) || !(delta < 0.25 * (hi - lo))) {
        throw InvalidArgument("scan_curve: delta must lie in (0, (t_k - t_{k-1})/4)");
    }
    std::vector<double> alphas;
    const int n = options.n_samples;
    for (int i = 0; i < n; ++i) {
        const double alpha = i == n - 1 ? hi - delta : lo + delta + (hi - lo - 2.0 * delta) * i / (n - 1);
        if (np.model.a(alpha) >= np.a_min && np.model.a(alpha) > 0.0) alphas.push_back(alpha);
    }
    if (alphas.size() < 2) throw FixedPointError("scan_curve: fewer than 2 admissible sample points");

    std::vector<CurvePoint> curve(alphas.size());
    parallel_for(alphas.size(), options.threads, [&](std::size_t i) {
        curve[i] = eval_P(np, k, alphas[i], options.local, options.certify).point;
    });
    return curve;
}

struct FixedPointBracket {
    double alpha_star = 0.0;
    double g_star = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int bisection_steps = 0;
};

/// Every sign change of g between consecutive curve samples, refined by bisection on
/// g(α) = eval_g(α) until the bracket is narrower than refine_tol and |g| ≤ g_tol
/// (default refine_tol). Throws FixedPointError when fewer than two crossings exist.
template <class EvalG>
std::vector<FixedPointBracket> find_fixed_points(const std::vector<CurvePoint>& curve, double refine_tol,
                                                 EvalG&& eval_g, std::optional<double> g_tol = std::nullopt) {
    if (curve.size() < 2) throw InvalidArgument("find_fixed_points: need at least 2 curve points");
    if (!(refine_tol > 0.0)) throw InvalidArgument("find_fixed_points: refine_tol must be > 0");
    const double g_target = g_tol.value_or(refine_tol);
    if (!(g_target > 0.0)) throw InvalidArgument("find_fixed_points: g_tol must be > 0");
    std::vector<FixedPointBracket> out;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const CurvePoint& left = curve[i];
        const CurvePoint& right = curve[i + 1];
        if ((left.g < 0.0) == (right.g < 0.0)) continue;
        FixedPointBracket b{0.0, 0.0, left.alpha, right.alpha, 0};
        double g_lo = left.g;
        double best_alpha = std::abs(left.g) <= std::abs(right.g) ? left.alpha : right.alpha;
        double best_g = std::abs(left.g) <= std::abs(right.g) ? left.g : right.g;
        for (int step = 0; step < 200; ++step) {
            if (b.hi - b.lo <= refine_tol && std::abs(best_g) <= g_target) break;
            const double mid = 0.5 * (b.lo + b.hi);
            if (mid <= b.lo || mid >= b.hi) break;
            const double gm = eval_g(mid);
            ++b.bisection_steps;
            if (std::abs(gm) < std::abs(best_g)) {
                best_g = gm;
                best_alpha = mid;
            }
            if ((gm < 0.0) == (g_lo < 0.0)) {
                b.lo = mid;
                g_lo = gm;
            } else {
                b.hi = mid;
            }
        }
        b.alpha_star = best_alpha;
        b.g_star = best_g;
        out.push_back(b);
    }
    if (out.size() < 2) {
        std::ostringstream os;
        os << "find_fixed_points: found " << out.size() << " sign change(s) of P(alpha) - alpha, expected >= 2;"
           << " curve (alpha, g):";
        for (const auto& pt : curve) os << " (" << pt.alpha << ", " << pt.g << ")";
        throw FixedPointError(os.str());
    }
    return out;
}

struct FixedPoint {
    int k = 0;
    int index_in_bump = 0;  ///< 1-based, in increasing α
    std::string role;       ///< "alpha_1", "alpha_2" or "extra"
    double alpha_star = 0.0;
    double mass = 0.0;  ///< ∫u^p
    double defect = 0.0;  ///< |𝒫_k(α★) - α★|
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double a_alpha = 0.0;
    double a_of_mass = 0.0;
    double nonlocal_residual = 0.0;
    double local_residual = 0.0;
    double energy = 0.0;
    Field u;
};

struct ChainEntry {
    std::string label;
    double value = 0.0;
};

struct CertificateSummary {
    std::size_t points = 0;
    double lower_min_margin = infinity;
    double upper_min_margin = infinity;
    double identity_max_gap = 0.0;
    double w_norm_min_margin = infinity;
    double ordering_min_margin = infinity;
    double energy_min_margin = infinity;  ///< bound - energy (vacuous points skipped)
    std::size_t energy_vacuous = 0;
    bool all_hold = true;

    void add(const PointCertificates& c) {
        ++points;
        lower_min_margin = std::min(lower_min_margin, c.lower_margin);
        upper_min_margin = std::min(upper_min_margin, c.upper_margin);
        identity_max_gap = std::max(identity_max_gap, c.identity.gap);
        w_norm_min_margin = std::min(w_norm_min_margin, c.identity.w_norm_bound - c.identity.w_norm);
        ordering_min_margin = std::min(ordering_min_margin, c.ordering_margin);
        if (c.energy_bound.vacuous) {
            ++energy_vacuous;
        } else {
            energy_min_margin = std::min(energy_min_margin, c.energy_bound.bound - c.energy_bound.energy);
        }
        all_hold = all_hold && c.all_hold;
    }
};

struct BumpResult {
    int k = 0;
    std::vector<CurvePoint> curve;
    std::vector<FixedPoint> fixed_points;
};

struct TheoremReport {
    HypothesisReport hypotheses;
    bool forced = false;
    std::vector<BumpResult> bumps;
    std::vector<ChainEntry> chain;
    bool chain_holds = false;
    double chain_min_gap = 0.0;
    CertificateSummary certificates;
    double nonlocal_tol = 0.0;
    double refine_tol = 0.0;
    bool nonlocal_holds = false;
    bool defects_hold = false;

    [[nodiscard]] std::size_t solution_count() const {
        std::size_t n = 0;
        for (const auto& b : bumps) n += b.fixed_points.size();
        return n;
    }

    [[nodiscard]] bool all_ok() const {
        return chain_holds && nonlocal_holds && defects_hold && certificates.all_hold;
    }
};

struct TheoremOptions {
    ScanOptions scan;
    /// Endpoint margin as a fraction of the bump width (overridden by scan.delta when set).
    double delta_fraction = 1e-2;
    /// Empty: 1e-8 · t_K.
    std::optional<double> refine_tol;
    /// Empty: 1e-6 · max f.
    std::optional<double> nonlocal_tol;
    bool force = false;
};

/// ‖-a(∫u^p) Δ_h u - f(u)‖_∞.
inline double nonlocal_residual(const ModelSpec& model, const Mesh& mesh, const Field& u) {
    const double a = model.a(integrate_power(mesh, u, model.p));
    const Field lu = neg_laplacian(mesh, u);
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) r = std::max(r, std::abs(a * lu[i] - eval_fstar(model, u[i])));
    return r;
}

/// Scan + bisection on every bump, nonlocal re-check of every fixed point and the ordering chain.
inline TheoremReport assemble_theorem(const NonlocalProblem& np, const TheoremOptions& options = {}) {
    TheoremReport report;
    report.hypotheses = check_hypotheses(np.model, np.eig);
    report.forced = options.force;
    if (!report.hypotheses.all_hold() && !options.force) {
        throw HypothesisVeto("hypotheses fail (" + report.hypotheses.failing() + "); rerun with force to override");
    }
    report.refine_tol = options.refine_tol.value_or(1e-8 * np.model.knots.last());
    report.nonlocal_tol = options.nonlocal_tol.value_or(1e-6 * np.max_f);
    report.nonlocal_holds = true;
    report.defects_hold = true;

    for (int k = 1; k <= np.model.K(); ++k) {
        BumpResult bump;
        bump.k = k;
        ScanOptions scan = options.scan;
        if (!scan.delta) scan.delta = options.delta_fraction * np.model.knots.width(k);
        bump.curve = scan_curve(np, k, scan);
        for (const auto& pt : bump.curve) {
            if (pt.certificates) report.certificates.add(*pt.certificates);
        }

        // The residual of the assembled equation is roughly |a'| |g| |Δu|, and |Δu| ~ f/a is
        // large near the knots, so the defect is driven well below refine_tol.
        const double g_tol = 0.1 * report.refine_tol;
        LocalSolverOptions fine = scan.local;
        fine.tol = std::min(fine.tol, 0.1 * g_tol);
        auto g = [&](double alpha) { return eval_P(np, k, alpha, fine).point.g; };
        std::vector<FixedPointBracket> brackets;
        try {
            brackets = find_fixed_points(bump.curve, report.refine_tol, g, g_tol);
        } catch (const FixedPointError& e) {
            std::ostringstream os;
            os << "bump " << k << ": " << e.what() << "; hypothesis margins:";
            for (const auto& v : report.hypotheses.verdicts) os << ' ' << v.name << '=' << v.margin;
            throw FixedPointError(os.str());
        }

        for (std::size_t i = 0; i < brackets.size(); ++i) {
            const auto& b = brackets[i];
            Evaluation ev = eval_P(np, k, b.alpha_star, fine);
            FixedPoint fp;
            fp.k = k;
            fp.index_in_bump = static_cast<int>(i) + 1;
            fp.role = i == 0 ? "alpha_1" : (i + 1 == brackets.size() ? "alpha_2" : "extra");
            fp.alpha_star = b.alpha_star;
            fp.mass = ev.point.P;
            fp.defect = std::abs(ev.point.g);
            fp.bracket_lo = b.lo;
            fp.bracket_hi = b.hi;
            fp.a_alpha = ev.point.a_alpha;
            fp.a_of_mass = np.model.a(fp.mass);
            fp.nonlocal_residual = nonlocal_residual(np.model, np.mesh, ev.solution.u);
            fp.local_residual = ev.solution.sup_residual;
            fp.energy = ev.solution.energy;
            fp.u = std::move(ev.solution.u);
            report.nonlocal_holds = report.nonlocal_holds && fp.nonlocal_residual <= report.nonlocal_tol;
            report.defects_hold = report.defects_hold && fp.defect <= report.refine_tol;
            bump.fixed_points.push_back(std::move(fp));
        }
        report.bumps.push_back(std::move(bump));
    }

    report.chain.push_back({"0", 0.0});
    for (const auto& bump : report.bumps) {
        const auto& fps = bump.fixed_points;
        report.chain.push_back({"m_" + std::to_string(bump.k) + ",1", fps.front().mass});
        report.chain.push_back({"m_" + std::to_string(bump.k) + ",2", fps.back().mass});
        report.chain.push_back({"t_" + std::to_string(bump.k), np.model.knots[bump.k]});
    }
    report.chain_min_gap = infinity;
    for (std::size_t i = 1; i < report.chain.size(); ++i) {
        report.chain_min_gap = std::min(report.chain_min_gap, report.chain[i].value - report.chain[i - 1].value);
    }
    report.chain_holds = report.chain_min_gap > 0.0;
    if (!report.chain_holds) {
        std::ostringstream os;
        os << "ordering chain violated:";
        for (const auto& e : report.chain) os << ' ' << e.label << '=' << e.value;
        throw FixedPointError(os.str());
    }
    return report;
}

}  // namespace kms
