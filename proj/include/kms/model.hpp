#pragma once

// Problem data for  -a(∫u^p) Δu = f(u):  the knots where the coefficient a
// vanishes, a itself, the nonlinearity f with its truncation f★ and
// antiderivative F★, the limit γ = lim f(t)/t, the inverse of ψ(t) = f★(t)/t,
// the hypothesis checker and the closed-form example generator.

#include <kms/error.hpp>
#include <kms/spectral.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kms {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Knots

/// 0 = t_0 < t_1 < ... < t_K and the ceiling t★.
class Knots {
public:
    Knots() = default;

    /// `t` may list t_1..t_K or t_0..t_K (a leading 0 is recognised).
    Knots(std::vector<double> t, double t_star) : t_star_(t_star) {
        if (t.empty() || t.front() != 0.0) t.insert(t.begin(), 0.0);
        if (t.size() < 2) throw InvalidArgument("knots: at least one positive knot is required (H0)");
        for (std::size_t k = 1; k < t.size(); ++k) {
            if (!(t[k] > t[k - 1]) || !std::isfinite(t[k])) {
                throw InvalidArgument("knots: t_0 = 0 < t_1 < ... < t_K must be strictly increasing (H0)");
            }
        }
        if (!(t_star > 0.0) || !std::isfinite(t_star)) {
            throw InvalidArgument("knots: t_star must be > 0 (H0)");
        }
        t_ = std::move(t);
    }

    [[nodiscard]] int K() const noexcept { return static_cast<int>(t_.size()) - 1; }
    /// t_k for k = 0..K.
    [[nodiscard]] double operator[](int k) const { return t_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return t_; }
    [[nodiscard]] double t_star() const noexcept { return t_star_; }
    [[nodiscard]] double last() const noexcept { return t_.back(); }
    [[nodiscard]] double width(int k) const { return (*this)[k] - (*this)[k - 1]; }

    friend bool operator==(const Knots&, const Knots&) = default;

private:
    std::vector<double> t_{0.0, 1.0};
    double t_star_ = 1.0;
};

// ---------------------------------------------------------------------------
// Piecewise-linear tables

struct Table {
    std::vector<std::array<double, 2>> points;

    friend bool operator==(const Table&, const Table&) = default;

    void validate(const char* what) const {
        if (points.size() < 2) throw InvalidArgument(std::string(what) + ": table needs >= 2 points");
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (!(points[i][0] > points[i - 1][0])) {
                throw InvalidArgument(std::string(what) + ": table abscissae must be strictly increasing");
            }
        }
    }

    [[nodiscard]] double front() const { return points.front()[0]; }
    [[nodiscard]] double back() const { return points.back()[0]; }

    /// Linear interpolation; `outside` is returned beyond the tabulated range.
    [[nodiscard]] double operator()(double t, double outside = 0.0) const {
        if (t < points.front()[0] || t > points.back()[0]) return outside;
        auto it = std::upper_bound(points.begin(), points.end(), t,
                                   [](double v, const std::array<double, 2>& p) { return v < p[0]; });
        if (it == points.end()) return points.back()[1];
        if (it == points.begin()) return points.front()[1];
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double s = (t - lo[0]) / (hi[0] - lo[0]);
        return lo[1] + s * (hi[1] - lo[1]);
    }

    /// Exact ∫_{front}^{s} of the interpolant, s clamped to the table range.
    [[nodiscard]] double integral_to(double s) const {
        double sum = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            const double a = points[i - 1][0];
            if (s <= a) break;
            const double b = std::min(points[i][0], s);
            sum += 0.5 * ((*this)(a) + (*this)(b)) * (b - a);
        }
        return sum;
    }
};

// ---------------------------------------------------------------------------
// Coefficient a

/// a(t) = A_k sin(π (t - t_{k-1}) / (t_k - t_{k-1})) on [t_{k-1}, t_k], zero beyond t_K.
struct SineBumps {
    std::vector<double> amplitudes;
    friend bool operator==(const SineBumps&, const SineBumps&) = default;
};

class Coefficient {
public:
    using Family = std::variant<SineBumps, Table>;

    Coefficient() = default;

    Coefficient(Family family, const Knots& knots) : family_(std::move(family)), knots_(knots) {
        if (const auto* b = std::get_if<SineBumps>(&family_)) {
            if (static_cast<int>(b->amplitudes.size()) != knots.K()) {
                throw InvalidArgument("coefficient a: need one amplitude per bump (" +
                                      std::to_string(knots.K()) + ")");
            }
            for (double amp : b->amplitudes) {
                if (!(amp > 0.0)) throw InvalidArgument("coefficient a: amplitudes must be > 0");
            }
        } else {
            const auto& table = std::get<Table>(family_);
            table.validate("coefficient a");
            if (table.front() > 0.0 || table.back() < knots.last()) {
                throw InvalidArgument("coefficient a: table must cover [0, t_K]");
            }
        }
    }

    [[nodiscard]] double operator()(double t) const {
        if (const auto* b = std::get_if<SineBumps>(&family_)) {
            if (t <= 0.0 || t >= knots_.last()) return 0.0;
            const auto& kt = knots_.values();
            const auto it = std::upper_bound(kt.begin(), kt.end(), t);
            const auto k = static_cast<std::size_t>(it - kt.begin());  // t in [t_{k-1}, t_k)
            const double lo = kt[k - 1];
            const double hi = kt[k];
            return b->amplitudes[k - 1] * std::sin(M_PI * (t - lo) / (hi - lo));
        }
        return std::get<Table>(family_)(t, 0.0);
    }

    [[nodiscard]] const Family& family() const noexcept { return family_; }

    friend bool operator==(const Coefficient& lhs, const Coefficient& rhs) {
        return lhs.family_ == rhs.family_ && lhs.knots_ == rhs.knots_;
    }

private:
    Family family_{SineBumps{{1.0}}};
    Knots knots_;
};

// ---------------------------------------------------------------------------
// Nonlinearity f

/// f(t) = γ t (1 - t/t★) / (1 + c t); the remaining fields record how c was chosen.
struct Section3F {
    double gamma = 1.0;
    std::optional<double> c;  ///< empty: generator request, filled by generate_example
    std::optional<double> eta;
    std::optional<double> A;
    std::optional<double> M;
    friend bool operator==(const Section3F&, const Section3F&) = default;
};

/// f(t) = t★ - t.
struct AffineF {
    friend bool operator==(const AffineF&, const AffineF&) = default;
};

/// f(t) = t (t★ - t).
struct LogisticF {
    friend bool operator==(const LogisticF&, const LogisticF&) = default;
};

class Nonlinearity {
public:
    using Family = std::variant<Section3F, AffineF, LogisticF, Table>;

    Nonlinearity() = default;

    Nonlinearity(Family family, double t_star) : family_(std::move(family)), t_star_(t_star) {
        if (!(t_star > 0.0)) throw InvalidArgument("nonlinearity: t_star must be > 0");
        if (const auto* s = std::get_if<Section3F>(&family_)) {
            if (!(s->gamma > 0.0) || !std::isfinite(s->gamma)) {
                throw InvalidArgument("nonlinearity: section3 gamma must be finite and > 0");
            }
            if (s->c && !(*s->c >= 0.0)) throw InvalidArgument("nonlinearity: section3 c must be >= 0");
        } else if (const auto* t = std::get_if<Table>(&family_)) {
            t->validate("nonlinearity f");
            if (t->front() > 0.0 || t->back() < t_star) {
                throw InvalidArgument("nonlinearity f: table must cover [0, t_star]");
            }
        }
    }

    /// True when c still has to be chosen by generate_example.
    [[nodiscard]] bool is_generator_request() const noexcept {
        const auto* s = std::get_if<Section3F>(&family_);
        return s != nullptr && !s->c;
    }

    /// Raw f on [0, t★] (used where f★ coincides with f).
    [[nodiscard]] double f(double t) const {
        return std::visit(
            [&](const auto& fam) -> double {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, Section3F>) {
                    if (!fam.c) throw InvalidArgument("nonlinearity: section3 c not yet generated");
                    return fam.gamma * t * (1.0 - t / t_star_) / (1.0 + *fam.c * t);
                } else if constexpr (std::is_same_v<T, AffineF>) {
                    return t_star_ - t;
                } else if constexpr (std::is_same_v<T, LogisticF>) {
                    return t * (t_star_ - t);
                } else {
                    return fam(t, 0.0);
                }
            },
            family_);
    }

    /// Closed-form γ when the family provides one.
    [[nodiscard]] std::optional<double> closed_form_gamma() const {
        return std::visit(
            [&](const auto& fam) -> std::optional<double> {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, Section3F>) {
                    return fam.gamma;
                } else if constexpr (std::is_same_v<T, AffineF>) {
                    return infinity;
                } else if constexpr (std::is_same_v<T, LogisticF>) {
                    return t_star_;
                } else {
                    return std::nullopt;
                }
            },
            family_);
    }

    /// Closed-form F(s) = ∫_0^s f for 0 ≤ s ≤ t★, when available.
    [[nodiscard]] std::optional<double> closed_form_F(double s) const {
        return std::visit(
            [&](const auto& fam) -> std::optional<double> {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, Section3F>) {
                    const double c = fam.c.value_or(0.0);
                    // Below c·s ~ 1e-3 the log form cancels badly.
                    if (c * s < 1e-3) return std::nullopt;
                    const double k = 1.0 / (c * c) + t_star_ / c;
                    return fam.gamma / t_star_ *
                           (-s * s / (2.0 * c) + k * s - k * std::log1p(c * s) / c);
                } else if constexpr (std::is_same_v<T, AffineF>) {
                    return t_star_ * s - 0.5 * s * s;
                } else if constexpr (std::is_same_v<T, LogisticF>) {
                    return 0.5 * t_star_ * s * s - s * s * s / 3.0;
                } else {
                    return fam.integral_to(s);
                }
            },
            family_);
    }

    [[nodiscard]] bool is_table() const noexcept { return std::holds_alternative<Table>(family_); }
    [[nodiscard]] const Family& family() const noexcept { return family_; }
    [[nodiscard]] double t_star() const noexcept { return t_star_; }

    friend bool operator==(const Nonlinearity& lhs, const Nonlinearity& rhs) {
        return lhs.family_ == rhs.family_ && lhs.t_star_ == rhs.t_star_;
    }

private:
    Family family_{AffineF{}};
    double t_star_ = 1.0;
};

// ---------------------------------------------------------------------------
// ModelSpec

struct ModelSpec {
    double p = 1.0;
    Knots knots;
    Coefficient a;
    Nonlinearity f;
    double gamma = infinity;  ///< lim_{t→0+} f(t)/t

    friend bool operator==(const ModelSpec& lhs, const ModelSpec& rhs) {
        return lhs.p == rhs.p && lhs.knots == rhs.knots && lhs.a == rhs.a && lhs.f == rhs.f;
    }

    [[nodiscard]] double t_star() const noexcept { return knots.t_star(); }
    [[nodiscard]] int K() const noexcept { return knots.K(); }
};

/// f★: f(0) below 0, f on (0, t★), 0 from t★ on.
inline double eval_fstar(const Nonlinearity& f, double t) {
    if (t <= 0.0) return f.f(0.0);
    if (t >= f.t_star()) return 0.0;
    return f.f(t);
}

inline double eval_fstar(const ModelSpec& model, double t) { return eval_fstar(model.f, t); }

/// Adaptive Simpson quadrature of fn on [a, b].
template <class Fn>
double adaptive_simpson(Fn&& fn, double a, double b, double rel_tol = 1e-10, int max_depth = 50) {
    const double fa = fn(a);
    const double fb = fn(b);
    const double m = 0.5 * (a + b);
    const double fm = fn(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max(std::abs(whole), std::numeric_limits<double>::min());
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double est, double tol,
            int depth) -> double {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid);
        const double rm = 0.5 * (mid + hi);
        const double flm = fn(lm);
        const double frm = fn(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        const double diff = left + right - est;
        if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1) +
               rec(mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1);
    };
    return rec(a, b, fa, fm, fb, whole, rel_tol * scale, max_depth);
}

/// F★(s) = ∫_0^s f★.
inline double eval_Fstar(const Nonlinearity& f, double s) {
    if (s <= 0.0) return f.f(0.0) * s;
    const double upper = std::min(s, f.t_star());
    if (auto closed = f.closed_form_F(upper)) return *closed;
    return adaptive_simpson([&](double t) { return f.f(t); }, 0.0, upper, 1e-10);
}

inline double eval_Fstar(const ModelSpec& model, double s) { return eval_Fstar(model.f, s); }

/// γ = lim_{t→0+} f(t)/t: +∞ when f(0) > 0, otherwise Richardson extrapolation of
/// f(t)/t over t = t★·2^{-j}, j = 10..20.
inline double gamma_of(const Nonlinearity& f) {
    if (f.f(0.0) > 0.0) return infinity;
    constexpr int first = 10;
    constexpr int last = 20;
    constexpr int order = 2;
    std::vector<std::array<double, order + 1>> table;
    for (int j = first; j <= last; ++j) {
        const double t = f.t_star() * std::ldexp(1.0, -j);
        std::array<double, order + 1> row{};
        row[0] = f.f(t) / t;
        for (int m = 1; m <= order && !table.empty(); ++m) {
            const double w = std::ldexp(1.0, m);
            row[m] = (w * row[m - 1] - table.back()[m - 1]) / (w - 1.0);
        }
        table.push_back(row);
    }
    const double best = table.back()[order];
    const double prev = table[table.size() - 2][order];
    if (!std::isfinite(best) || std::abs(best - prev) > 1e-8 * std::max(1.0, std::abs(best))) {
        throw ConvergenceError("gamma_of: extrapolation of f(t)/t did not converge");
    }
    return best;
}

/// ψ(t) = f★(t)/t.
inline double eval_psi(const ModelSpec& model, double t) { return eval_fstar(model, t) / t; }

/// The unique t ∈ (0, t★) with f★(t)/t = s, for s ∈ (0, γ).
inline double psi_inverse(const ModelSpec& model, double s) {
    if (!(s > 0.0) || !(s < model.gamma)) {
        throw InvalidArgument("psi_inverse: argument " + std::to_string(s) + " outside (0, gamma)");
    }
    double lo = 0.0;
    double hi = model.t_star();
    const double tol = 1e-15 * model.t_star();
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (eval_psi(model, mid) > s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Interval maxima

struct IntervalMax {
    double argmax = 0.0;
    double value = -infinity;
};

/// Dense scan with `samples` subintervals, then golden-section refinement around the best sample.
template <class Fn>
IntervalMax interval_max(Fn&& fn, double lo, double hi, int samples = 10000) {
    IntervalMax best;
    const double step = (hi - lo) / samples;
    int best_i = 0;
    for (int i = 0; i <= samples; ++i) {
        const double t = i == samples ? hi : lo + i * step;
        const double v = fn(t);
        if (v > best.value) {
            best = {t, v};
            best_i = i;
        }
    }
    double a = lo + std::max(0, best_i - 1) * step;
    double b = std::min(hi, lo + (best_i + 1) * step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fn(d);
        }
    }
    const double t = 0.5 * (a + b);
    const double v = fn(t);
    if (v > best.value) best = {t, v};
    return best;
}

inline double max_f(const ModelSpec& model) {
    return interval_max([&](double t) { return eval_fstar(model, t); }, 0.0, model.t_star()).value;
}

/// max_{[t_{k-1}, t_k]} a(t)·t.
inline IntervalMax max_at_on_bump(const ModelSpec& model, int k) {
    return interval_max([&](double t) { return model.a(t) * t; }, model.knots[k - 1], model.knots[k]);
}

inline double max_a(const ModelSpec& model) {
    double m = 0.0;
    for (int k = 1; k <= model.K(); ++k) {
        m = std::max(m, interval_max([&](double t) { return model.a(t); }, model.knots[k - 1],
                                     model.knots[k])
                            .value);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Hypotheses

struct HypothesisVerdict {
    std::string name;
    bool holds = false;
    double margin = 0.0;
    std::string detail;
};

struct HypothesisReport {
    std::array<HypothesisVerdict, 5> verdicts;
    double gamma = infinity;
    double max_f = 0.0;
    double max_a = 0.0;
    std::vector<double> max_at_per_bump;
    double theta = 0.0;  ///< (C₁/λ₁^{1/2}) t★^{p-1} |Ω|^{1/2} max f
    bool f_non_c1 = false;

    [[nodiscard]] bool all_hold() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.holds; });
    }

    [[nodiscard]] std::string failing() const {
        std::string out;
        for (const auto& v : verdicts) {
            if (!v.holds) out += (out.empty() ? "" : ", ") + v.name;
        }
        return out;
    }
};

namespace detail {

inline constexpr int kHypothesisSamples = 1000;

inline HypothesisVerdict check_h0(const ModelSpec& model) {
    HypothesisVerdict v{"H0", true, infinity, ""};
    double zero_defect = 0.0;
    for (int k = 1; k <= model.K(); ++k) zero_defect = std::max(zero_defect, std::abs(model.a(model.knots[k])));
    zero_defect = std::max(zero_defect, std::abs(model.f.f(model.t_star())));
    double min_a = infinity;
    for (int k = 1; k <= model.K(); ++k) {
        const double lo = model.knots[k - 1];
        const double hi = model.knots[k];
        for (int i = 1; i <= kHypothesisSamples; ++i) {
            min_a = std::min(min_a, model.a(lo + (hi - lo) * i / (kHypothesisSamples + 1.0)));
        }
    }
    double min_f = infinity;
    for (int i = 1; i <= kHypothesisSamples; ++i) {
        min_f = std::min(min_f, model.f.f(model.t_star() * i / (kHypothesisSamples + 1.0)));
    }
    if (zero_defect > 1e-12) {
        v.holds = false;
        v.margin = -zero_defect;
        v.detail = "a(t_k) or f(t_star) differs from zero";
        return v;
    }
    v.margin = std::min(min_a, min_f);
    v.holds = v.margin > 0.0;
    v.detail = v.holds ? "a > 0 on every bump, f > 0 on (0, t_star)"
                       : (min_a <= 0.0 ? "a not positive inside a bump" : "f not positive on (0, t_star)");
    return v;
}

inline HypothesisVerdict check_h1(const ModelSpec& model) {
    HypothesisVerdict v{"H1", true, infinity, "f(t)/t strictly decreasing on (0, t_star)"};
    double prev = 0.0;
    for (int i = 1; i <= kHypothesisSamples; ++i) {
        const double t = model.t_star() * i / (kHypothesisSamples + 1.0);
        const double psi = model.f.f(t) / t;
        if (i > 1) v.margin = std::min(v.margin, prev - psi);
        prev = psi;
    }
    v.holds = v.margin > 0.0;
    if (!v.holds) v.detail = "f(t)/t is not strictly decreasing";
    return v;
}

}  // namespace detail

inline HypothesisReport check_hypotheses(const ModelSpec& model, const EigenPack& eig) {
    HypothesisReport r;
    r.gamma = model.gamma;
    r.max_f = max_f(model);
    r.max_a = max_a(model);
    r.f_non_c1 = model.f.is_table();
    r.verdicts[0] = detail::check_h0(model);
    r.verdicts[1] = detail::check_h1(model);

    const double h2 = std::pow(model.t_star(), model.p) * eig.int_e1_pow_p - model.knots.last();
    r.verdicts[2] = {"H2", h2 > 0.0, h2, "t_K < t_star^p * int e1^p"};

    const double h3 = std::isinf(model.gamma) ? infinity : model.gamma / eig.lambda1 - r.max_a;
    r.verdicts[3] = {"H3", h3 > 0.0, h3, "max a on [0, t_K] < gamma / lambda1"};

    const double geometry = std::sqrt(eig.lambda1) / (eig.C1 * std::sqrt(eig.volume));
    const double lhs = r.max_f * std::pow(model.t_star(), model.p - 1.0);
    r.theta = lhs / geometry;
    double h4 = infinity;
    for (int k = 1; k <= model.K(); ++k) {
        const double at = max_at_on_bump(model, k).value;
        r.max_at_per_bump.push_back(at);
        h4 = std::min(h4, geometry * at - lhs);
    }
    r.verdicts[4] = {"H4", h4 > 0.0, h4,
                     "max f * t_star^(p-1) < lambda1^(1/2) / (C1 |Omega|^(1/2)) * max a(t) t, every bump"};
    return r;
}

/// Fills ModelSpec::gamma from the closed form, or by extrapolation.
inline ModelSpec make_model(double p, Knots knots, Coefficient a, Nonlinearity f) {
    if (!(p >= 1.0)) throw InvalidArgument("model: p must be >= 1");
    ModelSpec m{p, std::move(knots), std::move(a), std::move(f), infinity};
    const auto closed = m.f.closed_form_gamma();
    m.gamma = closed ? *closed : gamma_of(m.f);
    if (m.f.t_star() != m.knots.t_star()) throw InvalidArgument("model: inconsistent t_star");
    return m;
}

/// Builds f(t) = γ t (1 - t/t★)/(1 + c t) from the bump data so that (H0)-(H4) hold.
inline ModelSpec generate_example(const Knots& knots, const Coefficient& a, double gamma,
                                  const EigenPack& eig, double p) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("generate_example: gamma must be finite and > 0");
    }
    // Placeholder f to evaluate the a-only hypotheses.
    ModelSpec probe = make_model(p, knots, a, Nonlinearity(LogisticF{}, knots.t_star()));
    probe.gamma = gamma;
    const auto pre = check_hypotheses(probe, eig);
    std::string blocked;
    if (!pre.verdicts[2].holds) blocked += " H2";
    if (pre.verdicts[0].margin <= 0.0) blocked += " H0";
    if (!pre.verdicts[3].holds) blocked += " H3";
    if (!blocked.empty()) {
        throw InvalidArgument("generate_example: preconditions violated:" + blocked);
    }

    const double t_star = knots.t_star();
    double A = infinity;
    for (int k = 1; k <= knots.K(); ++k) A = std::min(A, max_at_on_bump(probe, k).value);
    const double M = std::sqrt(eig.lambda1) * A /
                     (eig.C1 * std::sqrt(eig.volume) * std::pow(t_star, p - 1.0));
    const double eta = 1.01 * std::max({gamma / M, t_star / M, 1.0 / t_star + 1.0 / gamma});
    const double c = eta * eta * gamma - (gamma / t_star + 1.0) * eta;

    Section3F fam{gamma, c, eta, A, M};
    ModelSpec model = make_model(p, knots, a, Nonlinearity(fam, t_star));
    const auto report = check_hypotheses(model, eig);
    if (!report.all_hold()) {
        throw InvalidArgument("generate_example: generated model fails " + report.failing());
    }
    return model;
}

/// Completes a section3 generator request (no c given); other models are returned unchanged.
inline ModelSpec resolve_model(const ModelSpec& model, const EigenPack& eig) {
    if (!model.f.is_generator_request()) return model;
    const auto& s3 = std::get<Section3F>(model.f.family());
    return generate_example(model.knots, model.a, s3.gamma, eig, model.p);
}

}  // namespace kms
