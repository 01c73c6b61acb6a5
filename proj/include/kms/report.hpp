#pragma once

// JSON and CSV emitters for the CLI artifacts. Non-finite numbers are written
// as the strings "inf", "-inf" or "nan" so every document stays valid JSON.

#include <kms/config.hpp>
#include <kms/fixed_point.hpp>
#include <kms/local_solver.hpp>
#include <kms/model.hpp>
#include <kms/spectral.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

namespace kms {

using nlohmann::json;

inline json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline json eigen_json(const EigenPack& eig) {
    return {{"schema_version", kSchemaVersion},
            {"lambda1", num(eig.lambda1)},
            {"C1", num(eig.C1)},
            {"volume", num(eig.volume)},
            {"p", num(eig.p)},
            {"int_e1_pow_p", num(eig.int_e1_pow_p)}};
}

inline json to_json(const HypothesisReport& r) {
    json verdicts = json::object();
    for (const auto& v : r.verdicts) {
        verdicts[v.name] = {{"holds", v.holds}, {"margin", num(v.margin)}, {"detail", v.detail}};
    }
    json per_bump = json::array();
    for (double v : r.max_at_per_bump) per_bump.push_back(num(v));
    return {{"schema_version", kSchemaVersion},
            {"all_hold", r.all_hold()},
            {"hypotheses", verdicts},
            {"gamma", num(r.gamma)},
            {"max_f", num(r.max_f)},
            {"max_a", num(r.max_a)},
            {"max_at_per_bump", per_bump},
            {"theta", num(r.theta)},
            {"f_non_c1_flag", r.f_non_c1}};
}

inline json example_json(const ModelSpec& model, const HypothesisReport& r) {
    json out = {{"schema_version", kSchemaVersion}, {"model", to_json(to_source(model))}, {"report", to_json(r)}};
    if (const auto* s = std::get_if<Section3F>(&model.f.family())) {
        out["construction"] = {{"A", num(s->A.value_or(NAN))},
                               {"M", num(s->M.value_or(NAN))},
                               {"eta", num(s->eta.value_or(NAN))},
                               {"c", num(s->c.value_or(NAN))}};
    }
    return out;
}

inline json local_json(const LocalProblem& problem, const LocalSolution& sol) {
    return {{"schema_version", kSchemaVersion},
            {"alpha", num(sol.alpha)},
            {"a_alpha", num(problem.a_alpha)},
            {"energy", num(sol.energy)},
            {"sup_residual", num(sol.sup_residual)},
            {"P", num(integrate_power(problem.mesh, sol.u, problem.model.p))},
            {"iterations", sol.iterations},
            {"side", to_string(sol.side)}};
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
    os << "alpha,P,g,a_alpha,lower_bound,upper_bound\n" << std::setprecision(17);
    for (const auto& pt : curve) {
        os << pt.alpha << ',' << pt.P << ',' << pt.g << ',' << pt.a_alpha << ',' << pt.lower_bound << ','
           << pt.upper_bound << '\n';
    }
}

inline std::string solution_file_name(const FixedPoint& fp) {
    return "solution_k" + std::to_string(fp.k) + "_" + std::to_string(fp.index_in_bump) + ".csv";
}

inline json to_json(const CertificateSummary& c) {
    return {{"points", c.points},
            {"lower_min_margin", num(c.lower_min_margin)},
            {"upper_min_margin", num(c.upper_min_margin)},
            {"identity_max_gap", num(c.identity_max_gap)},
            {"w_norm_min_margin", num(c.w_norm_min_margin)},
            {"ordering_min_margin", num(c.ordering_min_margin)},
            {"energy_min_margin", num(c.energy_min_margin)},
            {"energy_vacuous_points", c.energy_vacuous},
            {"all_hold", c.all_hold}};
}

inline json to_json(const TheoremReport& r) {
    json bumps = json::array();
    for (const auto& b : r.bumps) {
        json fps = json::array();
        for (const auto& fp : b.fixed_points) {
            fps.push_back({{"index_in_bump", fp.index_in_bump},
                           {"role", fp.role},
                           {"alpha_star", num(fp.alpha_star)},
                           {"mass", num(fp.mass)},
                           {"defect", num(fp.defect)},
                           {"bracket", {num(fp.bracket_lo), num(fp.bracket_hi)}},
                           {"a_alpha", num(fp.a_alpha)},
                           {"a_of_mass", num(fp.a_of_mass)},
                           {"nonlocal_residual", num(fp.nonlocal_residual)},
                           {"local_residual", num(fp.local_residual)},
                           {"energy", num(fp.energy)},
                           {"sup_u", num(sup_norm(fp.u))},
                           {"field", solution_file_name(fp)}});
        }
        bumps.push_back({{"k", b.k}, {"curve_points", b.curve.size()}, {"fixed_points", fps}});
    }
    json chain = json::array();
    for (const auto& e : r.chain) chain.push_back({{"label", e.label}, {"value", num(e.value)}});
    return {{"schema_version", kSchemaVersion},
            {"solutions", r.solution_count()},
            {"forced", r.forced},
            {"bumps", bumps},
            {"chain", chain},
            {"chain_holds", r.chain_holds},
            {"chain_min_gap", num(r.chain_min_gap)},
            {"refine_tol", num(r.refine_tol)},
            {"defects_hold", r.defects_hold},
            {"nonlocal_tol", num(r.nonlocal_tol)},
            {"nonlocal_holds", r.nonlocal_holds},
            {"certificates", to_json(r.certificates)},
            {"hypotheses", to_json(r.hypotheses)},
            {"all_ok", r.all_ok()}};
}

}  // namespace kms
