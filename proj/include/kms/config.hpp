#pragma once

// Run configuration: JSON schema, validation with field-path messages, and the
// inverse emission used for manifests (parse(emit(c)) == c).
//
//   {
//     "schema_version": 1,
//     "domain": {"dimension": 1, "extent": [3.141592653589793], "cells": [512]},
//     "model": {
//       "p": 1, "knots": [0.5, 1.0], "t_star": 1.0,
//       "a": {"type": "bumps", "amplitudes": [0.9, 0.9]}
//          | {"type": "table", "points": [[t, a], ...]},
//       "f": {"type": "section3", "gamma": 1.0 [, "c": ...]}
//          | {"type": "affine" [, "t_star": ...]} | {"type": "logistic"}
//          | {"type": "table", "points": [[t, f], ...]}
//     },
//     "solver": {"local_tol": 1e-10, "eigen_tol": 1e-10, "refine_tol": null,
//                "nonlocal_tol": null, "a_min_fraction": 1e-6,
//                "delta_fraction": 1e-2, "n_samples": 64},
//     "output_dir": "kms_out",
//     "force": false
//   }
//
// A section3 f without "c" asks the example generator to choose c.

#include <kms/discretization.hpp>
#include <kms/error.hpp>
#include <kms/model.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kms {

inline constexpr int kSchemaVersion = 1;

struct SolverSettings {
    double local_tol = 1e-10;
    double eigen_tol = 1e-10;
    std::optional<double> refine_tol;    ///< empty: 1e-8 · t_K
    std::optional<double> nonlocal_tol;  ///< empty: 1e-6 · max f
    double a_min_fraction = 1e-6;
    double delta_fraction = 1e-2;
    int n_samples = 64;

    friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

struct ModelSource {
    double p = 1.0;
    std::vector<double> knots;  ///< t_1..t_K
    double t_star = 1.0;
    Coefficient::Family a = SineBumps{};
    Nonlinearity::Family f = AffineF{};

    friend bool operator==(const ModelSource&, const ModelSource&) = default;
};

struct RunConfig {
    DomainSpec domain;
    ModelSource model;
    SolverSettings solver;
    std::string output_dir = "kms_out";
    bool force = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// ModelSpec from the configuration; section3 generator requests stay unresolved
/// (see resolve_model).
inline ModelSpec build_model(const ModelSource& src) {
    Knots knots(src.knots, src.t_star);
    Coefficient a(src.a, knots);
    Nonlinearity f(src.f, src.t_star);
    return make_model(src.p, std::move(knots), std::move(a), std::move(f));
}

namespace detail {

using json = nlohmann::json;

class JsonReader {
public:
    JsonReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg); }

    [[nodiscard]] std::string child(const std::string& key) const { return path_ + "." + key; }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    void allow(std::initializer_list<const char*> keys) const {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!allowed.count(it.key())) throw ConfigError(child(it.key()), "unknown key");
        }
    }

    [[nodiscard]] const json& at(const std::string& key) const {
        if (!j_.contains(key)) throw ConfigError(child(key), "missing required field");
        return j_.at(key);
    }

    [[nodiscard]] double number(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(child(key), "expected a number");
        return v.get<double>();
    }

    [[nodiscard]] double positive(const std::string& key) const {
        const double v = number(key);
        if (!(v > 0.0)) throw ConfigError(child(key), "must be strictly positive");
        return v;
    }

    [[nodiscard]] int integer(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
        return v.get<int>();
    }

    [[nodiscard]] std::string string(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(child(key), "expected a string");
        return v.get<std::string>();
    }

    [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_array()) throw ConfigError(child(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(child(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    [[nodiscard]] Table table(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_array()) throw ConfigError(child(key), "expected an array of [t, value] pairs");
        Table t;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const json& row = v[i];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
                throw ConfigError(child(key) + "[" + std::to_string(i) + "]", "expected [t, value]");
            }
            t.points.push_back({row[0].get<double>(), row[1].get<double>()});
        }
        try {
            t.validate("table");
        } catch (const InvalidArgument& e) {
            throw ConfigError(child(key), e.what());
        }
        return t;
    }

    [[nodiscard]] const std::string& path() const noexcept { return path_; }
    [[nodiscard]] const json& raw() const noexcept { return j_; }

private:
    const json& j_;
    std::string path_;
};

inline DomainSpec parse_domain(const JsonReader& r) {
    r.allow({"dimension", "extent", "cells"});
    DomainSpec d;
    d.dimension = r.integer("dimension");
    if (d.dimension != 1 && d.dimension != 2) throw ConfigError(r.child("dimension"), "must be 1 or 2");
    const auto extent = r.numbers("extent");
    const json& cells = r.at("cells");
    if (extent.size() != static_cast<std::size_t>(d.dimension)) {
        throw ConfigError(r.child("extent"), "needs one length per axis");
    }
    if (!cells.is_array() || cells.size() != static_cast<std::size_t>(d.dimension)) {
        throw ConfigError(r.child("cells"), "needs one cell count per axis");
    }
    for (int i = 0; i < d.dimension; ++i) {
        if (!(extent[i] > 0.0)) throw ConfigError(r.child("extent"), "lengths must be strictly positive");
        if (!cells[i].is_number_integer() || cells[i].get<int>() < 4) {
            throw ConfigError(r.child("cells"), "cell counts must be integers >= 4");
        }
        d.extent[i] = extent[i];
        d.cells[i] = cells[i].get<int>();
    }
    if (d.dimension == 1) {
        d.extent[1] = 1.0;
        d.cells[1] = 1;
    }
    return d;
}

inline ModelSource parse_model_source(const JsonReader& r) {
    r.allow({"p", "knots", "t_star", "a", "f"});
    ModelSource m;
    m.p = r.number("p");
    if (!(m.p >= 1.0)) throw ConfigError(r.child("p"), "must be >= 1");
    m.knots = r.numbers("knots");
    if (!m.knots.empty() && m.knots.front() == 0.0) m.knots.erase(m.knots.begin());
    if (m.knots.empty()) throw ConfigError(r.child("knots"), "at least one positive knot is required (H0)");
    double prev = 0.0;
    for (double t : m.knots) {
        if (!(t > prev)) {
            throw ConfigError(r.child("knots"), "knots must satisfy 0 = t_0 < t_1 < ... < t_K (H0)");
        }
        prev = t;
    }
    m.t_star = r.positive("t_star");

    const JsonReader a(r.at("a"), r.child("a"));
    const std::string a_type = a.string("type");
    if (a_type == "bumps") {
        a.allow({"type", "amplitudes"});
        SineBumps b{a.numbers("amplitudes")};
        if (b.amplitudes.size() != m.knots.size()) {
            throw ConfigError(a.child("amplitudes"), "needs one amplitude per bump");
        }
        for (double amp : b.amplitudes) {
            if (!(amp > 0.0)) throw ConfigError(a.child("amplitudes"), "amplitudes must be strictly positive");
        }
        m.a = b;
    } else if (a_type == "table") {
        a.allow({"type", "points"});
        m.a = a.table("points");
    } else {
        throw ConfigError(a.child("type"), "unknown coefficient type '" + a_type + "'");
    }

    const JsonReader f(r.at("f"), r.child("f"));
    const std::string f_type = f.string("type");
    if (f_type == "section3") {
        f.allow({"type", "gamma", "c"});
        Section3F s;
        s.gamma = f.positive("gamma");
        if (f.has("c")) {
            s.c = f.number("c");
            if (!(*s.c >= 0.0)) throw ConfigError(f.child("c"), "must be >= 0");
        }
        m.f = s;
    } else if (f_type == "affine") {
        f.allow({"type", "t_star"});
        if (f.has("t_star") && f.number("t_star") != m.t_star) {
            throw ConfigError(f.child("t_star"), "must equal model.t_star");
        }
        m.f = AffineF{};
    } else if (f_type == "logistic") {
        f.allow({"type"});
        m.f = LogisticF{};
    } else if (f_type == "table") {
        f.allow({"type", "points"});
        m.f = f.table("points");
    } else {
        throw ConfigError(f.child("type"), "unknown nonlinearity type '" + f_type + "'");
    }
    return m;
}

inline SolverSettings parse_solver(const JsonReader& r) {
    r.allow({"local_tol", "eigen_tol", "refine_tol", "nonlocal_tol", "a_min_fraction", "delta_fraction",
             "n_samples"});
    SolverSettings s;
    if (r.has("local_tol")) s.local_tol = r.positive("local_tol");
    if (r.has("eigen_tol")) s.eigen_tol = r.positive("eigen_tol");
    if (r.has("refine_tol")) s.refine_tol = r.positive("refine_tol");
    if (r.has("nonlocal_tol")) s.nonlocal_tol = r.positive("nonlocal_tol");
    if (r.has("a_min_fraction")) s.a_min_fraction = r.positive("a_min_fraction");
    if (r.has("delta_fraction")) {
        s.delta_fraction = r.positive("delta_fraction");
        if (!(s.delta_fraction < 0.25)) throw ConfigError(r.child("delta_fraction"), "must be < 0.25");
    }
    if (r.has("n_samples")) {
        s.n_samples = r.integer("n_samples");
        if (s.n_samples < 16) throw ConfigError(r.child("n_samples"), "must be >= 16");
    }
    return s;
}

inline json table_json(const Table& t) {
    json pts = json::array();
    for (const auto& p : t.points) pts.push_back({p[0], p[1]});
    return pts;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    const detail::JsonReader r(j, "$");
    r.allow({"schema_version", "domain", "model", "solver", "output_dir", "force"});
    if (r.has("schema_version") && r.integer("schema_version") != kSchemaVersion) {
        throw ConfigError(r.child("schema_version"), "unsupported schema version");
    }
    RunConfig c;
    c.domain = detail::parse_domain(detail::JsonReader(r.at("domain"), r.child("domain")));
    c.model = detail::parse_model_source(detail::JsonReader(r.at("model"), r.child("model")));
    if (r.has("solver")) c.solver = detail::parse_solver(detail::JsonReader(r.at("solver"), r.child("solver")));
    if (r.has("output_dir")) c.output_dir = r.string("output_dir");
    if (r.has("force")) {
        if (!r.at("force").is_boolean()) throw ConfigError(r.child("force"), "expected a boolean");
        c.force = r.at("force").get<bool>();
    }
    // Cross-field checks the model constructors would otherwise report without a path.
    try {
        (void)build_model(c.model);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(r.child("model"), e.what());
    }
    return c;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open configuration file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline nlohmann::json to_json(const ModelSource& m) {
    using nlohmann::json;
    json a;
    if (const auto* b = std::get_if<SineBumps>(&m.a)) {
        a = {{"type", "bumps"}, {"amplitudes", b->amplitudes}};
    } else {
        a = {{"type", "table"}, {"points", detail::table_json(std::get<Table>(m.a))}};
    }
    json f;
    if (const auto* s = std::get_if<Section3F>(&m.f)) {
        f = {{"type", "section3"}, {"gamma", s->gamma}};
        if (s->c) f["c"] = *s->c;
    } else if (std::holds_alternative<AffineF>(m.f)) {
        f = {{"type", "affine"}};
    } else if (std::holds_alternative<LogisticF>(m.f)) {
        f = {{"type", "logistic"}};
    } else {
        f = {{"type", "table"}, {"points", detail::table_json(std::get<Table>(m.f))}};
    }
    return {{"p", m.p}, {"knots", m.knots}, {"t_star", m.t_star}, {"a", a}, {"f", f}};
}

inline ModelSource to_source(const ModelSpec& model) {
    ModelSource m;
    m.p = model.p;
    m.knots.assign(model.knots.values().begin() + 1, model.knots.values().end());
    m.t_star = model.t_star();
    m.a = model.a.family();
    m.f = model.f.family();
    if (auto* s = std::get_if<Section3F>(&m.f)) {
        // construction record is not part of the schema
        s->eta.reset();
        s->A.reset();
        s->M.reset();
    }
    return m;
}

inline nlohmann::json to_json(const RunConfig& c) {
    using nlohmann::json;
    json domain = {{"dimension", c.domain.dimension}};
    json extent = json::array();
    json cells = json::array();
    for (int i = 0; i < c.domain.dimension; ++i) {
        extent.push_back(c.domain.extent[i]);
        cells.push_back(c.domain.cells[i]);
    }
    domain["extent"] = extent;
    domain["cells"] = cells;
    json solver = {{"local_tol", c.solver.local_tol},
                   {"eigen_tol", c.solver.eigen_tol},
                   {"a_min_fraction", c.solver.a_min_fraction},
                   {"delta_fraction", c.solver.delta_fraction},
                   {"n_samples", c.solver.n_samples}};
    if (c.solver.refine_tol) solver["refine_tol"] = *c.solver.refine_tol;
    if (c.solver.nonlocal_tol) solver["nonlocal_tol"] = *c.solver.nonlocal_tol;
    return {{"schema_version", kSchemaVersion}, {"domain", domain},        {"model", to_json(c.model)},
            {"solver", solver},                 {"output_dir", c.output_dir}, {"force", c.force}};
}

}  // namespace kms
