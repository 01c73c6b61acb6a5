#pragma once

// Wiring from a RunConfig to the solver objects, shared by the CLI and tests.

#include <kms/config.hpp>
#include <kms/discretization.hpp>
#include <kms/fixed_point.hpp>
#include <kms/model.hpp>
#include <kms/spectral.hpp>

#include <cstdlib>
#include <memory>
#include <string>

namespace kms {

/// Mesh, eigen data and resolved model for one configuration. Not copyable:
/// `problem` refers to the other members.
class Pipeline {
public:
    explicit Pipeline(const RunConfig& config)
        : config_(config),
          mesh_(config.domain),
          eig_(make_eigen_pack(mesh_, config.model.p, config.solver.eigen_tol)),
          model_(resolve_model(build_model(config.model), eig_)),
          problem_(model_, mesh_, eig_, config.solver.a_min_fraction * max_a(model_)) {}

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    [[nodiscard]] const RunConfig& config() const noexcept { return config_; }
    [[nodiscard]] const Mesh& mesh() const noexcept { return mesh_; }
    [[nodiscard]] const EigenPack& eig() const noexcept { return eig_; }
    [[nodiscard]] const ModelSpec& model() const noexcept { return model_; }
    [[nodiscard]] const NonlocalProblem& problem() const noexcept { return problem_; }

    [[nodiscard]] LocalSolverOptions local_options() const {
        LocalSolverOptions o;
        o.tol = config_.solver.local_tol;
        return o;
    }

    [[nodiscard]] ScanOptions scan_options(int k, unsigned threads, bool certify = false) const {
        ScanOptions s;
        s.n_samples = config_.solver.n_samples;
        s.delta = config_.solver.delta_fraction * model_.knots.width(k);
        s.local = local_options();
        s.certify = certify;
        s.threads = threads;
        return s;
    }

    [[nodiscard]] TheoremOptions theorem_options(unsigned threads, bool certify, bool force) const {
        TheoremOptions t;
        t.scan.n_samples = config_.solver.n_samples;
        t.scan.local = local_options();
        t.scan.certify = certify;
        t.scan.threads = threads;
        t.delta_fraction = config_.solver.delta_fraction;
        t.refine_tol = config_.solver.refine_tol;
        t.nonlocal_tol = config_.solver.nonlocal_tol;
        t.force = force;
        return t;
    }

private:
    RunConfig config_;
    Mesh mesh_;
    EigenPack eig_;
    ModelSpec model_;
    NonlocalProblem problem_;
};

/// KMS_THREADS, or 0 (= hardware concurrency) when unset or invalid.
inline unsigned threads_from_env() {
    const char* v = std::getenv("KMS_THREADS");
    if (!v) return 0;
    try {
        const long n = std::stol(v);
        return n > 0 ? static_cast<unsigned>(n) : 0;
    } catch (...) {
        return 0;
    }
}

}  // namespace kms
