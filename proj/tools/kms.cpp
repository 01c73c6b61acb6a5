// kms: command-line driver.
//
//   kms <eigen|check|example|solve-local|scan|solve> --config <file>
//       [--alpha <a>] [--k <k>] [--out <dir>] [--force]
//
// The primary JSON (or CSV for `scan`) goes to stdout; the same artifacts and a
// manifest.json are written to the output directory. Exit codes: 0 success,
// 1 usage or configuration error, 2 hypothesis veto, 3 solver or fixed-point
// failure, 4 report written but a certificate failed.

#include <kms/kms.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Args {
    std::string command;
    std::string config_path;
    std::optional<double> alpha;
    std::optional<int> k;
    std::optional<std::string> out;
    bool force = false;
};

class Output {
public:
    explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void json(const std::string& name, const kms::json& doc) {
        std::ofstream os(dir_ / name);
        os << doc.dump(2) << '\n';
        files_.push_back(name);
    }

    std::ofstream stream(const std::string& name) {
        files_.push_back(name);
        return std::ofstream(dir_ / name);
    }

    void field(const std::string& name, const kms::Mesh& mesh, const kms::Field& u, const std::string& column) {
        kms::write_field_csv((dir_ / name).string(), mesh, u, column);
        files_.push_back(name);
    }

    [[nodiscard]] const std::vector<std::string>& files() const noexcept { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

int bump_of(const kms::ModelSpec& model, double alpha) {
    for (int k = 1; k <= model.K(); ++k) {
        if (alpha > model.knots[k - 1] && alpha < model.knots[k]) return k;
    }
    throw kms::InvalidArgument("alpha " + std::to_string(alpha) + " is not inside any bump (t_{k-1}, t_k)");
}

int run(const Args& args, const kms::RunConfig& config, Output& out) {
    const unsigned threads = kms::threads_from_env();
    const bool force = args.force || config.force;

    if (args.command == "eigen") {
        const kms::Mesh mesh(config.domain);
        const auto eig = kms::make_eigen_pack(mesh, config.model.p, config.solver.eigen_tol);
        const auto doc = kms::eigen_json(eig);
        out.json("eigen.json", doc);
        out.field("phi1.csv", mesh, eig.phi1, "phi1");
        out.field("e1.csv", mesh, eig.e1, "e1");
        std::cout << doc.dump(2) << '\n';
        return 0;
    }

    if (args.command == "example") {
        const kms::Mesh mesh(config.domain);
        const auto eig = kms::make_eigen_pack(mesh, config.model.p, config.solver.eigen_tol);
        const auto* s3 = std::get_if<kms::Section3F>(&config.model.f);
        if (!s3) throw kms::InvalidArgument("example: model.f must be of type section3 (gamma is read from it)");
        const kms::Knots knots(config.model.knots, config.model.t_star);
        const kms::Coefficient a(config.model.a, knots);
        const auto model = kms::generate_example(knots, a, s3->gamma, eig, config.model.p);
        const auto report = kms::check_hypotheses(model, eig);
        const auto doc = kms::example_json(model, report);
        out.json("example.json", doc);
        kms::RunConfig resolved = config;
        resolved.model = kms::to_source(model);
        out.json("model_config.json", kms::to_json(resolved));
        std::cout << doc.dump(2) << '\n';
        return 0;
    }

    const kms::Pipeline pipe(config);

    if (args.command == "check") {
        const auto doc = kms::to_json(kms::check_hypotheses(pipe.model(), pipe.eig()));
        out.json("check.json", doc);
        std::cout << doc.dump(2) << '\n';
        return 0;
    }

    const auto report = kms::check_hypotheses(pipe.model(), pipe.eig());
    if (!report.all_hold() && !force) {
        std::cerr << "kms: hypotheses fail (" << report.failing() << "); use --force to run anyway\n";
        out.json("check.json", kms::to_json(report));
        return 2;
    }

    if (args.command == "solve-local") {
        if (!args.alpha) throw kms::InvalidArgument("solve-local requires --alpha");
        bump_of(pipe.model(), *args.alpha);
        const auto problem = kms::make_local_problem(pipe.model(), pipe.mesh(), pipe.eig(), *args.alpha,
                                                     pipe.problem().a_min);
        const auto sol = kms::monotone_solve(problem, kms::Side::sub, pipe.local_options());
        const auto doc = kms::local_json(problem, sol);
        out.json("local.json", doc);
        out.field("u_alpha.csv", pipe.mesh(), sol.u, "u");
        std::cout << doc.dump(2) << '\n';
        return 0;
    }

    if (args.command == "scan") {
        const int k = args.k.value_or(1);
        if (k < 1 || k > pipe.model().K()) throw kms::InvalidArgument("--k must lie in 1..K");
        const auto curve = kms::scan_curve(pipe.problem(), k, pipe.scan_options(k, threads));
        auto os = out.stream("scan_k" + std::to_string(k) + ".csv");
        kms::write_curve_csv(os, curve);
        kms::write_curve_csv(std::cout, curve);
        return 0;
    }

    if (args.command == "solve") {
        const auto theorem = kms::assemble_theorem(pipe.problem(), pipe.theorem_options(threads, true, force));
        const auto doc = kms::to_json(theorem);
        out.json("theorem.json", doc);
        for (const auto& bump : theorem.bumps) {
            auto os = out.stream("curve_k" + std::to_string(bump.k) + ".csv");
            kms::write_curve_csv(os, bump.curve);
            for (const auto& fp : bump.fixed_points) out.field(kms::solution_file_name(fp), pipe.mesh(), fp.u, "u");
        }
        std::cout << doc.dump(2) << '\n';
        return theorem.all_ok() ? 0 : 4;
    }

    throw kms::InvalidArgument("unknown subcommand " + args.command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ordered positive solutions of -a(int u^p) Lap u = f(u)"};
    app.require_subcommand(1, 1);
    Args args;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"eigen", "principal eigenpair, C1, |Omega| and int e1^p"},
        {"check", "hypothesis report (advisory; always exits 0)"},
        {"example", "generate the closed-form f for the configured knots and a"},
        {"solve-local", "solve the frozen problem for one alpha"},
        {"scan", "sample P_k(alpha) on one bump"},
        {"solve", "locate all fixed points and assemble the ordered solutions"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output directory (overrides output_dir)");
        sub->add_flag("--force", args.force, "run even when hypotheses fail");
        if (name == "solve-local") sub->add_option("--alpha", args.alpha, "frozen nonlocal argument")->required();
        if (name == "scan") sub->add_option("--k", args.k, "bump index (1-based)");
        sub->callback([&args, name = name] { args.command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    const auto start = std::chrono::steady_clock::now();
    kms::RunConfig config;
    try {
        config = kms::parse_config_file(args.config_path);
    } catch (const kms::ConfigError& e) {
        std::cerr << "kms: configuration error: " << e.what() << '\n';
        return 1;
    }

    Output out(args.out.value_or(config.output_dir));
    int status = 0;
    std::string error;
    try {
        status = run(args, config, out);
    } catch (const kms::InvalidArgument& e) {
        status = 1;
        error = e.what();
    } catch (const kms::HypothesisVeto& e) {
        status = 2;
        error = e.what();
    } catch (const std::exception& e) {
        status = 3;
        error = e.what();
    }
    if (!error.empty()) std::cerr << "kms: " << error << '\n';

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    kms::json manifest = {{"schema_version", kms::kSchemaVersion},
                          {"tool", "kms"},
                          {"version", kms::version},
                          {"subcommand", args.command},
                          {"config", kms::to_json(config)},
                          {"force", args.force},
                          {"threads", kms::resolve_threads(kms::threads_from_env())},
                          {"exit_status", status},
                          {"error", error},
                          {"outputs", out.files()},
                          {"wall_time_seconds", wall}};
    if (args.alpha) manifest["alpha"] = *args.alpha;
    if (args.k) manifest["k"] = *args.k;
    out.json("manifest.json", manifest);
    return status;
}
