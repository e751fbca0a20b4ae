// Command-line driver: enumerate, classify, degree, verify.

#include <iostream>

#include <CLI11.hpp>

#include "plp/cli.hpp"

namespace {

using plp::cli::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--seed", cfg.seed, "global RNG seed");
    cmd->add_option("--out", cfg.out, "output path (default: stdout)");
    cmd->add_option("--data-dir", cfg.data_dir, "directory overriding the embedded data tables");
    cmd->add_option("--threads", cfg.width, "worker threads (default: PLP_ATLAS_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
}

void add_certify(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--prime", cfg.primes, "prime for the rank test (repeatable)")->expected(1, -1);
    cmd->add_option("--trials", cfg.trials, "random samples per prime")->check(CLI::PositiveNumber);
}

void add_track(CLI::App* cmd, RunConfig& cfg) {
    auto& t = cfg.track;
    cmd->add_option("--initial-step", t.initial_step);
    cmd->add_option("--min-step", t.min_step);
    cmd->add_option("--max-step", t.max_step);
    cmd->add_option("--newton-tol", t.newton_tol);
    cmd->add_option("--path-tol", t.path_tol);
    cmd->add_option("--max-newton", t.max_newton);
    cmd->add_option("--max-steps", t.max_steps);
    cmd->add_option("--dedup", t.dedup_distance);
    cmd->add_option("--predictor", t.predictor, "euler, hermite or rk4")
        ->transform(CLI::CheckedTransformer(std::map<std::string, plp::Predictor>{{"euler", plp::Predictor::Euler},
                                                                                 {"hermite", plp::Predictor::Hermite},
                                                                                 {"rk4", plp::Predictor::RK4}},
                                            CLI::ignore_case));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atlas of minimal point-line problems"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* en = app.add_subcommand("enumerate", "list balanced classes as CSV");
    std::string m_range = "3..9";
    bool single_view = false;
    en->add_option("--m", m_range, "camera range A..B");
    en->add_flag("--single-view", single_view, "single-camera signatures and problems");
    en->add_option("--out", cfg.out, "CSV path (default: stdout)");

    auto* cl = app.add_subcommand("classify", "classify every candidate and write the atlas");
    std::string only;
    cl->add_option("--only-signature", only, "restrict to m,pf,pd,lf,la");
    add_common(cl, cfg);
    add_certify(cl, cfg);

    auto* dg = app.add_subcommand("degree", "monodromy degree runs");
    plp::cli::DegreeSelector sel;
    auto* preset = dg->add_option("--preset", sel.preset, "table1, desk, small or extended");
    dg->add_option("--key", sel.key, "hex canonical key")->excludes(preset);
    dg->add_option("--seeds", sel.seeds, "consecutive seeds starting at --seed")->check(CLI::PositiveNumber);
    add_common(dg, cfg);
    add_track(dg, cfg);

    auto* vf = app.add_subcommand("verify", "run the acceptance suite");
    bool fast = false, no_stretch = false;
    vf->add_flag("--fast", fast, "skip degree runs");
    vf->add_flag("--no-stretch", no_stretch, "skip the non-gated stretch degrees");
    add_common(vf, cfg);
    add_certify(vf, cfg);
    add_track(vf, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*en) {
            std::tie(cfg.m_min, cfg.m_max) = plp::cli::parse_m_range(m_range);
            return plp::cli::cmd_enumerate(cfg, single_view, std::cout, std::cerr);
        }
        if (*cl) {
            std::optional<plp::PlpSignature> sig;
            if (!only.empty()) sig = plp::cli::parse_signature(only);
            return plp::cli::cmd_classify(cfg, sig, std::cout, std::cerr);
        }
        if (*dg) {
            if (sel.preset.empty() && sel.key.empty()) sel.preset = "table1";
            return plp::cli::cmd_degree(cfg, sel, std::cout, std::cerr);
        }
        if (*vf) return plp::cli::cmd_verify(cfg, fast, !no_stretch, std::cout);
    } catch (const plp::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return plp::cli::kUsage;
    } catch (const plp::DataIoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return plp::cli::kIoError;
    } catch (const plp::CriterionRederivationError& e) {
        std::cerr << "criterion-rederivation error: " << e.what() << '\n';
        return plp::cli::kIncomplete;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return plp::cli::kIncomplete;
    }
    return plp::cli::kUsage;
}
