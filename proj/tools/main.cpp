#include "lcsf/design.hpp"
#include "lcsf/errors.hpp"
#include "lcsf/harness.hpp"
#include "lcsf/ident.hpp"
#include "lcsf/io.hpp"
#include "lcsf/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace lcsf;

StudyConfig load_config(const std::string& profile, const std::string& config_path) {
    StudyConfig config;
    if (profile == "desk")
        config = StudyConfig::desk_profile();
    else if (profile == "paper")
        config = StudyConfig::paper_profile();
    else if (!profile.empty())
        throw ConfigError("unknown profile '" + profile + "' (expected desk or paper)");
    if (!config_path.empty()) study_config_from_json(load_json(config_path), config);
    config.validate();
    return config;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir);
}

int cmd_design(const std::string& config_path, const std::string& mode,
               std::uint64_t seed, const std::string& out_dir) {
    StudyConfig config = load_config("", config_path);
    config.master_seed = seed;
    ensure_directory(out_dir);
    const std::filesystem::path dir(out_dir);

    const SignalParams theta0 = draw_initial_params(config, 0);
    const IoModel model = build_design_model(config, 0);
    const DesignProblem problem = make_design_problem(config, model, theta0);

    const DesignOutcome classical = solve_classical(problem);
    save_json(design_outcome_to_json(classical, DesignMode::classical),
              (dir / "design_classical.json").string());
    write_signal_csv((dir / "signal_classical.csv").string(),
                     multisine_sequence(classical.theta, config.multisine,
                                        config.multisine.n_samples));
    std::cout << "classical: v_cost " << classical.v_cost << ", power " << classical.power
              << ", converged " << (classical.converged ? "yes" : "no") << '\n';

    if (mode == "least-costly") {
        DesignProblem lc = problem;
        lc.mode = DesignMode::least_costly;
        lc.gamma = compute_gamma(classical, config.margin);
        lc.theta0 = classical.theta;
        const DesignOutcome outcome = solve_least_costly(lc);
        save_json(design_outcome_to_json(outcome, DesignMode::least_costly),
                  (dir / "design_least_costly.json").string());
        write_signal_csv((dir / "signal_least_costly.csv").string(),
                         multisine_sequence(outcome.theta, config.multisine,
                                            config.multisine.n_samples));
        std::cout << "least costly: v_cost " << outcome.v_cost << " (gamma " << lc.gamma
                  << "), power " << outcome.power << ", converged "
                  << (outcome.converged ? "yes" : "no") << '\n';
    }
    return exit_code::ok;
}

int cmd_simulate(const std::string& config_path, const std::string& signal_path,
                 const std::string& out_path) {
    const StudyConfig config = load_config("", config_path);
    const auto u = read_signal_csv(signal_path);
    if (u.empty()) throw ConfigError("signal file contains no samples");

    IoModel plant;
    plant.kind = IoModel::Kind::nonlinear_msd;
    plant.msd = config.msd;
    plant.f_s = config.multisine.f_s;
    auto y = simulate_output(plant, State::Zero(), u);
    y.resize(u.size());

    SignalDataset data;
    data.u = u;
    data.y = y;
    data.dy.resize(u.size(), 0.0);
    const double dy_scale = config.dy_scale();
    for (std::size_t k = 1; k < y.size(); ++k) data.dy[k] = dy_scale * (y[k] - y[k - 1]);
    write_dataset_csv(out_path, data);

    Json provenance;
    provenance["model_kind"] = plant.kind_name();
    provenance["f_s"] = plant.f_s;
    provenance["dy_scale"] = dy_scale;
    provenance["source_signal"] = signal_path;
    provenance["samples"] = u.size();
    provenance["initial_state"] = std::vector<double>{0.0, 0.0};
    save_json(provenance, out_path + ".provenance.json");
    return exit_code::ok;
}

int cmd_identify(const std::string& train_path, const std::string& config_path,
                 const std::string& out_path) {
    const StudyConfig config = load_config("", config_path);
    const SignalDataset data = read_dataset_csv(train_path);
    const TrainResult result =
        train_lm(data.u, data.y, config.train,
                 derive_seed(config.master_seed, 0, "identify-cli"));
    save_json(noe_model_to_json(result.model), out_path);

    std::ofstream trace(out_path + ".trace.csv");
    if (!trace) throw IoError("cannot write " + out_path + ".trace.csv");
    trace << "iteration,cost\n";
    for (std::size_t i = 0; i < result.cost_trace.size(); ++i)
        trace << i << ',' << result.cost_trace[i] << '\n';

    std::cout << "final cost " << result.final_cost << " after " << result.iterations
              << " iterations\n";
    return exit_code::ok;
}

int cmd_evaluate(const std::string& model_path, const std::string& test_path) {
    const NoeModel model = noe_model_from_json(load_json(model_path));
    const SignalDataset data = read_dataset_csv(test_path);
    const auto first = static_cast<std::size_t>(std::max(model.m_y, model.m_u));
    if (data.y.size() < first + 1) throw ConfigError("test set shorter than the model lags");

    const std::vector<double> y_init(data.y.begin(), data.y.begin() + model.m_y);
    const auto yhat = noe_simulate(model, data.u, y_init);
    const std::vector<double> reference(data.y.begin() + static_cast<std::ptrdiff_t>(first),
                                        data.y.end());
    std::printf("RMSE %.17g\n", rmse(reference, yhat));
    return exit_code::ok;
}

int cmd_montecarlo(const std::string& config_path, int realizations,
                   const std::string& profile, const std::string& out_dir, int jobs) {
    StudyConfig config = load_config(profile, config_path);
    if (realizations > 0) config.realizations = realizations;
    if (jobs > 0) config.jobs = jobs;
    config.output_dir = out_dir;
    config.validate();

    const StudyResult result = run_study(config);
    write_report(result, out_dir);

    const StudyAggregates agg = aggregate(result);
    std::cout << "realizations: " << agg.successes << " ok, " << agg.failures
              << " failed\n";
    if (agg.successes > 0) {
        std::cout << "mean power: initial " << agg.mean_power_ini << ", classical "
                  << agg.mean_power_cl << ", least costly " << agg.mean_power_lc << '\n';
        std::cout << "mean V-cost: classical " << agg.mean_v_cl << ", least costly "
                  << agg.mean_v_lc << '\n';
        std::cout << "mean covering radius: classical " << agg.mean_rho_cl
                  << ", least costly " << agg.mean_rho_lc << '\n';
    }
    std::cout << "report written to " << out_dir << '\n';
    return agg.failures == 0 ? exit_code::ok : exit_code::numeric;
}

int cmd_report(const std::string& study_path, const std::string& out_dir) {
    const StudyResult result = study_result_from_json(load_json(study_path));
    write_report(result, out_dir);
    std::cout << "report written to " << out_dir << '\n';
    return exit_code::ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lcsf: least-costly space-filling excitation design, identification and "
        "Monte Carlo validation for the nonlinear mass-spring-damper benchmark"};
    app.require_subcommand(1);

    std::string config_path, mode = "classical", out, signal_path, train_path, model_path,
                test_path, study_path, profile;
    std::uint64_t seed = 1;
    int realizations = 0, jobs = 0;

    auto* design = app.add_subcommand("design", "Solve a space-filling input design");
    design->add_option("--config", config_path, "Study configuration JSON");
    design->add_option("--mode", mode, "classical or least-costly")
        ->check(CLI::IsMember({"classical", "least-costly"}));
    design->add_option("--seed", seed, "Master seed for the phase draw");
    design->add_option("--out", out, "Output directory")->required();

    auto* simulate = app.add_subcommand("simulate",
                                        "Simulate the nonlinear plant under a signal CSV");
    simulate->add_option("--config", config_path, "Study configuration JSON");
    simulate->add_option("--signal", signal_path, "Input CSV with columns (k, u)")
        ->required();
    simulate->add_option("--out", out, "Output dataset CSV (k, u, y, dy)")->required();

    auto* identify = app.add_subcommand("identify", "Fit an output-error network model");
    identify->add_option("--train", train_path, "Training dataset CSV (k, u, y, dy)")
        ->required();
    identify->add_option("--config", config_path, "Study configuration JSON");
    identify->add_option("--out", out, "Output model JSON")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Free-run RMSE of a model on a test set");
    evaluate->add_option("--model", model_path, "Model JSON")->required();
    evaluate->add_option("--test", test_path, "Test dataset CSV (k, u, y, dy)")->required();

    auto* montecarlo = app.add_subcommand("montecarlo", "Run the full Monte Carlo study");
    montecarlo->add_option("--config", config_path, "Study configuration JSON");
    montecarlo->add_option("--realizations", realizations, "Override realization count");
    montecarlo->add_option("--profile", profile, "desk or paper size preset")
        ->check(CLI::IsMember({"desk", "paper"}));
    montecarlo->add_option("--jobs", jobs, "Worker threads for realizations");
    montecarlo->add_option("--out", out, "Report directory")->required();

    auto* report = app.add_subcommand("report", "Regenerate report files from study.json");
    report->add_option("--study", study_path, "study.json from a previous run")->required();
    report->add_option("--out", out, "Report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lcsf::exit_code::config;
    }

    try {
        if (design->parsed()) return cmd_design(config_path, mode, seed, out);
        if (simulate->parsed()) return cmd_simulate(config_path, signal_path, out);
        if (identify->parsed()) return cmd_identify(train_path, config_path, out);
        if (evaluate->parsed()) return cmd_evaluate(model_path, test_path);
        if (montecarlo->parsed())
            return cmd_montecarlo(config_path, realizations, profile, out, jobs);
        if (report->parsed()) return cmd_report(study_path, out);
    } catch (const lcsf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return lcsf::exit_code::config;
    } catch (const lcsf::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return lcsf::exit_code::io;
    } catch (const lcsf::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return lcsf::exit_code::numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return lcsf::exit_code::ok;
}
