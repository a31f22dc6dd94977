// compos: quasi-likelihood regression and multivariate tools for compositional data.

#include "compos/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

struct DataFlags {
    std::string input;
    std::string parts;
    std::string covariates;
    std::string log;
    std::string constraint = "sum";
    std::string method = "gamma";
    std::string out = ".";
    double zero_adjust = 0.0;
    bool plot = false;

    void attach(CLI::App* app, bool with_plot_flag) {
        app->add_option("input", input, "input CSV with a header row")->required()->check(CLI::ExistingFile);
        app->add_option("--parts", parts, "comma-separated part columns (default: all non-covariate columns)");
        app->add_option("--covariates", covariates, "comma-separated covariate columns");
        app->add_option("--log", log, "comma-separated covariates to log-transform");
        app->add_option("--constraint", constraint, "identification: sum | ref:<part>");
        app->add_option("--method", method, "solver: gamma | scoring | both")
            ->check(CLI::IsMember({"gamma", "scoring", "both"}));
        app->add_option("--zero-adjust", zero_adjust, "add this constant to raw values for the log-ratio baseline")
            ->check(CLI::PositiveNumber);
        app->add_option("--out", out, "output directory");
        if (with_plot_flag) {
            app->add_flag("--plot", plot, "also write ternary.svg (three parts)");
        }
    }

    compos::RunConfig config() const {
        compos::RunConfig cfg;
        cfg.input = input;
        cfg.parts = split_list(parts);
        const auto logs = split_list(log);
        for (const auto& c : split_list(covariates)) {
            compos::CovariateSpec spec{c};
            if (std::find(logs.begin(), logs.end(), c) != logs.end()) {
                spec.transform = compos::Transform::log;
            }
            cfg.covariates.push_back(spec);
        }
        for (const auto& l : logs) {
            if (std::find_if(cfg.covariates.begin(), cfg.covariates.end(),
                             [&](const auto& s) { return s.column == l; }) == cfg.covariates.end()) {
                throw CLI::ValidationError("--log", "'" + l + "' is not listed in --covariates");
            }
        }
        cfg.constraint = constraint;
        cfg.method = method == "scoring" ? compos::SolverMethod::fisher_scoring
                     : method == "both"  ? compos::SolverMethod::both_crosscheck
                                         : compos::SolverMethod::gamma_trick;
        cfg.out_dir = out;
        cfg.plot = plot;
        if (zero_adjust > 0.0) {
            cfg.zero_adjust = zero_adjust;
        }
        return cfg;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-likelihood logit regression and multivariate tools for compositional data"};
    app.require_subcommand(1);

    DataFlags fit_flags;
    auto* fit_cmd = app.add_subcommand("fit", "fit the compositional logit model");
    fit_flags.attach(fit_cmd, true);

    DataFlags plot_flags;
    bool no_models = false;
    auto* plot_cmd = app.add_subcommand("plot", "ternary diagram with fitted curves");
    plot_flags.attach(plot_cmd, false);
    plot_cmd->add_flag("--no-models", no_models, "plot the data points only");

    DataFlags dist_flags;
    std::string kind = "identity";
    auto* dist_cmd = app.add_subcommand("distances", "pairwise compositional distances");
    dist_flags.attach(dist_cmd, false);
    dist_cmd->add_option("--kind", kind, "identity | mahalanobis | aitchison")
        ->check(CLI::IsMember({"identity", "mahalanobis", "aitchison"}));

    DataFlags base_flags;
    auto* base_cmd = app.add_subcommand("baseline", "log-ratio multivariate linear model");
    base_flags.attach(base_cmd, false);

    std::string scenario;
    std::string sim_out = ".";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study from a scenario file");
    sim_cmd->add_option("scenario", scenario, "scenario file (key = value)")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--out", sim_out, "output directory");
    auto* sim_seed = sim_cmd->add_option("--seed", seed, "override the scenario seed");
    sim_cmd->add_option("--threads", threads, "worker threads (0 = all cores)");

    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("generate", "write one simulated dataset as CSV");
    gen_cmd->add_option("scenario", scenario, "scenario file (key = value)")->required()->check(CLI::ExistingFile);
    gen_cmd->add_option("--out", gen_out, "output CSV path")->required();
    auto* gen_seed = gen_cmd->add_option("--seed", seed, "override the scenario seed");

    try {
        app.parse(argc, argv);
        if (*fit_cmd) {
            return compos::command_fit(fit_flags.config(), std::cerr);
        }
        if (*plot_cmd) {
            return compos::command_plot(plot_flags.config(), !no_models, std::cerr);
        }
        if (*dist_cmd) {
            return compos::command_distances(dist_flags.config(), kind, std::cerr);
        }
        if (*base_cmd) {
            return compos::command_baseline(base_flags.config(), std::cerr);
        }
        if (*sim_cmd) {
            std::optional<std::uint64_t> s;
            if (*sim_seed) {
                s = seed;
            }
            return compos::command_simulate(scenario, sim_out, s, threads, std::cerr);
        }
        if (*gen_cmd) {
            std::optional<std::uint64_t> s;
            if (*gen_seed) {
                s = seed;
            }
            return compos::command_generate(scenario, gen_out, s, std::cerr);
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : compos::exit_usage;
    }
    return compos::exit_usage;
}
