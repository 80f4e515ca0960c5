// fdk: command-line front end.
//   fdk run --experiment {1|2|3} [--scale desk|paper] [...]   CSV sweep tables
//   fdk verify                                                acceptance suite
//   fdk predict --alpha A --sigma S --J N                     eta predictors
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fdk/acceptance.hpp"
#include "fdk/experiment.hpp"
#include "fdk/fracquad.hpp"

namespace {

int do_run(fdk::ExperimentConfig cfg) {
    const std::vector<fdk::TableRow> rows = fdk::run_experiment(cfg);
    int failed = 0;
    for (const fdk::TableRow& r : rows) {
        char line[256];
        if (r.ok) {
            std::snprintf(line, sizeof line,
                          "alpha=%-6.4g sigma=%-5.4g J=%-5d n=%-4d E0=%.3e E1=%.3e E2=%.3e "
                          "E3=%.3e%s%s newton<=%d",
                          r.alpha, r.sigma, r.J, r.n_cells, r.err.e0, r.err.e1, r.err.e2,
                          r.err.e3, r.ord3 ? " ord3=" : "",
                          r.ord3 ? std::to_string(*r.ord3).substr(0, 6).c_str() : "",
                          r.newton_max);
            std::cout << line << "\n";
            if (!r.status.empty()) std::cerr << "note: " << r.status << " (J=" << r.J << ")\n";
        } else {
            ++failed;
            std::snprintf(line, sizeof line, "alpha=%-6.4g sigma=%-5.4g J=%-5d n=%-4d FAILED: %s",
                          r.alpha, r.sigma, r.J, r.n_cells, r.status.c_str());
            std::cout << line << "\n";
        }
    }
    std::cout << "wrote " << cfg.out_csv << " (" << rows.size() << " rows";
    if (failed) std::cout << ", " << failed << " FAILED";
    std::cout << ")\n";
    return failed == 0 ? 0 : 1;
}

void print_eta(const char* name, const std::optional<double>& v) {
    if (v)
        std::printf("%s = %.10e\n", name, *v);
    else
        std::printf("%s = undefined (sigma outside this predictor's branch range)\n", name);
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Piecewise-constant DG / P1 FEM solver for semilinear time-fractional "
                 "diffusion, with convergence-table experiments"};
    app.require_subcommand(1);

    // --- run ---
    int experiment = 1;
    std::string scale = "desk", out, cache;
    std::vector<double> alphas, sigmas;
    std::vector<int> J_list, n_list;
    bool deterministic = false;
    int jobs = 1;
    CLI::App* run = app.add_subcommand("run", "solve a sweep and write a CSV table");
    run->add_option("--experiment,-e", experiment, "experiment id")
        ->required()
        ->check(CLI::Range(1, 3));
    run->add_option("--scale", scale, "desk (default) or paper (hours of O(J^2) work)")
        ->check(CLI::IsMember({"desk", "paper"}));
    run->add_option("--alpha", alphas, "override the alpha list");
    run->add_option("--sigma", sigmas, "override the grading list (experiments 2-3)");
    run->add_option("--J", J_list, "override the temporal sweep (experiments 2-3)");
    run->add_option("--n-cells", n_list, "override the spatial sweep (experiment 1)");
    run->add_option("--out,-o", out, "output CSV path (default table.csv)");
    run->add_option("--cache", cache, "reference cache directory (default $FDK_CACHE_DIR)");
    run->add_flag("--deterministic", deterministic, "zero the seconds column (byte-stable CSV)");
    run->add_option("--jobs,-j", jobs, "concurrent test rows")->check(CLI::PositiveNumber);

    // --- verify ---
    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite (nonzero exit on "
                                                    "any failure)");

    // --- predict ---
    double p_alpha = 0.5, p_sigma = 1.0;
    int p_J = 0;
    CLI::App* predict = app.add_subcommand("predict", "print the eta1/eta2 rate predictors");
    predict->add_option("--alpha", p_alpha, "fractional order in (0,1)")->required();
    predict->add_option("--sigma", p_sigma, "grading exponent >= 1")->required();
    predict->add_option("--J", p_J, "number of time intervals")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(run)) {
            fdk::ExperimentConfig cfg =
                scale == "paper" ? fdk::paper_config(experiment) : fdk::desk_config(experiment);
            if (!alphas.empty()) cfg.alphas = alphas;
            if (!sigmas.empty()) cfg.sigmas = sigmas;
            if (!J_list.empty()) cfg.J_list = J_list;
            if (!n_list.empty()) cfg.n_list = n_list;
            if (!out.empty()) cfg.out_csv = out;
            cfg.cache_dir = cache;
            cfg.deterministic = deterministic;
            cfg.jobs = jobs;
            return do_run(std::move(cfg));
        }
        if (app.got_subcommand(verify)) return fdk::run_acceptance(std::cout) == 0 ? 0 : 1;
        if (app.got_subcommand(predict)) {
            const fdk::EtaPair eta = fdk::eta_predictors(p_alpha, p_sigma, p_J);
            print_eta("eta1", eta.eta1);
            print_eta("eta2", eta.eta2);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
