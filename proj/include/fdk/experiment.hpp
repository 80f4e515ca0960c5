// Experiment runner: solves reference + test configurations over (alpha,
// sigma, J, h) sweeps, caches references, and emits CSV convergence tables.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdk/errors.hpp"
#include "fdk/mesh.hpp"
#include "fdk/solver.hpp"

namespace fdk {

struct ExperimentConfig {
    int experiment = 1;  // 1: h-sweep, 2: J-sweep at sigma=1, 3: J-sweep over sigma list
    std::vector<double> alphas;
    std::vector<double> sigmas;  // test gradings; empty = experiment default
    std::vector<int> J_list;     // temporal sweep (experiments 2-3)
    std::vector<int> n_list;     // spatial sweep (experiment 1)
    int n_ref = 256;
    int J_ref = 1024;
    double sigma_ref = 2.2;
    U0Spec u0 = PowerLaw{-0.49};
    std::string nonlinearity = "sqrt1p";
    double T = 1.0;
    int quadrature_points = 3;
    std::string out_csv = "table.csv";
    std::string cache_dir;  // empty: $FDK_CACHE_DIR, else ./fdk-cache
    bool deterministic = false;  // zero the seconds column for byte-stable CSV
    int jobs = 1;
};

// Scaled-down defaults whose order columns are stable in minutes of runtime.
ExperimentConfig desk_config(int experiment);
// The full-size setups (reference J = 2^16, h = 2^-11); hours of O(J^2) work.
ExperimentConfig paper_config(int experiment);

struct TableRow {
    int experiment = 0;
    double alpha = 0.0, sigma = 0.0;
    int J = 0, n_cells = 0;
    bool ok = false;
    std::string status;  // failure reason when !ok
    ErrorReport err;
    std::optional<double> ord0, ord1, ord2, ord3;  // absent on each sweep's first row
    std::optional<double> eta1, eta2;
    double seconds = 0.0;
    int newton_min = 0, newton_max = 0;
};

// Runs all rows (references first, cached per key; failures skip the row but
// not the run), writes the CSV to cfg.out_csv, and returns the rows.
// CSV columns: experiment,alpha,sigma,J,n_cells,E0,ord0,E1,ord1,E2,ord2,E3,
// ord3,eta1,eta2,seconds. Failed rows leave the numeric cells empty.
std::vector<TableRow> run_experiment(const ExperimentConfig& cfg);

// Stable filesystem-safe (hex) key for a solver configuration.
std::string cache_key(double alpha, double sigma, int J, int n_cells, const std::string& u0_text,
                      const std::string& nonlinearity, int quadrature_points);

// Resolved cache directory (flag value, else $FDK_CACHE_DIR, else ./fdk-cache).
std::string resolve_cache_dir(const std::string& flag_value);

}  // namespace fdk
