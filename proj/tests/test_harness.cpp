#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fdk/experiment.hpp"
#include "fdk/fracquad.hpp"

using namespace fdk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / (tag + "-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string fmt6e(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

constexpr const char* kHeader =
    "experiment,alpha,sigma,J,n_cells,E0,ord0,E1,ord1,E2,ord2,E3,ord3,eta1,eta2,seconds";

ExperimentConfig mini_config(const TempDir& dir) {
    ExperimentConfig cfg;
    cfg.experiment = 2;
    cfg.alphas = {0.5};
    cfg.sigmas = {1.0};
    cfg.J_list = {8, 16};
    cfg.n_ref = 16;
    cfg.J_ref = 64;
    cfg.sigma_ref = 2.2;
    cfg.out_csv = (dir.path / "table.csv").string();
    cfg.cache_dir = (dir.path / "cache").string();
    cfg.deterministic = true;
    return cfg;
}

int count_cache_files(const fs::path& dir) {
    int n = 0;
    if (!fs::exists(dir)) return 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".fdk") ++n;
    return n;
}

}  // namespace

TEST_CASE("cache_key: stable, sensitive, filesystem-safe") {
    const std::string base = cache_key(0.5, 2.2, 1024, 256, "power_law:-0.49", "sqrt1p", 3);
    CHECK(base == cache_key(0.5, 2.2, 1024, 256, "power_law:-0.49", "sqrt1p", 3));
    CHECK(base.size() == 16);
    for (char c : base) CHECK((std::isdigit(static_cast<unsigned char>(c)) || (c >= 'a' && c <= 'f')));

    CHECK(base != cache_key(0.4, 2.2, 1024, 256, "power_law:-0.49", "sqrt1p", 3));
    CHECK(base != cache_key(0.5, 2.0, 1024, 256, "power_law:-0.49", "sqrt1p", 3));
    CHECK(base != cache_key(0.5, 2.2, 2048, 256, "power_law:-0.49", "sqrt1p", 3));
    CHECK(base != cache_key(0.5, 2.2, 1024, 128, "power_law:-0.49", "sqrt1p", 3));
    CHECK(base != cache_key(0.5, 2.2, 1024, 256, "sine:1", "sqrt1p", 3));
    CHECK(base != cache_key(0.5, 2.2, 1024, 256, "power_law:-0.49", "zero", 3));
    CHECK(base != cache_key(0.5, 2.2, 1024, 256, "power_law:-0.49", "sqrt1p", 2));
}

TEST_CASE("resolve_cache_dir precedence") {
    const char* saved = std::getenv("FDK_CACHE_DIR");
    const std::string saved_copy = saved ? saved : "";

    CHECK(resolve_cache_dir("/explicit/dir") == "/explicit/dir");
    ::setenv("FDK_CACHE_DIR", "/from/env", 1);
    CHECK(resolve_cache_dir("") == "/from/env");
    CHECK(resolve_cache_dir("/explicit/dir") == "/explicit/dir");
    ::unsetenv("FDK_CACHE_DIR");
    CHECK(resolve_cache_dir("") == "fdk-cache");

    if (saved) ::setenv("FDK_CACHE_DIR", saved_copy.c_str(), 1);
}

TEST_CASE("desk and paper presets") {
    const ExperimentConfig d1 = desk_config(1);
    CHECK(d1.experiment == 1);
    CHECK(d1.alphas.size() == 5);
    CHECK(d1.n_list == std::vector<int>{8, 16, 32});
    CHECK(d1.n_ref == 256);
    CHECK(d1.J_ref == 1024);
    CHECK(d1.sigma_ref == 2.2);
    CHECK(std::holds_alternative<PowerLaw>(d1.u0));

    const ExperimentConfig d2 = desk_config(2);
    CHECK(d2.J_list == std::vector<int>{32, 64, 128, 256});
    CHECK(d2.J_ref == 4096);
    CHECK(d2.sigmas == std::vector<double>{1.0});

    const ExperimentConfig d3 = desk_config(3);
    CHECK(d3.J_ref == 4096);
    CHECK(std::holds_alternative<PowerProduct>(d3.u0));

    const ExperimentConfig p1 = paper_config(1);
    CHECK(p1.n_ref == 2048);
    CHECK(p1.J_ref == 65536);
    const ExperimentConfig p2 = paper_config(2);
    CHECK(p2.n_ref == 2048);
    CHECK(p2.J_ref == 65536);

    CHECK_THROWS_AS(desk_config(4), std::invalid_argument);
    CHECK_THROWS_AS(paper_config(0), std::invalid_argument);
}

TEST_CASE("run_experiment: CSV layout, eta columns, cache reuse, determinism") {
    TempDir dir("fdk-harness");
    const ExperimentConfig cfg = mini_config(dir);

    const std::vector<TableRow> rows = run_experiment(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ok);
    CHECK(rows[1].ok);
    CHECK_FALSE(rows[0].ord3.has_value());
    REQUIRE(rows[1].ord3.has_value());
    CHECK(rows[0].newton_min >= 1);
    CHECK(rows[0].newton_max <= 8);

    const std::string csv = slurp(cfg.out_csv);
    const std::vector<std::string> ls = lines_of(csv);
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == kHeader);

    const std::vector<std::string> r1 = split_csv(ls[1]);
    const std::vector<std::string> r2 = split_csv(ls[2]);
    REQUIRE(r1.size() == 16);
    REQUIRE(r2.size() == 16);
    CHECK(r1[0] == "2");
    CHECK(r1[1] == "0.5");
    CHECK(r1[2] == "1");
    CHECK(r1[3] == "8");
    CHECK(r1[4] == "16");
    CHECK(r1[6].empty());   // ord0 absent on the first sweep row
    CHECK(r1[8].empty());
    CHECK(r1[10].empty());
    CHECK(r1[12].empty());
    CHECK_FALSE(r2[12].empty());
    CHECK(r1[15] == "0.000");  // deterministic run zeroes the timing column

    const EtaPair eta8 = eta_predictors(0.5, 1.0, 8);
    const EtaPair eta16 = eta_predictors(0.5, 1.0, 16);
    REQUIRE(eta8.eta1.has_value());
    REQUIRE(eta8.eta2.has_value());
    CHECK(r1[13] == fmt6e(*eta8.eta1));
    CHECK(r1[14] == fmt6e(*eta8.eta2));
    CHECK(r2[13] == fmt6e(*eta16.eta1));
    CHECK(r2[14] == fmt6e(*eta16.eta2));

    // order column consistent with the printed errors
    const double e3a = std::stod(r1[11]), e3b = std::stod(r2[11]);
    CHECK(std::fabs(std::stod(r2[12]) - std::log2(e3a / e3b)) < 1e-3);

    // one reference, one cache file; a second run reuses it byte-for-byte
    CHECK(count_cache_files(cfg.cache_dir) == 1);
    run_experiment(cfg);
    CHECK(slurp(cfg.out_csv) == csv);
    CHECK(count_cache_files(cfg.cache_dir) == 1);

    // deleting the cache and recomputing reproduces every error cell to 1e-12
    fs::remove_all(cfg.cache_dir);
    run_experiment(cfg);
    const std::vector<std::string> fresh = lines_of(slurp(cfg.out_csv));
    for (int row = 1; row <= 2; ++row) {
        const std::vector<std::string> a = split_csv(ls[row]);
        const std::vector<std::string> b = split_csv(fresh[row]);
        for (int col : {5, 7, 9, 11}) {
            const double va = std::stod(a[col]), vb = std::stod(b[col]);
            CHECK(std::fabs(va - vb) <= 1e-12 * std::max(std::fabs(va), 1.0));
        }
    }
    CHECK(count_cache_files(cfg.cache_dir) == 1);
}

TEST_CASE("run_experiment: row failures keep the run alive and break order chains") {
    TempDir dir("fdk-failrow");
    ExperimentConfig cfg = mini_config(dir);
    cfg.nonlinearity = "linear:-8.000000";  // L = 8 shrinks the stability bound
    cfg.J_list = {16, 128};
    cfg.J_ref = 1024;

    // tau_J = 1/16 exceeds the bound, so the first row must fail; 1/128 is safe
    const double bound = stability_bound(0.5, 8.0);
    REQUIRE(1.0 / 16.0 >= bound);
    REQUIRE(1.0 / 128.0 < 0.5 * bound);

    const std::vector<TableRow> rows = run_experiment(cfg);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].ok);
    CHECK_FALSE(rows[0].status.empty());
    CHECK(rows[1].ok);
    CHECK_FALSE(rows[1].ord3.has_value());  // no order across a failed predecessor

    const std::vector<std::string> ls = lines_of(slurp(cfg.out_csv));
    REQUIRE(ls.size() == 3);
    const std::vector<std::string> r1 = split_csv(ls[1]);
    REQUIRE(r1.size() == 16);
    for (int col = 5; col <= 12; ++col) CHECK(r1[col].empty());
    CHECK_FALSE(r1[13].empty());  // eta predictors do not depend on the solve
    CHECK_FALSE(split_csv(ls[2])[11].empty());
}

TEST_CASE("run_experiment: bad sweeps are rejected before any work") {
    TempDir dir("fdk-reject");
    ExperimentConfig cfg = mini_config(dir);
    const std::string untouched = (dir.path / "untouched-cache").string();
    cfg.cache_dir = untouched;

    cfg.J_list.clear();
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = mini_config(dir);
    cfg.cache_dir = untouched;
    cfg.J_ref = 32;  // < 4 * max J
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg = mini_config(dir);
    cfg.cache_dir = untouched;
    cfg.alphas.clear();
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    CHECK_FALSE(fs::exists(untouched));
}

TEST_CASE("run_experiment: parallel rows match the serial run") {
    TempDir dir("fdk-jobs");
    ExperimentConfig cfg = mini_config(dir);
    cfg.J_list = {8, 16, 32};
    cfg.J_ref = 128;

    const std::vector<TableRow> serial = run_experiment(cfg);
    const std::string csv_serial = slurp(cfg.out_csv);

    fs::remove_all(cfg.cache_dir);
    cfg.jobs = 3;
    const std::vector<TableRow> parallel = run_experiment(cfg);
    CHECK(slurp(cfg.out_csv) == csv_serial);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(parallel[i].ok == serial[i].ok);
        CHECK(parallel[i].err.e3 == serial[i].err.e3);
    }
}

#ifdef FDK_CLI_PATH
namespace {

int run_cli(const std::string& args, const fs::path& out) {
    const std::string cmd = std::string(FDK_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("CLI: predict, help, and flag errors") {
    TempDir dir("fdk-cli");
    const fs::path out = dir.path / "out.txt";

    CHECK(run_cli("predict --alpha 0.5 --sigma 2 --J 1024", out) == 0);
    std::string text = slurp(out);
    CHECK(text.find("eta1") != std::string::npos);
    CHECK(text.find("2.5710633279e-03") != std::string::npos);

    // sigma = 3 sits outside both predictor branch ranges
    CHECK(run_cli("predict --alpha 0.5 --sigma 3 --J 1024", out) == 0);
    text = slurp(out);
    CHECK(text.find("undefined") != std::string::npos);

    CHECK(run_cli("--help", out) == 0);
    CHECK(slurp(out).find("Usage") != std::string::npos);

    CHECK(run_cli("run --experiment 2 --bogus-flag 1", out) == 2);
    CHECK(run_cli("frobnicate", out) == 2);
    CHECK(run_cli("run --experiment 7", out) == 2);
}
#endif
