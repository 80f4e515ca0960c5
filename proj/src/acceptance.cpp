#include "fdk/acceptance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "fdk/errors.hpp"
#include "fdk/experiment.hpp"
#include "fdk/fracquad.hpp"
#include "fdk/mesh.hpp"
#include "fdk/mittag_leffler.hpp"
#include "fdk/nonlinearity.hpp"
#include "fdk/solver.hpp"
#include "fdk/spectral.hpp"

namespace fdk {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

// ---------------------------------------------------------------- criterion 1
Outcome c1_telescoping() {
    const double alphas[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    const double sigmas[] = {1.0, 1.5, 2.0, 2.2};
    const int Js[] = {4, 64, 1024};
    double worst = 0.0;
    for (double a : alphas)
        for (double s : sigmas)
            for (int J : Js) {
                const GradedGrid grid = graded_grid(J, s, 1.0);
                for (int j = 1; j <= J; ++j) {
                    const std::vector<double> row = conv_weights_row(grid, a, j);
                    double sum = 0.0, scale = 0.0;
                    for (double b : row) {
                        sum += b;
                        scale += std::fabs(b);
                    }
                    const double rhs = (std::pow(grid.times[j], 1.0 - a) -
                                        std::pow(grid.times[j - 1], 1.0 - a)) /
                                       std::tgamma(2.0 - a);
                    worst = std::max(worst, std::fabs(sum - rhs) / scale);
                }
            }
    return {worst <= 1e-12, "max rel residual " + num(worst) + " (tol 1e-12)"};
}

// ---------------------------------------------------------------- criterion 2
Outcome c2_mittag_leffler() {
    const double e1 = std::fabs(mittag_leffler(1.0, 1.0, -1.0) - std::exp(-1.0));
    const double e2 = std::fabs(mittag_leffler(0.5, 1.0, -1.0) - std::exp(1.0) * std::erfc(1.0));
    double overlap = 0.0;
    for (int i = 1; i <= 9; ++i) {
        const double a = 0.1 * i;
        const double x = -ml_switch_radius(a);
        const double s = detail::ml_series(a, 1.0, x);
        const double as = detail::ml_asymptotic(a, 1.0, x);
        overlap = std::max(overlap, std::fabs(s - as) / std::fabs(s));
    }
    const bool pass = e1 <= 1e-12 && e2 <= 1e-10 && overlap <= 1e-9;
    return {pass, "|E11(-1)-1/e| " + num(e1) + " (1e-12), |E.5,1(-1)-e*erfc1| " + num(e2) +
                      " (1e-10), overlap " + num(overlap) + " (1e-9)"};
}

// ---------------------------------------------------------------- criterion 3
// Self-contained dense generalized eigensolve (Cholesky + cyclic Jacobi) so
// the closed-form pairs are checked against an independent algorithm.
struct Dense {
    int n;
    std::vector<double> a;  // row-major n x n
    double& at(int i, int j) { return a[i * n + j]; }
    double at(int i, int j) const { return a[i * n + j]; }
};

Dense from_tridiagonal(const TridiagonalMatrix& T) {
    const int n = static_cast<int>(T.diag.size());
    Dense D{n, std::vector<double>(n * n, 0.0)};
    for (int i = 0; i < n; ++i) {
        D.at(i, i) = T.diag[i];
        if (i + 1 < n) {
            D.at(i, i + 1) = T.super[i];
            D.at(i + 1, i) = T.sub[i];
        }
    }
    return D;
}

Dense cholesky(const Dense& M) {  // lower factor
    Dense L{M.n, std::vector<double>(M.n * M.n, 0.0)};
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = M.at(i, j);
            for (int k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
            L.at(i, j) = (i == j) ? std::sqrt(s) : s / L.at(j, j);
        }
    return L;
}

// Eigen-decomposition of symmetric C: returns (values, column vectors in V).
void jacobi_eigensolve(Dense C, std::vector<double>& w, Dense& V) {
    const int n = C.n;
    V = Dense{n, std::vector<double>(n * n, 0.0)};
    for (int i = 0; i < n; ++i) V.at(i, i) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += C.at(p, q) * C.at(p, q);
        if (off < 1e-300) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (C.at(p, q) == 0.0) continue;
                const double theta = (C.at(q, q) - C.at(p, p)) / (2.0 * C.at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double ckp = C.at(k, p), ckq = C.at(k, q);
                    C.at(k, p) = c * ckp - s * ckq;
                    C.at(k, q) = s * ckp + c * ckq;
                }
                for (int k = 0; k < n; ++k) {
                    const double cpk = C.at(p, k), cqk = C.at(q, k);
                    C.at(p, k) = c * cpk - s * cqk;
                    C.at(q, k) = s * cpk + c * cqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V.at(k, p), vkq = V.at(k, q);
                    V.at(k, p) = c * vkp - s * vkq;
                    V.at(k, q) = s * vkp + c * vkq;
                }
            }
    }
    w.resize(n);
    for (int i = 0; i < n; ++i) w[i] = C.at(i, i);
}

Outcome c3_eigen_oracle() {
    double worst = 0.0;
    for (int n_cells : {4, 8}) {
        const Mesh1D mesh = build_mesh(n_cells);
        const Dense A = from_tridiagonal(assemble_stiffness(mesh));
        const Dense M = from_tridiagonal(assemble_mass(mesh));
        const int n = A.n;
        const Dense L = cholesky(M);
        // C = L^-1 A L^-T by two triangular solves.
        Dense C = A;
        for (int col = 0; col < n; ++col)  // forward: L X = A (per column)
            for (int i = 0; i < n; ++i) {
                double s = C.at(i, col);
                for (int k = 0; k < i; ++k) s -= L.at(i, k) * C.at(k, col);
                C.at(i, col) = s / L.at(i, i);
            }
        for (int row = 0; row < n; ++row)  // then X L^T = C (per row)
            for (int j = 0; j < n; ++j) {
                double s = C.at(row, j);
                for (int k = 0; k < j; ++k) s -= C.at(row, k) * L.at(j, k);
                C.at(row, j) = s / L.at(j, j);
            }
        std::vector<double> w;
        Dense Y{0, {}};
        jacobi_eigensolve(C, w, Y);
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int i, int j) { return w[i] < w[j]; });

        const std::vector<EigenPair> closed = discrete_eigenpairs(mesh);
        for (int k = 0; k < n; ++k) {
            const int c = order[k];
            worst = std::max(worst,
                             std::fabs(w[c] - closed[k].lambda) / std::fabs(closed[k].lambda));
            // back-substitute v = L^-T y, align sign, compare components
            std::vector<double> v(n);
            for (int i = n - 1; i >= 0; --i) {
                double s = Y.at(i, c);
                for (int k2 = i + 1; k2 < n; ++k2) s -= L.at(k2, i) * v[k2];
                v[i] = s / L.at(i, i);
            }
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += v[i] * closed[k].vec.coeffs[i];
            const double sgn = dot >= 0 ? 1.0 : -1.0;
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, std::fabs(sgn * v[i] - closed[k].vec.coeffs[i]));
        }
    }
    return {worst <= 1e-10, "max mismatch " + num(worst) + " (tol 1e-10)"};
}

// ---------------------------------------------------------------- criterion 4
Outcome c4_jacobian_fd() {
    SolverConfig cfg;
    cfg.mesh = build_mesh(16);
    cfg.grid = graded_grid(8, 1.5, 1.0);
    cfg.alpha = 0.5;
    cfg.nonlinearity = nl_sqrt1p();
    cfg.u0 = PowerLaw{-0.49};
    const int n = cfg.mesh.n_interior();
    std::mt19937 rng(20240517);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    auto random_fe = [&] {
        FeFunction v{cfg.mesh, std::vector<double>(n)};
        for (double& c : v.coeffs) c = dist(rng);
        return v;
    };
    double worst = 0.0;
    for (int sample = 0; sample < 50; ++sample) {
        const int j = 1 + static_cast<int>(rng() % 8u);
        std::vector<FeFunction> history;
        for (int k = 1; k < j; ++k) history.push_back(random_fe());
        const FeFunction W = random_fe();
        const Dense Ja = from_tridiagonal(jacobian(j, W, cfg));
        double scale = 0.0;
        for (double v : Ja.a) scale = std::max(scale, std::fabs(v));
        for (int m = 0; m < n; ++m) {
            const double eps = 1e-6 * std::max(1.0, std::fabs(W.coeffs[m]));
            FeFunction Wp = W, Wm = W;
            Wp.coeffs[m] += eps;
            Wm.coeffs[m] -= eps;
            const std::vector<double> Rp = residual(j, Wp, history, cfg);
            const std::vector<double> Rm = residual(j, Wm, history, cfg);
            for (int i = 0; i < n; ++i) {
                const double fd = (Rp[i] - Rm[i]) / (2.0 * eps);
                worst = std::max(worst, std::fabs(fd - Ja.at(i, m)) / scale);
            }
        }
    }
    return {worst <= 1e-5, "max rel deviation " + num(worst) + " (tol 1e-5)"};
}

// ---------------------------------------------------------------- criterion 5
Outcome c5_linear_oracle() {
    double min_order = 1e9;
    bool monotone = true;
    const Mesh1D mesh = build_mesh(32);
    for (double a : {0.3, 0.5, 0.7}) {
        const spectral::SpectralSolution oracle = spectral::build(mesh, a, SineMode{1});
        double prev = 0.0;
        bool first = true;
        for (int J : {16, 32, 64, 128}) {
            SolverConfig cfg;
            cfg.mesh = mesh;
            cfg.grid = graded_grid(J, 2.0, 1.0);
            cfg.alpha = a;
            cfg.nonlinearity = nl_zero();
            cfg.u0 = SineMode{1};
            const SlabSequence dg = as_slabs(solve(cfg));
            const SlabSequence avg{mesh, cfg.grid, p_tau_project(oracle, cfg.grid)};
            const double e3 = error_e2_e3(dg, avg).second;
            if (!first) {
                if (!(e3 < prev)) monotone = false;
                min_order = std::min(min_order, std::log2(prev / e3));
            }
            prev = e3;
            first = false;
        }
    }
    return {monotone && min_order >= 0.4,
            std::string(monotone ? "errors strictly decrease" : "NOT monotone") +
                ", min observed order " + num(min_order) + " (>= 0.4)"};
}

// ------------------------------------------------------- criteria 6 through 8
struct OrderWindow {
    const char* label;
    std::vector<double> orders;
    double center, halfwidth;
    bool ok() const {
        for (double o : orders)
            if (std::fabs(o - center) > halfwidth) return false;
        return true;
    }
    std::string show() const {
        std::string s = std::string(label) + " [";
        for (std::size_t i = 0; i < orders.size(); ++i)
            s += (i ? "," : "") + num(orders[i]);
        return s + "] in " + num(center) + "+-" + num(halfwidth);
    }
};

Outcome windows_outcome(const std::vector<OrderWindow>& ws) {
    bool pass = true;
    std::string detail;
    for (const OrderWindow& w : ws) {
        pass = pass && w.ok();
        detail += (detail.empty() ? "" : "; ") + w.show();
    }
    return {pass, detail};
}

SlabSequence run_case(const Mesh1D& mesh, const GradedGrid& grid, double alpha, const U0Spec& u0) {
    SolverConfig cfg;
    cfg.mesh = mesh;
    cfg.grid = grid;
    cfg.alpha = alpha;
    cfg.nonlinearity = nl_sqrt1p();
    cfg.u0 = u0;
    return as_slabs(solve(cfg));
}

Outcome c6_experiment1() {
    const double a = 0.5;
    const U0Spec u0 = PowerLaw{-0.49};
    const GradedGrid grid = graded_grid(1 << 10, 2.2, 1.0);
    const SlabSequence ref = run_case(build_mesh(256), grid, a, u0);
    std::vector<std::pair<double, double>> r0, r2, r3;
    for (int n : {8, 16, 32}) {
        const ErrorReport e = error_report(run_case(build_mesh(n), grid, a, u0), ref, a);
        r0.push_back({double(n), e.e0});
        r2.push_back({double(n), e.e2});
        r3.push_back({double(n), e.e3});
    }
    return windows_outcome({{"E0", observed_order(r0), 1.96, 0.15},
                            {"E2", observed_order(r2), 0.86, 0.15},
                            {"E3", observed_order(r3), 1.85, 0.20}});
}

Outcome c7_experiment2() {
    const double a = 0.5;
    const U0Spec u0 = PowerLaw{-0.49};
    const Mesh1D mesh = build_mesh(128);
    const SlabSequence ref = run_case(mesh, graded_grid(1 << 11, 2.2, 1.0), a, u0);
    std::vector<std::pair<double, double>> r1, r3;
    for (int J : {32, 64, 128}) {
        const ErrorReport e = error_report(run_case(mesh, graded_grid(J, 1.0, 1.0), a, u0), ref, a);
        r1.push_back({double(J), e.e1});
        r3.push_back({double(J), e.e3});
    }
    return windows_outcome(
        {{"E3", observed_order(r3), 0.52, 0.15}, {"E1", observed_order(r1), 0.28, 0.15}});
}

Outcome c8_experiment3() {
    const double a = 0.5;
    const U0Spec u0 = PowerProduct{0.51};
    const Mesh1D mesh = build_mesh(128);
    const SlabSequence ref = run_case(mesh, graded_grid(1 << 11, 2.2, 1.0), a, u0);
    std::vector<OrderWindow> ws;
    for (double sigma : {2.0, 1.0}) {
        std::vector<std::pair<double, double>> r1, r3;
        for (int J : {64, 128, 256}) {
            const ErrorReport e =
                error_report(run_case(mesh, graded_grid(J, sigma, 1.0), a, u0), ref, a);
            r1.push_back({double(J), e.e1});
            r3.push_back({double(J), e.e3});
        }
        if (sigma == 2.0) {
            ws.push_back({"s2:E3", observed_order(r3), 1.00, 0.15});
            ws.push_back({"s2:E1", observed_order(r1), 0.74, 0.15});
        } else {
            ws.push_back({"s1:E3", observed_order(r3), 0.69, 0.15});
        }
    }
    return windows_outcome(ws);
}

// ---------------------------------------------------------------- criterion 9
Outcome c9_stability_gate() {
    std::mt19937 rng(911);
    std::uniform_real_distribution<double> da(0.15, 0.9), dL(0.25, 8.0);
    int solves = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double a = da(rng), L = dL(rng);
        const double bound = stability_bound(a, L);
        auto grid_with_final_tau = [&](double frac) {
            return graded_grid(2, 1.0, 2.0 * frac * bound);  // uniform: tau_J = T/2
        };
        if (check_stability(grid_with_final_tau(1.01), a, L) != StabilityVerdict::reject ||
            check_stability(grid_with_final_tau(0.6), a, L) != StabilityVerdict::warn ||
            check_stability(grid_with_final_tau(0.3), a, L) != StabilityVerdict::ok)
            return {false, "verdict wrong at alpha=" + num(a) + " L=" + num(L)};
        if (trial % 10 != 0) continue;
        ++solves;
        SolverConfig cfg;  // end-to-end: solve() must refuse / warn / run
        cfg.mesh = build_mesh(8);
        cfg.alpha = a;
        cfg.nonlinearity = nl_linear(-L);
        cfg.u0 = SineMode{1};
        cfg.grid = grid_with_final_tau(1.01);
        bool rejected = false;
        try {
            solve(cfg);
        } catch (const StabilityError&) {
            rejected = true;
        }
        if (!rejected) return {false, "solve accepted tau_J above the bound"};
        cfg.grid = grid_with_final_tau(0.6);
        if (solve(cfg).stability != StabilityVerdict::warn)
            return {false, "solve missing warn verdict"};
    }
    return {true, "200 random (alpha,L) verdicts + " + std::to_string(solves) +
                      " end-to-end rejections/warns"};
}

// --------------------------------------------------------------- criterion 10
Outcome c10_energy_nonnegativity() {
    std::mt19937 rng(1010);
    std::uniform_real_distribution<double> da(0.1, 0.95), ds(1.0, 2.5), du(-1.0, 1.0);
    double min_nonzero = 1e300;
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = da(rng);
        const GradedGrid ga = graded_grid(2 + int(rng() % 11u), ds(rng), 1.0);
        const GradedGrid gb = graded_grid(2 + int(rng() % 11u), ds(rng), 1.0);
        const GradedGrid gm = grid_from_breakpoints(merge(ga, gb).breakpoints);
        const Mesh1D mesh = build_mesh(4 << (rng() % 3u));
        const int n = mesh.n_interior();
        SlabSequence e{mesh, gm, {}}, zero{mesh, gm, {}};
        for (int j = 0; j < gm.J; ++j) {
            FeFunction v{mesh, std::vector<double>(n)};
            for (double& c : v.coeffs) c = du(rng);
            e.slabs.push_back(v);
            zero.slabs.push_back(FeFunction::zero(mesh));
        }
        e.slabs[0].coeffs[0] = 1.0;  // guarantee e is genuinely nonzero
        bool clamped = false;
        const double q = frac_energy(e, zero, a, &clamped);
        if (clamped) return {false, "clamp triggered (Q < -1e-9*scale) on trial " +
                                        std::to_string(trial)};
        min_nonzero = std::min(min_nonzero, q);
        if (trial % 50 == 0 && frac_energy(zero, zero, a) != 0.0)
            return {false, "frac_energy(0) != 0"};
    }
    return {min_nonzero > 1e-8,
            "1000 random merged-grid energies, no clamp; min nonzero value " + num(min_nonzero)};
}

// --------------------------------------------------------------- criterion 11
Outcome c11_determinism() {
    const fs::path tmp =
        fs::temp_directory_path() / ("fdk-accept-" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    ExperimentConfig cfg = desk_config(2);
    cfg.deterministic = true;
    cfg.cache_dir = (tmp / "cache").string();
    auto run_to = [&](const char* name) {
        cfg.out_csv = (tmp / name).string();
        run_experiment(cfg);
        std::ifstream is(cfg.out_csv, std::ios::binary);
        std::ostringstream buf;
        buf << is.rdbuf();
        return buf.str();
    };
    const std::string first = run_to("run1.csv");
    const std::string second = run_to("run2.csv");
    fs::remove_all(tmp);
    if (first.empty()) return {false, "empty CSV"};
    if (first != second) return {false, "CSV bytes differ between runs"};
    return {true, "experiment 2 desk CSV byte-identical across runs (" +
                      std::to_string(first.size()) + " bytes)"};
}

}  // namespace

int run_acceptance(std::ostream& os) {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"weight telescoping identity", c1_telescoping},
        {"Mittag-Leffler reference values & branch overlap", c2_mittag_leffler},
        {"closed-form eigenpairs vs dense solve", c3_eigen_oracle},
        {"Jacobian vs finite differences", c4_jacobian_fd},
        {"DG vs spectral oracle convergence (f=0)", c5_linear_oracle},
        {"experiment 1 orders (h-refinement)", c6_experiment1},
        {"experiment 2 orders (uniform-grid J-refinement)", c7_experiment2},
        {"experiment 3 orders (graded-grid J-refinement)", c8_experiment3},
        {"stability gate", c9_stability_gate},
        {"frac_energy nonnegativity", c10_energy_nonnegativity},
        {"CSV determinism", c11_determinism},
    };
    int failures = 0;
    int idx = 0;
    for (const Criterion& c : criteria) {
        ++idx;
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failures;
        char head[80];
        std::snprintf(head, sizeof head, "[%s] %2d %-48s ", out.pass ? "PASS" : "FAIL", idx,
                      c.name);
        os << head << out.detail << "\n";
        os.flush();
    }
    os << (failures == 0 ? "acceptance: all 11 criteria passed\n"
                         : "acceptance: " + std::to_string(failures) + " of 11 criteria FAILED\n");
    return failures;
}

}  // namespace fdk
