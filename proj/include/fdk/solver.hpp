// Full discretization of D^a(u - u0) - Lap(u) = f(u): piecewise-constant DG
// in time on a graded grid, P1 FEM in space, one Newton solve per interval.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fdk/fracquad.hpp"
#include "fdk/mesh.hpp"
#include "fdk/nonlinearity.hpp"

namespace fdk {

struct SolverConfig {
    Mesh1D mesh;
    GradedGrid grid;
    double alpha = 0.5;
    NonlinearSpec nonlinearity;
    U0Spec u0;
    double newton_tol = 1e-13;  // on the l2 norm of the residual
    int newton_max_iter = 50;
    int quadrature_points = 3;  // Gauss points per element for the f terms
};

struct SpaceTimeSolution {
    Mesh1D mesh;
    GradedGrid grid;
    double alpha = 0.5;
    std::string nonlinearity_name;
    std::string u0_text;
    FeFunction u0h;                  // P_h u0
    std::vector<FeFunction> slabs;   // U_1..U_J
    std::vector<int> newton_iters;   // per step
    StabilityVerdict stability = StabilityVerdict::ok;
};

// tau_J at or above the stability bound: the per-step problems may lose
// unique solvability, so the configuration is refused before stepping.
struct StabilityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StepFailure : std::runtime_error {
    int j;
    double residual_norm;
    StepFailure(int j_, double rn, const std::string& what)
        : std::runtime_error(what), j(j_), residual_norm(rn) {}
};

// Residual of the interval-j nonlinear system at state W:
//   R(W) = sum_{k<j} b_{j,k} M (U_k - u0h) + b_{j,j} M (W - u0h)
//        + tau_j A W - tau_j F(W),
// with F(W)_i = int f(W) phi_i by per-element Gauss quadrature.
std::vector<double> residual(int j, const FeFunction& W, const std::vector<FeFunction>& history,
                             const SolverConfig& cfg);

// Newton linearization: b_{j,j} M + tau_j A - tau_j M_{f'(W)}.
TridiagonalMatrix jacobian(int j, const FeFunction& W, const SolverConfig& cfg);

// One Newton-solved interval given slabs 1..j-1. Throws StepFailure on
// non-convergence.
FeFunction step(int j, const std::vector<FeFunction>& history, const SolverConfig& cfg);

// Marches j = 1..J. Throws StabilityError up front when tau_J is at or above
// stability_bound(alpha, L); a verdict of `warn` is recorded on the solution
// but does not stop the run.
SpaceTimeSolution solve(const SolverConfig& cfg);

// Binary solution cache: header (magic "FDK1", alpha, sigma, T as f64; J,
// n_cells as u32; length-prefixed nonlinearity name and u0 spec), then
// (J+1)*(n_cells-1) little-endian f64 payload (u0h, then slabs in order).
// Round-trips bit-exactly.
void save_solution(const SpaceTimeSolution& sol, const std::string& path);
SpaceTimeSolution load_solution(const std::string& path);

}  // namespace fdk
