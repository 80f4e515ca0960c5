// Error functionals E0-E3 between two piecewise-constant-in-time FE solutions
// on different temporal grids and nested spatial meshes, plus interval-average
// projection and observed convergence orders.
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fdk/fracquad.hpp"
#include "fdk/mesh.hpp"
#include "fdk/solver.hpp"
#include "fdk/spectral.hpp"

namespace fdk {

// The comparison surface: any solution reduced to (mesh, grid, slabs).
struct SlabSequence {
    Mesh1D mesh;
    GradedGrid grid;
    std::vector<FeFunction> slabs;  // one per interval
};

SlabSequence as_slabs(const SpaceTimeSolution& sol);

struct MergedTimeline {
    std::vector<double> breakpoints;  // sorted union, deduplicated at 1e-14*T
    std::vector<int> idx_a, idx_b;    // merged interval -> source slab index (0-based)
};

// Throws std::invalid_argument when the horizons differ.
MergedTimeline merge(const GradedGrid& grid_a, const GradedGrid& grid_b);

// E0: H1 seminorm of the final-slab difference. Nested-mesh comparisons
// sample both solutions at the nodes of the coarser mesh (nested nodes make
// the sampling exact and preserve the nodal second-order accuracy that
// prolongation to the finer mesh would mask behind its O(h) H1 interpolation
// error). Throws for non-nested meshes.
double error_e0(const SlabSequence& U, const SlabSequence& Uref);

// E2 (L2-in-time of H1) and E3 (L2-in-time of L2): exact sums over merged
// intervals with both solutions prolonged to the finer mesh.
std::pair<double, double> error_e2_e3(const SlabSequence& U, const SlabSequence& Uref);

// E1 surrogate: Q = sum_j sum_{k<=j} b_{j,k}(merged, alpha) <e_k, e_j>_{L2},
// returned as sqrt(max(Q, 0)). Roundoff can push Q slightly negative; if it
// falls below -1e-9 * (diagonal part of Q) the clamp flag is raised.
double frac_energy(const SlabSequence& U, const SlabSequence& Uref, double alpha,
                   bool* clamped = nullptr);

struct ErrorReport {
    double e0 = 0.0, e1 = 0.0, e2 = 0.0, e3 = 0.0;
    bool e1_clamped = false;
};

ErrorReport error_report(const SlabSequence& U, const SlabSequence& Uref, double alpha);

// Orders between consecutive rows of (param, error): log2(err_prev/err_cur)
// normalized by the param's doubling/halving factor. Throws on nonpositive
// errors or fewer than two rows.
std::vector<double> observed_order(const std::vector<std::pair<double, double>>& rows);

// Interval averages of a continuous-time evaluator over the grid, using the
// Gauss-Kronrod policy of the spectral oracle (vector integrand, absolute
// target 1e-10, forced first-interval bisection).
std::vector<FeFunction> p_tau_project(const std::function<FeFunction(double)>& v,
                                      const GradedGrid& grid, const Mesh1D& mesh);

// Spectral overload: delegates to spectral::interval_averages (same code path).
std::vector<FeFunction> p_tau_project(const spectral::SpectralSolution& sol,
                                      const GradedGrid& grid);

}  // namespace fdk
