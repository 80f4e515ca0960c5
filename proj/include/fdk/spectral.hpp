// Semidiscrete solution of the linear problem (f = 0) by eigenexpansion:
//   u_h(t) = sum_k E_{alpha,1}(-lambda_k^h t^alpha) <P_h u0, phi_k>_M phi_k,
// the independent oracle the DG solver is checked against.
#pragma once

#include <vector>

#include "fdk/fracquad.hpp"
#include "fdk/mesh.hpp"

namespace fdk::spectral {

struct SpectralSolution {
    Mesh1D mesh;
    double alpha = 0.5;
    double T = 1.0;                // evaluation horizon
    std::vector<double> lambdas;   // discrete eigenvalues, increasing
    std::vector<double> coeffs;    // modal coefficients of P_h u0
    std::vector<FeFunction> modes; // M-orthonormal eigenvectors
};

SpectralSolution build(const Mesh1D& mesh, double alpha, const U0Spec& u0, double T = 1.0);

// u_h(t); t = 0 returns P_h u0 exactly. Throws for t outside [0, T].
FeFunction evaluate(const SpectralSolution& sol, double t);

// Per-interval averages (1/tau_j) int_{t_{j-1}}^{t_j} u_h dt; the scalar mode
// integrals use adaptive Gauss-Kronrod with absolute target 1e-10 per mode,
// with one extra forced bisection on the first interval where u_h' ~ t^{a-1}.
std::vector<FeFunction> interval_averages(const SpectralSolution& sol, const GradedGrid& grid);

}  // namespace fdk::spectral
