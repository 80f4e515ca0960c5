// Uniform 1D P1 finite elements on (0,1) with homogeneous Dirichlet BCs:
// meshes, tridiagonal mass/stiffness assembly, L2 projection of initial data,
// closed-form discrete eigenpairs, FE norms, and nested-mesh prolongation.
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fdk {

struct Mesh1D {
    int n_cells = 0;   // >= 2
    double h = 0.0;    // 1 / n_cells

    int n_interior() const { return n_cells - 1; }
    double node(int i) const { return i * h; }  // i = 0..n_cells
    bool operator==(const Mesh1D&) const = default;
};

// Throws std::invalid_argument for n_cells < 2.
Mesh1D build_mesh(int n_cells);

// Interior nodal values of a P1 function; boundary values are identically 0.
struct FeFunction {
    Mesh1D mesh;
    std::vector<double> coeffs;  // size mesh.n_interior()

    FeFunction() = default;
    FeFunction(Mesh1D m, std::vector<double> c) : mesh(m), coeffs(std::move(c)) {}
    static FeFunction zero(Mesh1D m) { return {m, std::vector<double>(m.n_interior(), 0.0)}; }
};

// Symmetric tridiagonal storage for the interior-node matrices (size n_cells-1).
struct TridiagonalMatrix {
    std::vector<double> sub, diag, super;

    std::size_t size() const { return diag.size(); }
};

TridiagonalMatrix assemble_mass(const Mesh1D& mesh);       // diag 2h/3, off h/6
TridiagonalMatrix assemble_stiffness(const Mesh1D& mesh);  // diag 2/h,  off -1/h

std::vector<double> tri_matvec(const TridiagonalMatrix& T, const std::vector<double>& x);

// Thomas algorithm (no pivoting; all our systems are strictly diagonally
// dominant or SPD). Throws std::runtime_error on a vanishing pivot.
std::vector<double> thomas_solve(const TridiagonalMatrix& T, std::vector<double> rhs);

// x^T T y for symmetric T; the building block of fe_norms and all inner products.
double tri_quadratic_form(const TridiagonalMatrix& T, const std::vector<double>& x,
                          const std::vector<double>& y);

// ---- initial-datum specifications -----------------------------------------

struct PowerLaw {      // u0(x) = x^gamma, gamma > -1/2
    double gamma;
};
struct PowerProduct {  // u0(x) = x^gamma (1-x)
    double gamma;
};
struct SineMode {      // u0(x) = sin(k pi x)
    int k;
};
struct CallableU0 {    // arbitrary integrable u0; projected by adaptive quadrature
    std::function<double(double)> f;
    std::string label;  // stable identifier for caching/serialization
};

using U0Spec = std::variant<PowerLaw, PowerProduct, SineMode, CallableU0>;

// Stable textual form, e.g. "power_law:-0.49", "sine:1"; used by cache keys
// and the solution file header.
std::string u0_to_string(const U0Spec& u0);
// Inverse of u0_to_string for the closed-form families (callables cannot be
// reconstructed; throws std::invalid_argument on unknown text).
U0Spec u0_from_string(const std::string& text);

double u0_value(const U0Spec& u0, double x);

// L2-orthogonal projection P_h u0 onto the interior P1 space: solves M c = b
// with b computed by analytic antiderivatives for the closed-form families and
// adaptive Gauss quadrature for callables. Throws std::invalid_argument for
// gamma <= -1/2 (not in L2).
FeFunction l2_project(const U0Spec& u0, const Mesh1D& mesh);

// ---- spectra and norms ----------------------------------------------------

struct EigenPair {
    double lambda;
    FeFunction vec;  // M-orthonormalized
};

// Closed-form eigenpairs of A v = lambda M v on the uniform mesh:
//   lambda_k = 6 (1 - cos(k pi h)) / (h^2 (2 + cos(k pi h))),  v_k ~ sin(k pi x_i),
// k = 1..n_cells-1, ordered increasing.
std::vector<EigenPair> discrete_eigenpairs(const Mesh1D& mesh);

struct FeNorms {
    double l2;
    double h1;  // H1 seminorm (= full H1_0 norm here)
};

FeNorms fe_norms(const FeFunction& v);

// Exact re-representation of v on a nested finer mesh (linear interpolation at
// the new nodes). Throws std::invalid_argument for non-nested meshes.
FeFunction prolong(const FeFunction& v, const Mesh1D& fine);

// Nodal restriction of v to a nested coarser mesh (samples shared nodes; exact
// for data living on the coarse mesh). Throws for non-nested meshes.
FeFunction restrict_nodal(const FeFunction& v, const Mesh1D& coarse);

}  // namespace fdk
