#include "fdk/mesh.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fdk/quadrature.hpp"

namespace fdk {

Mesh1D build_mesh(int n_cells) {
    if (n_cells < 2) throw std::invalid_argument("build_mesh: n_cells must be >= 2");
    return Mesh1D{n_cells, 1.0 / n_cells};
}

TridiagonalMatrix assemble_mass(const Mesh1D& mesh) {
    const int n = mesh.n_interior();
    TridiagonalMatrix M;
    M.diag.assign(n, 2.0 * mesh.h / 3.0);
    M.sub.assign(n - 1, mesh.h / 6.0);
    M.super = M.sub;
    return M;
}

TridiagonalMatrix assemble_stiffness(const Mesh1D& mesh) {
    const int n = mesh.n_interior();
    TridiagonalMatrix A;
    A.diag.assign(n, 2.0 / mesh.h);
    A.sub.assign(n - 1, -1.0 / mesh.h);
    A.super = A.sub;
    return A;
}

std::vector<double> tri_matvec(const TridiagonalMatrix& T, const std::vector<double>& x) {
    const std::size_t n = T.size();
    if (x.size() != n) throw std::invalid_argument("tri_matvec: size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = T.diag[i] * x[i];
        if (i > 0) v += T.sub[i - 1] * x[i - 1];
        if (i + 1 < n) v += T.super[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> thomas_solve(const TridiagonalMatrix& T, std::vector<double> rhs) {
    const std::size_t n = T.size();
    if (rhs.size() != n) throw std::invalid_argument("thomas_solve: size mismatch");
    std::vector<double> c(n > 0 ? n - 1 : 0);  // modified superdiagonal
    std::vector<double>& d = rhs;              // modified rhs, solved in place
    double piv = T.diag[0];
    if (piv == 0.0) throw std::runtime_error("thomas_solve: zero pivot at row 0");
    if (n > 1) c[0] = T.super[0] / piv;
    d[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = T.diag[i] - T.sub[i - 1] * c[i - 1];
        if (piv == 0.0) throw std::runtime_error("thomas_solve: zero pivot");
        if (i + 1 < n) c[i] = T.super[i] / piv;
        d[i] = (d[i] - T.sub[i - 1] * d[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    return rhs;
}

double tri_quadratic_form(const TridiagonalMatrix& T, const std::vector<double>& x,
                          const std::vector<double>& y) {
    const std::size_t n = T.size();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("tri_quadratic_form: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = T.diag[i] * y[i];
        if (i > 0) row += T.sub[i - 1] * y[i - 1];
        if (i + 1 < n) row += T.super[i] * y[i + 1];
        s += x[i] * row;
    }
    return s;
}

// ---- initial data ----------------------------------------------------------

std::string u0_to_string(const U0Spec& u0) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* p = std::get_if<PowerLaw>(&u0)) {
        os << "power_law:" << p->gamma;
    } else if (const auto* q = std::get_if<PowerProduct>(&u0)) {
        os << "power_product:" << q->gamma;
    } else if (const auto* s = std::get_if<SineMode>(&u0)) {
        os << "sine:" << s->k;
    } else {
        os << "callable:" << std::get<CallableU0>(u0).label;
    }
    return os.str();
}

U0Spec u0_from_string(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("u0_from_string: malformed spec " + text);
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    if (kind == "power_law") return PowerLaw{std::stod(arg)};
    if (kind == "power_product") return PowerProduct{std::stod(arg)};
    if (kind == "sine") return SineMode{std::stoi(arg)};
    throw std::invalid_argument("u0_from_string: cannot reconstruct spec " + text);
}

double u0_value(const U0Spec& u0, double x) {
    if (const auto* p = std::get_if<PowerLaw>(&u0)) return std::pow(x, p->gamma);
    if (const auto* q = std::get_if<PowerProduct>(&u0)) return std::pow(x, q->gamma) * (1.0 - x);
    if (const auto* s = std::get_if<SineMode>(&u0)) return std::sin(s->k * std::numbers::pi * x);
    return std::get<CallableU0>(u0).f(x);
}

namespace {

// int_a^b x^p dx, valid for p > -1.
double power_integral(double a, double b, double p) {
    return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

// Load of x^gamma against the hat at interior node i: the monomial times a
// linear factor integrates in closed form, which keeps the x -> 0 endpoint
// singularity (gamma down to -1/2) exact instead of feeding it to quadrature.
double hat_load_power(const Mesh1D& mesh, int i, double gamma) {
    const double h = mesh.h;
    const double xm = mesh.node(i - 1), xi = mesh.node(i), xp = mesh.node(i + 1);
    const double left = (power_integral(xm, xi, gamma + 1.0) - xm * power_integral(xm, xi, gamma)) / h;
    const double right = (xp * power_integral(xi, xp, gamma) - power_integral(xi, xp, gamma + 1.0)) / h;
    return left + right;
}

std::vector<double> load_vector(const U0Spec& u0, const Mesh1D& mesh) {
    const int n = mesh.n_interior();
    std::vector<double> b(n);
    if (const auto* p = std::get_if<PowerLaw>(&u0)) {
        if (p->gamma <= -0.5) throw std::invalid_argument("l2_project: x^gamma with gamma <= -1/2 is not in L2");
        for (int i = 1; i <= n; ++i) b[i - 1] = hat_load_power(mesh, i, p->gamma);
    } else if (const auto* q = std::get_if<PowerProduct>(&u0)) {
        if (q->gamma <= -0.5) throw std::invalid_argument("l2_project: x^gamma(1-x) with gamma <= -1/2 is not in L2");
        for (int i = 1; i <= n; ++i)
            b[i - 1] = hat_load_power(mesh, i, q->gamma) - hat_load_power(mesh, i, q->gamma + 1.0);
    } else if (const auto* s = std::get_if<SineMode>(&u0)) {
        const double w = s->k * std::numbers::pi;
        const double factor = 2.0 * (1.0 - std::cos(w * mesh.h)) / (w * w * mesh.h);
        for (int i = 1; i <= n; ++i) b[i - 1] = factor * std::sin(w * mesh.node(i));
    } else {
        const auto& fn = std::get<CallableU0>(u0).f;
        for (int i = 1; i <= n; ++i) {
            const double xm = mesh.node(i - 1), xi = mesh.node(i), xp = mesh.node(i + 1);
            const double h = mesh.h;
            auto left = [&](double x) { return fn(x) * (x - xm) / h; };
            auto right = [&](double x) { return fn(x) * (xp - x) / h; };
            b[i - 1] = adaptive_gauss_kronrod(left, xm, xi, 1e-10) +
                       adaptive_gauss_kronrod(right, xi, xp, 1e-10);
        }
    }
    return b;
}

}  // namespace

FeFunction l2_project(const U0Spec& u0, const Mesh1D& mesh) {
    const TridiagonalMatrix M = assemble_mass(mesh);
    return FeFunction{mesh, thomas_solve(M, load_vector(u0, mesh))};
}

// ---- eigenpairs and norms --------------------------------------------------

std::vector<EigenPair> discrete_eigenpairs(const Mesh1D& mesh) {
    const int n = mesh.n_interior();
    const double h = mesh.h;
    std::vector<EigenPair> pairs;
    pairs.reserve(n);
    for (int k = 1; k <= n; ++k) {
        const double c = std::cos(k * std::numbers::pi * h);
        const double lambda = 6.0 * (1.0 - c) / (h * h * (2.0 + c));
        // M v = (h/3)(2+c) v for the sine vector, so v^T M v = (h/3)(2+c) * n/2.
        const double norm = std::sqrt((h / 3.0) * (2.0 + c) * (mesh.n_cells / 2.0));
        FeFunction v{mesh, std::vector<double>(n)};
        for (int i = 1; i <= n; ++i)
            v.coeffs[i - 1] = std::sin(k * std::numbers::pi * mesh.node(i)) / norm;
        pairs.push_back({lambda, std::move(v)});
    }
    return pairs;
}

FeNorms fe_norms(const FeFunction& v) {
    const TridiagonalMatrix M = assemble_mass(v.mesh);
    const TridiagonalMatrix A = assemble_stiffness(v.mesh);
    const double qm = tri_quadratic_form(M, v.coeffs, v.coeffs);
    const double qa = tri_quadratic_form(A, v.coeffs, v.coeffs);
    return {std::sqrt(std::max(qm, 0.0)), std::sqrt(std::max(qa, 0.0))};
}

FeFunction prolong(const FeFunction& v, const Mesh1D& fine) {
    const int nc = v.mesh.n_cells, nf = fine.n_cells;
    if (nf % nc != 0) throw std::invalid_argument("prolong: meshes are not nested");
    const int r = nf / nc;
    FeFunction out{fine, std::vector<double>(fine.n_interior())};
    auto coarse_at = [&](int node) {  // nodal value, boundary = 0
        return (node <= 0 || node >= nc) ? 0.0 : v.coeffs[node - 1];
    };
    for (int j = 1; j < nf; ++j) {
        const int q = j / r, rem = j % r;
        out.coeffs[j - 1] = rem == 0
            ? coarse_at(q)
            : coarse_at(q) + (coarse_at(q + 1) - coarse_at(q)) * (double(rem) / r);
    }
    return out;
}

FeFunction restrict_nodal(const FeFunction& v, const Mesh1D& coarse) {
    const int nf = v.mesh.n_cells, nc = coarse.n_cells;
    if (nf % nc != 0) throw std::invalid_argument("restrict_nodal: meshes are not nested");
    const int r = nf / nc;
    FeFunction out{coarse, std::vector<double>(coarse.n_interior())};
    for (int i = 1; i < nc; ++i) out.coeffs[i - 1] = v.coeffs[i * r - 1];
    return out;
}

}  // namespace fdk
