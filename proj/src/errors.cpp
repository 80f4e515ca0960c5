#include "fdk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdk/quadrature.hpp"

namespace fdk {

SlabSequence as_slabs(const SpaceTimeSolution& sol) {
    return {sol.mesh, sol.grid, sol.slabs};
}

MergedTimeline merge(const GradedGrid& grid_a, const GradedGrid& grid_b) {
    if (std::abs(grid_a.T - grid_b.T) > 1e-14 * std::max(grid_a.T, grid_b.T))
        throw std::invalid_argument("merge: grids have different horizons");
    const double tol = 1e-14 * grid_a.T;
    MergedTimeline m;
    std::vector<double> u;
    u.reserve(grid_a.times.size() + grid_b.times.size());
    u.insert(u.end(), grid_a.times.begin(), grid_a.times.end());
    u.insert(u.end(), grid_b.times.begin(), grid_b.times.end());
    std::sort(u.begin(), u.end());
    for (double t : u)
        if (m.breakpoints.empty() || t - m.breakpoints.back() > tol) m.breakpoints.push_back(t);
    m.breakpoints.front() = 0.0;
    m.breakpoints.back() = grid_a.T;
    // Source slab containing each merged interval, located by its midpoint.
    auto locate = [](const GradedGrid& g, double mid) {
        const auto it = std::upper_bound(g.times.begin(), g.times.end(), mid);
        return static_cast<int>(it - g.times.begin()) - 1;  // 0-based slab index
    };
    const int n = static_cast<int>(m.breakpoints.size()) - 1;
    m.idx_a.resize(n);
    m.idx_b.resize(n);
    for (int i = 0; i < n; ++i) {
        const double mid = 0.5 * (m.breakpoints[i] + m.breakpoints[i + 1]);
        m.idx_a[i] = std::min(locate(grid_a, mid), grid_a.J - 1);
        m.idx_b[i] = std::min(locate(grid_b, mid), grid_b.J - 1);
    }
    return m;
}

namespace {

void require_nested(const Mesh1D& a, const Mesh1D& b) {
    const int lo = std::min(a.n_cells, b.n_cells), hi = std::max(a.n_cells, b.n_cells);
    if (hi % lo != 0) throw std::invalid_argument("error functionals require nested meshes");
}

// Both solutions' slabs re-expressed on the finer of the two meshes.
struct FinePair {
    Mesh1D mesh;
    std::vector<FeFunction> a, b;
};

FinePair on_fine_mesh(const SlabSequence& U, const SlabSequence& Uref) {
    require_nested(U.mesh, Uref.mesh);
    const Mesh1D fine = U.mesh.n_cells >= Uref.mesh.n_cells ? U.mesh : Uref.mesh;
    FinePair fp;
    fp.mesh = fine;
    fp.a.reserve(U.slabs.size());
    fp.b.reserve(Uref.slabs.size());
    for (const FeFunction& s : U.slabs)
        fp.a.push_back(s.mesh.n_cells == fine.n_cells ? s : prolong(s, fine));
    for (const FeFunction& s : Uref.slabs)
        fp.b.push_back(s.mesh.n_cells == fine.n_cells ? s : prolong(s, fine));
    return fp;
}

}  // namespace

double error_e0(const SlabSequence& U, const SlabSequence& Uref) {
    require_nested(U.mesh, Uref.mesh);
    const Mesh1D coarse = U.mesh.n_cells <= Uref.mesh.n_cells ? U.mesh : Uref.mesh;
    const FeFunction& ua = U.slabs.back();
    const FeFunction& ub = Uref.slabs.back();
    const FeFunction ra = ua.mesh.n_cells == coarse.n_cells ? ua : restrict_nodal(ua, coarse);
    const FeFunction rb = ub.mesh.n_cells == coarse.n_cells ? ub : restrict_nodal(ub, coarse);
    FeFunction d{coarse, std::vector<double>(coarse.n_interior())};
    for (std::size_t i = 0; i < d.coeffs.size(); ++i) d.coeffs[i] = ra.coeffs[i] - rb.coeffs[i];
    return fe_norms(d).h1;
}

std::pair<double, double> error_e2_e3(const SlabSequence& U, const SlabSequence& Uref) {
    const FinePair fp = on_fine_mesh(U, Uref);
    const MergedTimeline m = merge(U.grid, Uref.grid);
    const TridiagonalMatrix M = assemble_mass(fp.mesh);
    const TridiagonalMatrix A = assemble_stiffness(fp.mesh);
    const int ni = fp.mesh.n_interior();
    std::vector<double> d(ni);
    double q2 = 0.0, q3 = 0.0;
    const int n = static_cast<int>(m.breakpoints.size()) - 1;
    for (int i = 0; i < n; ++i) {
        const double len = m.breakpoints[i + 1] - m.breakpoints[i];
        const std::vector<double>& a = fp.a[m.idx_a[i]].coeffs;
        const std::vector<double>& b = fp.b[m.idx_b[i]].coeffs;
        for (int l = 0; l < ni; ++l) d[l] = a[l] - b[l];
        q2 += len * tri_quadratic_form(A, d, d);
        q3 += len * tri_quadratic_form(M, d, d);
    }
    return {std::sqrt(std::max(q2, 0.0)), std::sqrt(std::max(q3, 0.0))};
}

double frac_energy(const SlabSequence& U, const SlabSequence& Uref, double alpha, bool* clamped) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("frac_energy: alpha must lie in (0,1)");
    const FinePair fp = on_fine_mesh(U, Uref);
    const MergedTimeline m = merge(U.grid, Uref.grid);
    const TridiagonalMatrix M = assemble_mass(fp.mesh);
    const int ni = fp.mesh.n_interior();
    const int n = static_cast<int>(m.breakpoints.size()) - 1;

    // e_j on the merged timeline and its mass image, formed once.
    std::vector<std::vector<double>> e(n, std::vector<double>(ni));
    std::vector<std::vector<double>> Me(n);
    for (int i = 0; i < n; ++i) {
        const std::vector<double>& a = fp.a[m.idx_a[i]].coeffs;
        const std::vector<double>& b = fp.b[m.idx_b[i]].coeffs;
        for (int l = 0; l < ni; ++l) e[i][l] = a[l] - b[l];
        Me[i] = tri_matvec(M, e[i]);
    }

    const ConvWeights weights(grid_from_breakpoints(m.breakpoints), alpha);
    std::vector<double> scratch, acc(ni);
    double q = 0.0, diag_scale = 0.0;
    for (int j = 1; j <= n; ++j) {
        const std::vector<double>& b = weights.row(j, scratch);
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int k = 1; k <= j; ++k) {
            const double bk = b[k - 1];
            const std::vector<double>& mek = Me[k - 1];
            for (int l = 0; l < ni; ++l) acc[l] += bk * mek[l];
        }
        double qj = 0.0, dj = 0.0;
        for (int l = 0; l < ni; ++l) {
            qj += acc[l] * e[j - 1][l];
            dj += Me[j - 1][l] * e[j - 1][l];
        }
        q += qj;
        diag_scale += b[j - 1] * dj;  // b_{j,j} ||e_j||^2: positive magnitude of Q
    }
    if (clamped) *clamped = q < -1e-9 * diag_scale;
    return std::sqrt(std::max(q, 0.0));
}

ErrorReport error_report(const SlabSequence& U, const SlabSequence& Uref, double alpha) {
    ErrorReport r;
    r.e0 = error_e0(U, Uref);
    std::tie(r.e2, r.e3) = error_e2_e3(U, Uref);
    r.e1 = frac_energy(U, Uref, alpha, &r.e1_clamped);
    return r;
}

std::vector<double> observed_order(const std::vector<std::pair<double, double>>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("observed_order: need at least two rows");
    std::vector<double> orders;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& [p0, e0] = rows[i - 1];
        const auto& [p1, e1] = rows[i];
        if (!(e0 > 0.0) || !(e1 > 0.0))
            throw std::invalid_argument("observed_order: errors must be positive");
        const double steps = std::abs(std::log2(p1 / p0));  // 1 for halving/doubling
        orders.push_back(std::log2(e0 / e1) / steps);
    }
    return orders;
}

std::vector<FeFunction> p_tau_project(const std::function<FeFunction(double)>& v,
                                      const GradedGrid& grid, const Mesh1D& mesh) {
    // Vector-valued Gauss-Kronrod with the scalar policy's nodes and budget:
    // panels subdivide until the max-norm error estimate meets the target.
    struct Panel {
        double lo, hi, tol;
        int depth;
    };
    const int ni = mesh.n_interior();
    std::vector<FeFunction> out;
    out.reserve(grid.J);
    for (int j = 1; j <= grid.J; ++j) {
        std::vector<double> total(ni, 0.0);
        std::vector<Panel> stack;
        const double lo = grid.times[j - 1], hi = grid.times[j];
        if (j == 1) {  // forced first-interval bisection, as in the oracle
            const double mid = 0.5 * (lo + hi);
            stack.push_back({lo, mid, 5e-11, 0});
            stack.push_back({mid, hi, 5e-11, 0});
        } else {
            stack.push_back({lo, hi, 1e-10, 0});
        }
        while (!stack.empty()) {
            const Panel p = stack.back();
            stack.pop_back();
            // 15-point Kronrod estimate with embedded 7-point Gauss error.
            static const double xk[8] = {0.991455371120812639, 0.949107912342758525,
                                         0.864864423359769073, 0.741531185599394440,
                                         0.586087235467691130, 0.405845151377397167,
                                         0.207784955007898468, 0.0};
            static const double wk[8] = {0.022935322010529225, 0.063092092629978553,
                                         0.104790010322250184, 0.140653259715525919,
                                         0.169004726639267903, 0.190350578064785410,
                                         0.204432940075298892, 0.209482141084727828};
            static const double wg[4] = {0.129484966168869693, 0.279705391489276668,
                                         0.381830050505118945, 0.417959183673469388};
            const double c = 0.5 * (p.lo + p.hi), half = 0.5 * (p.hi - p.lo);
            std::vector<double> kron(ni, 0.0), gauss(ni, 0.0);
            const FeFunction fc = v(c);
            for (int l = 0; l < ni; ++l) {
                kron[l] += wk[7] * fc.coeffs[l];
                gauss[l] += wg[3] * fc.coeffs[l];
            }
            for (int i = 0; i < 7; ++i) {
                const double dx = half * xk[i];
                const FeFunction fm = v(c - dx), fp2 = v(c + dx);
                for (int l = 0; l < ni; ++l) {
                    const double fsum = fm.coeffs[l] + fp2.coeffs[l];
                    kron[l] += wk[i] * fsum;
                    if (i % 2 == 1) gauss[l] += wg[i / 2] * fsum;
                }
            }
            double err = 0.0;
            for (int l = 0; l < ni; ++l) err = std::max(err, std::abs(kron[l] - gauss[l]) * half);
            if (err <= p.tol || p.depth >= 48) {
                if (err > 64.0 * p.tol && p.depth >= 48)
                    throw QuadratureError("p_tau_project: tolerance not reached");
                for (int l = 0; l < ni; ++l) total[l] += kron[l] * half;
            } else {
                stack.push_back({p.lo, c, 0.5 * p.tol, p.depth + 1});
                stack.push_back({c, p.hi, 0.5 * p.tol, p.depth + 1});
            }
        }
        for (int l = 0; l < ni; ++l) total[l] /= grid.tau(j);
        out.emplace_back(mesh, std::move(total));
    }
    return out;
}

std::vector<FeFunction> p_tau_project(const spectral::SpectralSolution& sol,
                                      const GradedGrid& grid) {
    return spectral::interval_averages(sol, grid);
}

}  // namespace fdk
