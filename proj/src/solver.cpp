#include "fdk/solver.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fdk {

namespace {

// Gauss-Legendre rules on [0,1]; index by point count 1..5.
struct GaussRule {
    int n;
    const double* x;
    const double* w;
};

const GaussRule& gauss_rule(int n) {
    static const double x1[] = {0.5};
    static const double w1[] = {1.0};
    static const double x2[] = {0.21132486540518713, 0.7886751345948129};
    static const double w2[] = {0.5, 0.5};
    static const double x3[] = {0.1127016653792583, 0.5, 0.8872983346207417};
    static const double w3[] = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};
    static const double x4[] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281,
                                0.9305681557970262};
    static const double w4[] = {0.1739274225687269, 0.32607257743127305, 0.32607257743127305,
                                0.1739274225687269};
    static const double x5[] = {0.04691007703066800, 0.23076534494715845, 0.5,
                                0.7692346550528415, 0.9530899229693319};
    static const double w5[] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                0.23931433524968324, 0.11846344252809454};
    static const GaussRule rules[] = {{1, x1, w1}, {2, x2, w2}, {3, x3, w3}, {4, x4, w4}, {5, x5, w5}};
    if (n < 1 || n > 5) throw std::invalid_argument("gauss_rule: 1..5 points supported");
    return rules[n - 1];
}

// F(W)_i = int f(W(x)) phi_i(x) dx accumulated element by element.
std::vector<double> f_load(const FeFunction& W, const NonlinearSpec& nl, int qpts) {
    const Mesh1D& mesh = W.mesh;
    const int ni = mesh.n_interior();
    const GaussRule& g = gauss_rule(qpts);
    std::vector<double> out(ni, 0.0);
    for (int e = 0; e < mesh.n_cells; ++e) {
        const double wl = e >= 1 ? W.coeffs[e - 1] : 0.0;
        const double wr = e + 1 <= ni ? W.coeffs[e] : 0.0;
        for (int q = 0; q < g.n; ++q) {
            const double xi = g.x[q];
            const double c = g.w[q] * mesh.h * nl.f(wl + (wr - wl) * xi);
            if (e >= 1) out[e - 1] += c * (1.0 - xi);
            if (e + 1 <= ni) out[e] += c * xi;
        }
    }
    return out;
}

// Weighted mass matrix int f'(W) phi_i phi_l dx with the same Gauss rule.
TridiagonalMatrix weighted_mass(const FeFunction& W, const NonlinearSpec& nl, int qpts) {
    const Mesh1D& mesh = W.mesh;
    const int ni = mesh.n_interior();
    const GaussRule& g = gauss_rule(qpts);
    TridiagonalMatrix Mf;
    Mf.diag.assign(ni, 0.0);
    Mf.sub.assign(ni - 1, 0.0);
    for (int e = 0; e < mesh.n_cells; ++e) {
        const double wl = e >= 1 ? W.coeffs[e - 1] : 0.0;
        const double wr = e + 1 <= ni ? W.coeffs[e] : 0.0;
        for (int q = 0; q < g.n; ++q) {
            const double xi = g.x[q];
            const double c = g.w[q] * mesh.h * nl.fprime(wl + (wr - wl) * xi);
            if (e >= 1) Mf.diag[e - 1] += c * (1.0 - xi) * (1.0 - xi);
            if (e + 1 <= ni) Mf.diag[e] += c * xi * xi;
            if (e >= 1 && e + 1 <= ni) Mf.sub[e - 1] += c * xi * (1.0 - xi);
        }
    }
    Mf.super = Mf.sub;
    return Mf;
}

double l2_residual_norm(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
}

// Shared state of one marching run; the free-function entry points build a
// fresh instance, solve() reuses it so M(U_k - u0h) is formed once per slab.
struct Stepper {
    const SolverConfig& cfg;
    TridiagonalMatrix M, A;
    FeFunction u0h;
    ConvWeights weights;
    std::vector<double> scratch_row;

    explicit Stepper(const SolverConfig& c)
        : cfg(c),
          M(assemble_mass(c.mesh)),
          A(assemble_stiffness(c.mesh)),
          u0h(l2_project(c.u0, c.mesh)),
          weights(c.grid, c.alpha) {}

    // History part of the residual: sum_{k<j} b_{j,k} M (U_k - u0h).
    std::vector<double> history_term(int j, const std::vector<FeFunction>& history) const {
        const int ni = cfg.mesh.n_interior();
        std::vector<double> acc(ni, 0.0);
        if (j < 2) return acc;
        const std::vector<double> b = conv_weights_row(cfg.grid, cfg.alpha, j);
        std::vector<double> diff(ni);
        for (int k = 1; k < j; ++k) {
            for (int i = 0; i < ni; ++i) diff[i] = history[k - 1].coeffs[i] - u0h.coeffs[i];
            const std::vector<double> md = tri_matvec(M, diff);
            for (int i = 0; i < ni; ++i) acc[i] += b[k - 1] * md[i];
        }
        return acc;
    }

    // b_{j,j} = tau_j^{1-a} / Gamma(2-a): identical to the row's last entry
    // without recomputing the row inside every Newton iteration.
    double b_diag(int j) const {
        return std::pow(cfg.grid.tau(j), 1.0 - cfg.alpha) / std::tgamma(2.0 - cfg.alpha);
    }

    std::vector<double> residual_at(int j, const FeFunction& W,
                                    const std::vector<double>& hist) const {
        const int ni = cfg.mesh.n_interior();
        const double tau = cfg.grid.tau(j);
        const double bjj = b_diag(j);
        std::vector<double> diff(ni);
        for (int i = 0; i < ni; ++i) diff[i] = W.coeffs[i] - u0h.coeffs[i];
        const std::vector<double> md = tri_matvec(M, diff);
        const std::vector<double> aw = tri_matvec(A, W.coeffs);
        const std::vector<double> fw = f_load(W, cfg.nonlinearity, cfg.quadrature_points);
        std::vector<double> r(ni);
        for (int i = 0; i < ni; ++i) r[i] = hist[i] + bjj * md[i] + tau * (aw[i] - fw[i]);
        return r;
    }

    TridiagonalMatrix jacobian_at(int j, const FeFunction& W) const {
        const int ni = cfg.mesh.n_interior();
        const double tau = cfg.grid.tau(j);
        const double bjj = b_diag(j);
        const TridiagonalMatrix Mf = weighted_mass(W, cfg.nonlinearity, cfg.quadrature_points);
        TridiagonalMatrix Jm;
        Jm.diag.resize(ni);
        Jm.sub.resize(ni - 1);
        for (int i = 0; i < ni; ++i) Jm.diag[i] = bjj * M.diag[i] + tau * (A.diag[i] - Mf.diag[i]);
        for (int i = 0; i + 1 < ni; ++i) Jm.sub[i] = bjj * M.sub[i] + tau * (A.sub[i] - Mf.sub[i]);
        Jm.super = Jm.sub;
        return Jm;
    }

    // Newton iteration for interval j given the assembled history term.
    std::pair<FeFunction, int> newton(int j, const FeFunction& guess,
                                      const std::vector<double>& hist) const {
        FeFunction W = guess;
        const int ni = cfg.mesh.n_interior();
        for (int it = 0;; ++it) {
            const std::vector<double> r = residual_at(j, W, hist);
            const double nr = l2_residual_norm(r);
            if (nr <= cfg.newton_tol) return {std::move(W), it};
            if (!std::isfinite(nr) || it >= cfg.newton_max_iter) {
                std::ostringstream os;
                os << "Newton did not converge at interval j=" << j << " (residual " << nr
                   << " after " << it << " iterations)";
                throw StepFailure(j, nr, os.str());
            }
            const std::vector<double> delta = thomas_solve(jacobian_at(j, W), r);
            for (int i = 0; i < ni; ++i) W.coeffs[i] -= delta[i];
        }
    }
};

}  // namespace

std::vector<double> residual(int j, const FeFunction& W, const std::vector<FeFunction>& history,
                             const SolverConfig& cfg) {
    if (j < 1 || j > cfg.grid.J) throw std::invalid_argument("residual: j out of range");
    Stepper st(cfg);
    return st.residual_at(j, W, st.history_term(j, history));
}

TridiagonalMatrix jacobian(int j, const FeFunction& W, const SolverConfig& cfg) {
    if (j < 1 || j > cfg.grid.J) throw std::invalid_argument("jacobian: j out of range");
    return Stepper(cfg).jacobian_at(j, W);
}

FeFunction step(int j, const std::vector<FeFunction>& history, const SolverConfig& cfg) {
    if (j < 1 || j > cfg.grid.J) throw std::invalid_argument("step: j out of range");
    if (static_cast<int>(history.size()) < j - 1)
        throw std::invalid_argument("step: history incomplete");
    Stepper st(cfg);
    const FeFunction& guess = j == 1 ? st.u0h : history[j - 2];
    return st.newton(j, guess, st.history_term(j, history)).first;
}

SpaceTimeSolution solve(const SolverConfig& cfg) {
    const StabilityVerdict verdict = check_stability(cfg.grid, cfg.alpha, cfg.nonlinearity.L);
    if (verdict == StabilityVerdict::reject) {
        std::ostringstream os;
        os << "solve: tau_J=" << cfg.grid.taus.back() << " is at or above the stability bound "
           << stability_bound(cfg.alpha, cfg.nonlinearity.L) << " (alpha=" << cfg.alpha
           << ", L=" << cfg.nonlinearity.L << ")";
        throw StabilityError(os.str());
    }
    Stepper st(cfg);
    const int ni = cfg.mesh.n_interior();
    const int J = cfg.grid.J;

    SpaceTimeSolution sol;
    sol.mesh = cfg.mesh;
    sol.grid = cfg.grid;
    sol.alpha = cfg.alpha;
    sol.nonlinearity_name = cfg.nonlinearity.name;
    sol.u0_text = u0_to_string(cfg.u0);
    sol.u0h = st.u0h;
    sol.stability = verdict;
    sol.slabs.reserve(J);
    sol.newton_iters.reserve(J);

    // M(U_k - u0h) cached per completed slab; each step's history sum is then
    // a single O(j*n) axpy pass over these vectors.
    std::vector<std::vector<double>> mdiff;
    mdiff.reserve(J);
    std::vector<double> hist(ni), diff(ni);
    for (int j = 1; j <= J; ++j) {
        const std::vector<double>& b = st.weights.row(j, st.scratch_row);
        std::fill(hist.begin(), hist.end(), 0.0);
        for (int k = 1; k < j; ++k) {
            const double bk = b[k - 1];
            const std::vector<double>& md = mdiff[k - 1];
            for (int i = 0; i < ni; ++i) hist[i] += bk * md[i];
        }
        const FeFunction& guess = j == 1 ? st.u0h : sol.slabs.back();
        auto [W, iters] = st.newton(j, guess, hist);
        for (int i = 0; i < ni; ++i) diff[i] = W.coeffs[i] - st.u0h.coeffs[i];
        mdiff.push_back(tri_matvec(st.M, diff));
        sol.slabs.push_back(std::move(W));
        sol.newton_iters.push_back(iters);
    }
    return sol;
}

// ---- binary cache ----------------------------------------------------------

static_assert(std::endian::native == std::endian::little,
              "solution files are little-endian; big-endian hosts unsupported");

namespace {

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::string get_str(std::istream& is) {
    std::string s(get_u32(is), '\0');
    is.read(s.data(), static_cast<std::streamsize>(s.size()));
    return s;
}

}  // namespace

void save_solution(const SpaceTimeSolution& sol, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_solution: cannot open " + path);
    os.write("FDK1", 4);
    put_f64(os, sol.alpha);
    put_f64(os, sol.grid.sigma);
    put_f64(os, sol.grid.T);
    put_u32(os, static_cast<std::uint32_t>(sol.grid.J));
    put_u32(os, static_cast<std::uint32_t>(sol.mesh.n_cells));
    put_str(os, sol.nonlinearity_name);
    put_str(os, sol.u0_text);
    const auto put_fe = [&](const FeFunction& f) {
        for (double v : f.coeffs) put_f64(os, v);
    };
    put_fe(sol.u0h);
    for (const FeFunction& s : sol.slabs) put_fe(s);
    if (!os) throw std::runtime_error("save_solution: write failed for " + path);
}

SpaceTimeSolution load_solution(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_solution: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FDK1", 4) != 0)
        throw std::runtime_error("load_solution: bad magic in " + path);
    SpaceTimeSolution sol;
    sol.alpha = get_f64(is);
    const double sigma = get_f64(is);
    const double T = get_f64(is);
    const int J = static_cast<int>(get_u32(is));
    const int n_cells = static_cast<int>(get_u32(is));
    sol.nonlinearity_name = get_str(is);
    sol.u0_text = get_str(is);
    sol.mesh = build_mesh(n_cells);
    sol.grid = graded_grid(J, sigma, T);  // times rebuild deterministically
    const int ni = n_cells - 1;
    const auto get_fe = [&] {
        FeFunction f{sol.mesh, std::vector<double>(ni)};
        for (int i = 0; i < ni; ++i) f.coeffs[i] = get_f64(is);
        return f;
    };
    sol.u0h = get_fe();
    sol.slabs.reserve(J);
    for (int j = 0; j < J; ++j) sol.slabs.push_back(get_fe());
    if (!is) throw std::runtime_error("load_solution: truncated file " + path);
    return sol;
}

}  // namespace fdk
