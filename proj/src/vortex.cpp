#include "gvx/vortex.hpp"

#include <algorithm>
#include <cmath>

#include "gvx/detail/krylov.hpp"

namespace gvx {

namespace {

double clipped_exp(double x) { return std::exp(std::clamp(x, -120.0, 120.0)); }

ScalarField vortex_residual(const ScalarField& f, const ScalarField& higgs, int n,
                            double tau) {
    ScalarField r = laplacian(f);
    for (int i = 0; i < r.size(); ++i)
        r[i] += 0.5 * (clipped_exp(2.0 * f[i]) * higgs[i] - tau) + n;
    return r;
}

} // namespace

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::NonConvergence: return "NonConvergence";
        default: return "StepUnderflow";
    }
}

VortexSolution solve_vortex(const GridPtr& grid, const ScalarField& higgs, int n,
                            double tau, const VortexOptions& opts) {
    if (higgs.grid().get() != grid.get())
        throw GridMismatch("solve_vortex: higgs field on a different grid");
    if (!(opts.tol > 0.0)) throw InvalidArgument("solve_vortex: tol must be positive");
    if (higgs.max() <= 0.0)
        throw InvalidArgument("solve_vortex: higgs norm must not vanish identically");

    const double f0 = opts.initial_constant
                          ? *opts.initial_constant
                          : 0.5 * std::log(tau / (higgs.max() + tau));
    VortexSolution sol;
    sol.f = ScalarField(grid, f0);

    for (int it = 0; it <= opts.max_iter; ++it) {
        ScalarField r = vortex_residual(sol.f, higgs, n, tau);
        const double rs = r.sup_norm();
        sol.residual_sup = rs;
        sol.iterations = it;
        if (opts.on_iteration) opts.on_iteration(it, rs);

        double hmax = 0.0;
        for (int i = 0; i < sol.f.size(); ++i)
            hmax = std::max(hmax, clipped_exp(2.0 * sol.f[i]) * higgs[i]);

        if (rs < opts.tol) {
            if (hmax < opts.higgs_collapse_frac * tau) {
                sol.status = SolveStatus::NonConvergence;
                sol.detail = "higgs norm collapsed (f -> -inf runaway)";
                return sol;
            }
            sol.status = SolveStatus::Converged;
            return sol;
        }
        if (sol.f.min() < opts.f_floor) {
            sol.status = SolveStatus::NonConvergence;
            sol.detail = "conformal exponent diverged (f -> -inf)";
            return sol;
        }
        if (it == opts.max_iter) break;

        // Newton step: (Delta + e^{2f} |phi|^2) df = -r, SPD.
        std::vector<double> diag(sol.f.size());
        double mean_diag = 0.0;
        for (int i = 0; i < sol.f.size(); ++i) {
            diag[i] = clipped_exp(2.0 * sol.f[i]) * higgs[i];
            mean_diag += diag[i];
        }
        mean_diag = std::max(mean_diag / sol.f.size(), 1e-8);

        auto A = [&](const detail::Vec& v) {
            ScalarField x(grid, v);
            ScalarField ax = laplacian(x);
            for (int i = 0; i < ax.size(); ++i) ax[i] += diag[i] * v[i];
            return ax.values();
        };
        auto M = [&](const detail::Vec& v) {
            ScalarField x(grid, v);
            return helmholtz_solve(x, mean_diag).values();
        };
        detail::Vec rhs(sol.f.size());
        for (int i = 0; i < sol.f.size(); ++i) rhs[i] = -r[i];
        detail::Vec dx;
        detail::pcg(A, M, rhs, dx, std::max(1e-12, 1e-2 * rs), 300);

        // Residual line search (halving); accepted steps are monotone.
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 45; ++ls) {
            ScalarField fn = sol.f;
            for (int i = 0; i < fn.size(); ++i) fn[i] += step * dx[i];
            ScalarField rn = vortex_residual(fn, higgs, n, tau);
            const double rsn = rn.sup_norm();
            if (std::isfinite(rsn) && rsn < rs) {
                sol.f = fn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            sol.status = SolveStatus::NonConvergence;
            sol.detail = "line search stalled";
            return sol;
        }
    }
    sol.status = SolveStatus::NonConvergence;
    sol.detail = "iteration budget exhausted";
    return sol;
}

} // namespace gvx
