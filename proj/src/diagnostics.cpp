#include "gvx/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace gvx {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

bool AuditReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string AuditReport::to_text() const {
    std::string out;
    char line[200];
    for (const auto& c : checks) {
        std::snprintf(line, sizeof line, "%-26s % .10e % .10e %.2e %s\n", c.name.c_str(),
                      c.value, c.target, c.tol, c.pass ? "PASS" : "FAIL");
        out += line;
    }
    return out;
}

ScalarField project_direction(const GravState& state, const ScalarField& dir_potential) {
    ScalarField w = kahler_factor(state);
    ScalarField prod(dir_potential.grid());
    for (int i = 0; i < prod.size(); ++i) prod[i] = dir_potential[i] * w[i];
    const double mean = integrate(prod) / (2.0 * kPi);
    ScalarField out = dir_potential;
    // subtract a constant: the moving volume is also 2*pi
    out += -mean;
    return out;
}

double sigma_one_form(const GravState& state, const ModelParams& params,
                      const ScalarField& higgs, const ScalarField& dir_potential,
                      const ScalarField& dir_scale) {
    detail::require_same_grid(state.f, dir_potential);
    detail::require_same_grid(state.f, dir_scale);
    ScalarField w = kahler_factor(state);
    if (!(w.min() > 0.0)) throw Error("sigma_one_form: Kahler positivity lost");
    {
        ScalarField prod(dir_potential.grid());
        for (int i = 0; i < prod.size(); ++i) prod[i] = dir_potential[i] * w[i];
        const double mean = integrate(prod);
        const double scale = std::max(dir_potential.sup_norm(), 1e-300);
        if (std::abs(mean) > 1e-8 * scale * 2.0 * kPi)
            throw InvalidArgument(
                "sigma_one_form: direction potential must integrate to zero in the "
                "moving metric");
    }
    ScalarField lap_f = laplacian(state.f);
    ScalarField hn = higgs_norm_moving(state, higgs);
    ScalarField lap_hn = laplacian(hn);
    ScalarField kw = gauss_curvature_moving(state);
    const double a = params.alpha, tau = params.tau;
    double first = 0.0, second = 0.0;
    ScalarField i1(state.f.grid()), i2(state.f.grid());
    for (int i = 0; i < hn.size(); ++i) {
        const double curv = (params.n + lap_f[i]) / w[i];
        i1[i] = dir_scale[i] * (curv + 0.5 * hn[i] - 0.5 * tau) * w[i];
        i2[i] = dir_potential[i] *
                (kw[i] + a * lap_hn[i] / w[i] - 2.0 * a * tau * curv) * w[i];
    }
    first = integrate(i1);
    second = integrate(i2);
    return -8.0 * a * first - second;
}

std::vector<double> weight_along_flow(const Divisor& d, double alpha, double tau,
                                      const std::vector<double>& flow_times,
                                      const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Sphere, "weight_along_flow");
    // two-point monomial configuration on {0, infinity} required
    int l = 0;
    const int n = d.degree();
    for (const auto& p : d.points()) {
        if (p.at_infinity) continue;
        if (p.z != cplx(0.0, 0.0))
            throw InvalidArgument("weight_along_flow: divisor must be supported on {0, inf}");
        l = p.multiplicity;
    }
    // diagonal generator normalized to fix the limit monomial; the lift
    // kills the scalar diag(1,1), so only the traceless part d1 - d0 acts
    const double d0 = n - 2.0 * l - 1.0, d1 = n - 2.0 * l + 1.0;
    ScalarField higgs = higgs_norm_sphere(d, grid);
    ScalarField vert(grid), pot(grid);
    for (int i = 0; i < vert.size(); ++i) {
        const double r2 = std::norm(grid->chart_point(i));
        vert[i] = (d1 - d0) * (l - n * r2 / (1.0 + r2));
        pot[i] = (d1 - d0) * 0.5 * (r2 - 1.0) / (r2 + 1.0);
    }
    const double s0 = 2.0;
    // the flow fixes the section (monomial), so each time evaluates the same
    // moment pairing; the Laplacian term is folded onto the rotational
    // eigenpotential (Delta pot = 4 pot).
    std::vector<double> out;
    out.reserve(flow_times.size());
    for (size_t k = 0; k < flow_times.size(); ++k) {
        ScalarField g1(grid), g2(grid), g3(grid);
        for (int i = 0; i < vert.size(); ++i) {
            g1[i] = vert[i] * (n + 0.5 * higgs[i] - 0.5 * tau);
            g2[i] = pot[i] * higgs[i];
            g3[i] = pot[i];
        }
        const double val = 4.0 * alpha * integrate(g1) - 4.0 * alpha * integrate(g2) -
                           (s0 - 2.0 * alpha * tau * n) * integrate(g3);
        out.push_back(val);
    }
    return out;
}

ScalarField random_smooth_field(const GridPtr& grid, std::uint64_t seed, int modes) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ScalarField out(grid, 0.0);
    if (grid->kind() == SurfaceGrid::Kind::Torus) {
        for (int m = 0; m < 8; ++m) {
            const int k1 = static_cast<int>(unif(rng) * (2 * modes + 1)) - modes;
            const int k2 = static_cast<int>(unif(rng) * (2 * modes + 1)) - modes;
            const double amp = gauss(rng), phase = 2.0 * kPi * unif(rng);
            for (int i = 0; i < out.size(); ++i) {
                const double s = grid->coord1(i), t = grid->coord2(i);
                out[i] += amp * std::cos(2.0 * kPi * (k1 * s + k2 * t) + phase);
            }
        }
        return out;
    }
    for (int m = 0; m < 8; ++m) {
        const double a = gauss(rng);
        double ux = gauss(rng), uy = gauss(rng), uz = gauss(rng);
        const double nr = std::sqrt(ux * ux + uy * uy + uz * uz) + 1e-30;
        ux /= nr;
        uy /= nr;
        uz /= nr;
        const int deg = 1 + static_cast<int>(unif(rng) * std::max(1, modes - 1));
        for (int i = 0; i < out.size(); ++i) {
            const double th = grid->coord1(i), ph = grid->coord2(i);
            const double x = std::sin(th) * std::cos(ph), y = std::sin(th) * std::sin(ph),
                         z = std::cos(th);
            out[i] += a * std::pow(ux * x + uy * y + uz * z, deg);
        }
    }
    return out;
}

AuditReport audit_state(const GravState& state, const ModelParams& params,
                        const GridPtr& grid, const ScalarField& higgs, double tol) {
    AuditReport rep;
    auto add = [&rep](const std::string& name, double value, double target, double tl,
                      bool lower = false) {
        AuditCheck c;
        c.name = name;
        c.value = value;
        c.target = target;
        c.tol = tl;
        c.lower_bound = lower;
        c.pass = lower ? (value > target - tl) : (std::abs(value - target) <= tl);
        rep.checks.push_back(c);
    };

    add("bradlow_admissible", 0.5 * params.tau - params.n, 0.0, 0.0, true);

    ScalarField w = kahler_factor(state);
    add("kahler_positivity_min", w.min(), 0.0, 0.0, true);
    if (!(w.min() > 0.0)) return rep;  // remaining checks need the moving metric

    auto [r1, r2] = residuals_gravitating(state, params, grid, higgs);
    add("residual_first_sup", r1, 0.0, tol);
    add("residual_second_sup", r2, 0.0, 10.0 * tol);

    ScalarField hn = higgs_norm_moving(state, higgs);
    add("higgs_le_tau_margin", params.tau * (1.0 + 1e-8) - hn.max(), 0.0, 0.0, true);

    // the two integral identities, written against the moving-metric factor
    // w = 1 - Delta v (equal to the continuity exponential at solutions and
    // independent of the free volume gauge constant)
    const double tau = params.tau, c = params.c;
    ScalarField first(state.f.grid()), second(state.f.grid());
    for (int i = 0; i < hn.size(); ++i) {
        first[i] = (hn[i] - tau) * w[i];
        second[i] = w[i];
    }
    add("integral_first", integrate(first), -4.0 * kPi * params.n,
        1e-8 * 4.0 * kPi * params.n);
    add("integral_second", integrate(second), 2.0 * kPi, 1e-8 * 2.0 * kPi);

    ScalarField kw = gauss_curvature_moving(state);
    ScalarField gb(state.f.grid());
    for (int i = 0; i < kw.size(); ++i) gb[i] = 2.0 * kw[i] * w[i];
    add("gauss_bonnet", integrate(gb), 4.0 * kPi * params.chi, 1e-4);

    ScalarField lap_f = laplacian(state.f);
    ScalarField deg(state.f.grid());
    for (int i = 0; i < deg.size(); ++i) deg[i] = params.n + lap_f[i];
    add("degree_identity", integrate(deg), 2.0 * kPi * params.n,
        1e-6 * 2.0 * kPi * params.n);

    {
        ScalarField kwkw(state.f.grid()), coup(state.f.grid());
        for (int i = 0; i < kw.size(); ++i) {
            kwkw[i] = kw[i] * w[i];
            coup[i] = (hn[i] - tau) * w[i];
        }
        const double c_meas =
            (integrate(kwkw) + params.alpha * tau * integrate(coup)) / (2.0 * kPi);
        add("c_measured", c_meas, params.c, 1e-4);
    }

    {
        ScalarField lap_hn = laplacian(hn);
        double ke = 0.0;
        for (int i = 0; i < hn.size(); ++i) {
            const double curv = (params.n + lap_f[i]) / w[i];
            ke = std::max(ke, std::abs(kw[i] + params.alpha * lap_hn[i] / w[i] -
                                       2.0 * params.alpha * tau * curv - c));
        }
        add("ke_form_residual_sup", ke, 0.0, 10.0 * tol);
    }

    {
        double worst = 0.0;
        for (int k = 0; k < 32; ++k) {
            ScalarField pot = project_direction(
                state, random_smooth_field(grid, 0x5eed0000u + k, 5));
            ScalarField scl = random_smooth_field(grid, 0xa11ce000u + k, 5);
            const double np = std::max(pot.sup_norm(), 1e-300);
            const double ns = std::max(scl.sup_norm(), 1e-300);
            pot *= 1.0 / np;
            scl *= 1.0 / ns;
            pot = project_direction(state, pot);
            const double s = sigma_one_form(state, params, higgs, pot, scl);
            worst = std::max(worst, std::abs(s));
        }
        add("sigma_sampled_max", worst, 0.0, 100.0 * tol);
    }

    return rep;
}

} // namespace gvx
