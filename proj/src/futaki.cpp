#include "gvx/futaki.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace gvx {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [0,1], by Newton iteration on the
// Legendre recurrence.  Deterministic.
struct GaussRule {
    std::vector<double> x, w;
};

GaussRule gauss_legendre_01(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // initial guess on [-1,1]
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double p1 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                p1 = p0;  // keep P_{n-1}(t) for the weight formula
                break;
            }
        }
        // recompute P_{n-1} and P_n' at the converged node
        double p0 = 1.0, pn = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * pn - (k - 1.0) * p0) / k;
            p0 = pn;
            pn = p2;
        }
        const double dp = n * (t * pn - p0) / (t * t - 1.0);
        r.x[i] = 0.5 * (t + 1.0);
        r.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);  // = (2 / ((1-t^2) P'^2)) / 2
    }
    return r;
}

// Integral of g against the Fubini-Study form (area 2*pi) over both
// stereographic hemispheres: nodes z = sqrt(s) e^{i phi} and the inverted
// copies, with the FS density 1/(1+s)^2 ds dphi.
cplx fs_integral(const std::function<cplx(cplx)>& g, int n_rad, int n_az) {
    const GaussRule rule = gauss_legendre_01(n_rad);
    cplx total(0.0, 0.0);
    const double dphi = 2.0 * kPi / n_az;
    for (int k = 0; k < n_rad; ++k) {
        const double s = rule.x[k];
        const double rho = std::sqrt(s);
        const double wk = rule.w[k] / ((1.0 + s) * (1.0 + s)) * dphi;
        cplx ring(0.0, 0.0);
        for (int j = 0; j < n_az; ++j) {
            const double ph = j * dphi;
            const cplx e(std::cos(ph), std::sin(ph));
            ring += g(rho * e) + g(e / rho);
        }
        total += wk * ring;
    }
    return total;
}

double sq_abs(cplx z) { return std::norm(z); }

// Fubini-Study Higgs norm of the section vanishing to order l at 0 and
// N - l at infinity (chart z).
double higgs_norm_at(int n, int l, cplx z) {
    const double r2 = sq_abs(z);
    if (l > 0 && r2 == 0.0) return 0.0;
    double lg = -n * std::log1p(r2);
    if (l > 0) lg += l * std::log(r2);
    return std::exp(lg);
}

double vertical_potential_at(int n, int l, cplx z) {
    const double r2 = sq_abs(z);
    return l - n * r2 / (1.0 + r2);
}

double rotation_potential_at(cplx z) {
    const double r2 = sq_abs(z);
    return 0.5 * (r2 - 1.0) / (r2 + 1.0);
}

} // namespace

cplx futaki_closed_form(int n, int l, double alpha, double tau) {
    if (n < 1 || l < 0 || l >= n)
        throw InvalidArgument("futaki_closed_form: need 0 <= l < N");
    if (!(alpha > 0.0)) throw InvalidArgument("futaki_closed_form: alpha must be positive");
    return cplx(0.0, 2.0 * kPi * alpha * (2.0 * n - tau) * (2.0 * l - n));
}

cplx futaki_limit_certificate(int n, int l, double alpha, double tau) {
    return cplx(0.0, 2.0 * kPi * alpha * (2.0 * n - tau) * (2.0 * l - n));
}

double maximal_weight(int n, int l, double alpha, double tau) {
    return 4.0 * kPi * alpha * (tau - 2.0 * n) * (n - 2.0 * l);
}

FutakiResult futaki_quadrature(int l, int n, double alpha, double tau,
                               const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Sphere, "futaki_quadrature");
    if (n < 1 || l < 0 || l >= n)
        throw InvalidArgument("futaki_quadrature: need 0 <= l < N");
    const int n_rad = std::max(grid->n1(), 32);
    const int n_az = std::max(grid->n2(), 16);

    const cplx i_vert = fs_integral(
        [&](cplx z) { return cplx(vertical_potential_at(n, l, z), 0.0); }, n_rad, n_az);
    const cplx i_coup = fs_integral(
        [&](cplx z) {
            return cplx((vertical_potential_at(n, l, z) - 2.0 * rotation_potential_at(z)) *
                            higgs_norm_at(n, l, z),
                        0.0);
        },
        n_rad, n_az);
    const cplx i_rot =
        fs_integral([&](cplx z) { return cplx(rotation_potential_at(z), 0.0); }, n_rad, n_az);

    // <F, y> = 2 i alpha (2N - tau) I1 + 2 i alpha I2 - i (S0 - 2 alpha tau N) J,
    // with the Laplacian term folded onto the rotational eigenpotential
    // (Delta pot = 4 pot) by self-adjointness.
    const double s0 = 2.0;  // background Gauss curvature
    FutakiResult res;
    res.method = FutakiResult::Method::Quadrature;
    res.n = n;
    res.l = l;
    res.alpha = alpha;
    res.tau = tau;
    res.sub_vertical = i_vert.real();
    res.sub_coupling = i_coup.real();
    res.value = cplx(0.0, 2.0 * alpha * (2.0 * n - tau)) * i_vert +
                cplx(0.0, 2.0 * alpha) * i_coup -
                cplx(0.0, s0 - 2.0 * alpha * tau * n) * i_rot;
    return res;
}

cplx futaki_quadrature_perturbed(int l, int n, double alpha, double tau,
                                 const GridPtr& grid, double eps) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Sphere, "futaki_quadrature_perturbed");
    const int n_rad = std::max(grid->n1(), 32);
    const int n_az = std::max(grid->n2(), 16);
    // xi = cos(theta) = (1 - |z|^2)/(1 + |z|^2); h -> e^{2 eps xi} h.
    auto xi = [](cplx z) {
        const double r2 = sq_abs(z);
        return (1.0 - r2) / (1.0 + r2);
    };
    auto z_dz_xi = [](cplx z) {
        const double r2 = sq_abs(z);
        const double d = (1.0 + r2) * (1.0 + r2);
        return -2.0 * r2 / d;
    };
    const double s0 = 2.0;
    // first term: 4 i alpha int (A_y + 2 eps z dz xi)(N + 4 eps xi + |phi|^2_eps/2 - tau/2)
    const cplx t1 = fs_integral(
        [&](cplx z) {
            const double ay = vertical_potential_at(n, l, z) + 2.0 * eps * z_dz_xi(z);
            const double curv = n + 4.0 * eps * xi(z);
            const double hn = higgs_norm_at(n, l, z) * std::exp(2.0 * eps * xi(z));
            return cplx(ay * (curv + 0.5 * hn - 0.5 * tau), 0.0);
        },
        n_rad, n_az);
    // second term: int pot_c (S0 + alpha Delta(|phi|^2_eps) - 2 alpha tau (N + 4 eps xi)),
    // Delta term folded by self-adjointness onto Delta pot = 4 pot.
    const cplx t2a = fs_integral(
        [&](cplx z) {
            const double hn = higgs_norm_at(n, l, z) * std::exp(2.0 * eps * xi(z));
            return cplx(rotation_potential_at(z) * 4.0 * alpha * hn, 0.0);
        },
        n_rad, n_az);
    const cplx t2b = fs_integral(
        [&](cplx z) {
            return cplx(rotation_potential_at(z) *
                            (s0 - 2.0 * alpha * tau * (n + 4.0 * eps * xi(z))),
                        0.0);
        },
        n_rad, n_az);
    return cplx(0.0, 4.0 * alpha) * t1 - cplx(0.0, 1.0) * (t2a + t2b);
}

cplx futaki_offdiagonal_quadrature(int n, double alpha, double tau, const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Sphere, "futaki_offdiagonal_quadrature");
    const int n_rad = std::max(grid->n1(), 32);
    const int n_az = std::max(grid->n2(), 16);
    const double s0 = 2.0;
    // translation generator: vertical potential -N zbar/(1+|z|^2), complex
    // potential -i zbar/(1+|z|^2) (an eigenpotential: Delta pot = 4 pot).
    const cplx t1 = fs_integral(
        [&](cplx z) {
            const cplx ay = -static_cast<double>(n) * std::conj(z) / (1.0 + sq_abs(z));
            const double hn = higgs_norm_at(n, 0, z);
            return ay * (n + 0.5 * hn - 0.5 * tau);
        },
        n_rad, n_az);
    const cplx t2 = fs_integral(
        [&](cplx z) {
            const cplx pot = cplx(0.0, -1.0) * std::conj(z) / (1.0 + sq_abs(z));
            const double hn = higgs_norm_at(n, 0, z);
            return pot * (s0 + 4.0 * alpha * hn - 2.0 * alpha * tau * n);
        },
        n_rad, n_az);
    return cplx(0.0, 4.0 * alpha) * t1 - t2;
}

// ---------------------------------------------------------------------------
// Extremal pair identities
// ---------------------------------------------------------------------------

std::pair<double, double> extremal_pair_errors(const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Sphere, "extremal_pair_errors");
    // |phi|^2 for the degree-1 section vanishing at infinity.
    ScalarField hn(grid);
    for (int i = 0; i < hn.size(); ++i) hn[i] = 1.0 / (1.0 + sq_abs(grid->chart_point(i)));

    // (i) Delta |phi|^2 = 2 (1-|z|^2)/(1+|z|^2), via spectral meridian
    // derivatives (the identity concerns the smooth pair, so the sharper
    // evaluation is appropriate here; the data is axially symmetric).
    ScalarField d1 = deriv_coord1(hn);
    ScalarField d11 = deriv2_coord1(hn);
    const double r2m = grid->sphere_radius_sq();
    double err1 = 0.0;
    for (int i = 0; i < hn.size(); ++i) {
        const int it = i / grid->n2();
        const double ct = std::cos(grid->theta(it)), st = grid->sin_theta(it);
        const double lap = -(d11[i] + (ct / st) * d1[i]) / r2m;  // m = 0 data
        const double target = 2.0 * ct;
        err1 = std::max(err1, std::abs(lap - target));
    }

    // (ii) dbar |phi|^2 = (1/4) i_{v^{1,0}} omega_FS for v = 4 i z d/dz;
    // compared after multiplying by zbar:  Re[z dz |phi|^2] = -|z|^2/(1+|z|^2)^2.
    auto [dre, dim] = complex_derivative(hn);
    double err2 = 0.0;
    for (int i = 0; i < hn.size(); ++i) {
        const cplx z = grid->chart_point(i);
        const cplx zdz = z * cplx(dre[i], dim[i]);
        const double r2 = sq_abs(z);
        const double target = -r2 / ((1.0 + r2) * (1.0 + r2));
        err2 = std::max(err2, std::abs(zdz.real() - target));
        err2 = std::max(err2, std::abs(zdz.imag()));
    }
    return {err1, err2};
}

bool check_extremal_pair(const GridPtr& grid) {
    auto [e1, e2] = extremal_pair_errors(grid);
    return e1 < 1e-4 && e2 < 1e-4;
}

} // namespace gvx
