#include "gvx/higgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gvx {

namespace {

constexpr double kPi = std::numbers::pi;

cplx pow_int(cplx z, int k) {
    cplx r(1.0, 0.0);
    while (k-- > 0) r *= z;
    return r;
}

// Argument reduction v = w - m - k*modulus into the centered fundamental
// cell, returning (v, m, k).
struct Reduced {
    cplx v;
    long m, k;
};

Reduced reduce_arg(cplx w, cplx modulus) {
    const double im = modulus.imag();
    const long k = std::lround(w.imag() / im);
    cplx v = w - static_cast<double>(k) * modulus;
    const long m = std::lround(v.real());
    v -= static_cast<double>(m);
    return {v, m, k};
}

// Sine series for theta_1 and its derivative at a reduced argument.
// Terms are added until the analytic bound on the next term drops below
// 1e-14 (absolute).
void theta1_series(cplx v, cplx modulus, cplx* th, cplx* dth) {
    const cplx ipi(0.0, kPi);
    cplx s(0.0, 0.0), sp(0.0, 0.0);
    const double imtau = modulus.imag();
    const double y = std::abs(v.imag());
    for (int n = 0; n < 256; ++n) {
        const double half = n + 0.5;
        const cplx q_pow = std::exp(ipi * modulus * (half * half));
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx arg = (2.0 * n + 1.0) * kPi * v;
        s += sign * q_pow * std::sin(arg);
        if (dth) sp += sign * q_pow * (2.0 * n + 1.0) * kPi * std::cos(arg);
        const double bound =
            std::exp(-kPi * imtau * (half + 1.0) * (half + 1.0) + (2.0 * n + 3.0) * kPi * y) *
            (2.0 * n + 3.0) * kPi;
        if (bound < 1e-14 && n >= 2) break;
    }
    *th = 2.0 * s;
    if (dth) *dth = 2.0 * sp;
}

} // namespace

cplx theta1(cplx w, cplx modulus) {
    if (!(modulus.imag() > 0.0)) throw DegenerateLattice("theta1: Im(modulus) <= 0");
    const Reduced r = reduce_arg(w, modulus);
    cplx th;
    theta1_series(r.v, modulus, &th, nullptr);
    const cplx ipi(0.0, kPi);
    const double sign = ((r.m + r.k) % 2 == 0) ? 1.0 : -1.0;
    const cplx factor =
        sign * std::exp(-ipi * modulus * static_cast<double>(r.k * r.k) -
                        2.0 * ipi * static_cast<double>(r.k) * r.v);
    return factor * th;
}

cplx theta1_deriv(cplx w, cplx modulus) {
    if (!(modulus.imag() > 0.0)) throw DegenerateLattice("theta1_deriv: Im(modulus) <= 0");
    const Reduced r = reduce_arg(w, modulus);
    cplx th, dth;
    theta1_series(r.v, modulus, &th, &dth);
    const cplx ipi(0.0, kPi);
    const double sign = ((r.m + r.k) % 2 == 0) ? 1.0 : -1.0;
    const cplx factor =
        sign * std::exp(-ipi * modulus * static_cast<double>(r.k * r.k) -
                        2.0 * ipi * static_cast<double>(r.k) * r.v);
    return factor * (dth - 2.0 * ipi * static_cast<double>(r.k) * th);
}

// ---------------------------------------------------------------------------
// Divisor and classification
// ---------------------------------------------------------------------------

Divisor::Divisor(std::vector<DivisorPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidDivisor("divisor must have at least one point");
    for (const auto& p : points_) {
        if (p.multiplicity < 1) throw InvalidDivisor("multiplicities must be >= 1");
        degree_ += p.multiplicity;
    }
    for (size_t i = 0; i < points_.size(); ++i)
        for (size_t j = i + 1; j < points_.size(); ++j) {
            const bool same = points_[i].at_infinity
                                  ? points_[j].at_infinity
                                  : (!points_[j].at_infinity && points_[i].z == points_[j].z);
            if (same) throw InvalidDivisor("divisor points must be pairwise distinct");
        }
}

int Divisor::max_multiplicity() const {
    int m = 0;
    for (const auto& p : points_) m = std::max(m, p.multiplicity);
    return m;
}

bool Divisor::has_infinity() const {
    for (const auto& p : points_)
        if (p.at_infinity) return true;
    return false;
}

const char* to_string(StabilityClass s) {
    switch (s) {
        case StabilityClass::Stable: return "Stable";
        case StabilityClass::StrictlyPolystable: return "StrictlyPolystable";
        default: return "Unstable";
    }
}

StabilityClass classify_divisor(const Divisor& d) {
    const int n = d.degree();
    const int nmax = d.max_multiplicity();
    if (2 * nmax < n) return StabilityClass::Stable;
    if (2 * nmax == n && d.points().size() == 2) return StabilityClass::StrictlyPolystable;
    // Covers both n_j > N/2 and the non-closed-orbit borderline (equal
    // maximal weight but more than two points); neither admits solutions.
    return StabilityClass::Unstable;
}

bool bradlow_admissible(int n, double tau) { return static_cast<double>(n) < 0.5 * tau; }

int hilbert_mumford_exponent(const Divisor& d) { return d.max_multiplicity(); }

// ---------------------------------------------------------------------------
// Sphere Higgs norm
// ---------------------------------------------------------------------------

namespace {

void require_no_infinity_on_torus(const Divisor& d) {
    if (d.has_infinity())
        throw InvalidDivisor("the point at infinity is not a torus point");
}

} // namespace

ScalarField higgs_norm_sphere(const Divisor& d, const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Sphere, "higgs_norm_sphere");
    const int n = d.degree();
    ScalarField out(grid);
    for (int i = 0; i < out.size(); ++i) {
        const cplx z = grid->chart_point(i);
        double logv = -static_cast<double>(n) * std::log1p(std::norm(z));
        bool zero = false;
        for (const auto& p : d.points()) {
            if (p.at_infinity) continue;
            const double a = std::abs(z - p.z);
            if (a == 0.0) {
                zero = true;
                break;
            }
            logv += 2.0 * p.multiplicity * std::log(a);
        }
        out[i] = zero ? 0.0 : std::exp(logv);
    }
    return out;
}

ScalarField higgs_deriv_norm_sphere(const Divisor& d, const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Sphere, "higgs_deriv_norm_sphere");
    const int n = d.degree();
    ScalarField out(grid);
    std::vector<DivisorPoint> fin;
    for (const auto& p : d.points())
        if (!p.at_infinity) fin.push_back(p);
    for (int i = 0; i < out.size(); ++i) {
        const cplx z = grid->chart_point(i);
        // p(z) and p'(z) by direct products (degree <= N, no cancellation)
        cplx pv(1.0, 0.0);
        for (const auto& p : fin) pv *= pow_int(z - p.z, p.multiplicity);
        cplx dpv(0.0, 0.0);
        for (size_t j = 0; j < fin.size(); ++j) {
            cplx term = static_cast<double>(fin[j].multiplicity) *
                        pow_int(z - fin[j].z, fin[j].multiplicity - 1);
            for (size_t k = 0; k < fin.size(); ++k)
                if (k != j) term *= pow_int(z - fin[k].z, fin[k].multiplicity);
            dpv += term;
        }
        const cplx dlogh = -static_cast<double>(n) * std::conj(z) / (1.0 + std::norm(z));
        const cplx cov = dpv + pv * dlogh;
        out[i] = std::norm(cov) * std::exp(-static_cast<double>(n) * std::log1p(std::norm(z)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Torus Higgs norm (theta-product construction)
// ---------------------------------------------------------------------------

namespace {

// Checks the point lies in the fundamental domain [0,1)^2 in lattice
// coordinates and returns those coordinates.
std::pair<double, double> lattice_coords_checked(cplx z, cplx modulus) {
    const double t = z.imag() / modulus.imag();
    const double s = z.real() - t * modulus.real();
    if (s < 0.0 || s >= 1.0 || t < 0.0 || t >= 1.0)
        throw InvalidDivisor("torus divisor point outside the fundamental domain");
    return {s, t};
}

struct TorusHiggsParts {
    std::vector<double> log_norm;   // ln|phi|^2 before normalization (-inf allowed)
    std::vector<double> deriv_raw;  // |D phi|^2 before normalization
};

TorusHiggsParts torus_parts(const Divisor& d, const SurfaceGrid& g, bool with_deriv) {
    const cplx tau = g.lattice_modulus();
    const double imtau = tau.imag();
    TorusHiggsParts parts;
    parts.log_norm.resize(g.node_count());
    if (with_deriv) parts.deriv_raw.resize(g.node_count());
    const auto& pts = d.points();
    const size_t np = pts.size();
    std::vector<cplx> th(np), dth(np);
    std::vector<double> gauss(np), imv(np);
    for (int idx = 0; idx < g.node_count(); ++idx) {
        const cplx z = cplx(g.coord1(idx), 0.0) + g.coord2(idx) * tau;
        double logv = 0.0;
        bool zero = false;
        for (size_t j = 0; j < np; ++j) {
            const Reduced r = reduce_arg(z - pts[j].z, tau);
            theta1_series(r.v, tau, &th[j], with_deriv ? &dth[j] : nullptr);
            gauss[j] = -2.0 * kPi * r.v.imag() * r.v.imag() / imtau;
            imv[j] = r.v.imag();
            const double a = std::abs(th[j]);
            if (a == 0.0) zero = true;
            logv += pts[j].multiplicity * (2.0 * std::log(a) + gauss[j]);
        }
        parts.log_norm[idx] =
            zero ? -std::numeric_limits<double>::infinity() : logv;
        if (with_deriv) {
            // |D phi|^2 = e^{sum n_j gauss_j} |sum_j n_j th'_j th_j^{n_j-1} prod_{k!=j} th_k^{n_k}
            //             + (sum_j n_j g_j) prod_k th_k^{n_k}|^2
            // with g_j the Gaussian log-derivative; polynomial in the theta
            // values, so finite on the divisor as well.
            cplx prod(1.0, 0.0);
            double gsum = 0.0;
            cplx gpart(0.0, 0.0);
            for (size_t j = 0; j < np; ++j) {
                prod *= pow_int(th[j], pts[j].multiplicity);
                gsum += gauss[j] * pts[j].multiplicity;
                gpart += cplx(0.0, 2.0 * kPi / imtau) * imv[j] *
                         static_cast<double>(pts[j].multiplicity);
            }
            cplx acc(0.0, 0.0);
            for (size_t j = 0; j < np; ++j) {
                cplx term = static_cast<double>(pts[j].multiplicity) * dth[j] *
                            pow_int(th[j], pts[j].multiplicity - 1);
                for (size_t k = 0; k < np; ++k)
                    if (k != j) term *= pow_int(th[k], pts[k].multiplicity);
                acc += term;
            }
            acc += gpart * prod;
            parts.deriv_raw[idx] = std::norm(acc) * std::exp(gsum);
        }
    }
    return parts;
}

double torus_norm_constant(const TorusHiggsParts& parts) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : parts.log_norm) mx = std::max(mx, v);
    return -mx;  // normalize so max |phi|^2 = 1
}

void validate_torus_divisor(const Divisor& d, const SurfaceGrid& g) {
    require_no_infinity_on_torus(d);
    for (const auto& p : d.points()) lattice_coords_checked(p.z, g.lattice_modulus());
}

} // namespace

ScalarField higgs_norm_torus(const Divisor& d, const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Torus, "higgs_norm_torus");
    validate_torus_divisor(d, *grid);
    TorusHiggsParts parts = torus_parts(d, *grid, false);
    const double c = torus_norm_constant(parts);
    ScalarField out(grid);
    for (int i = 0; i < out.size(); ++i) {
        const double lv = parts.log_norm[i];
        out[i] = std::isfinite(lv) ? std::exp(lv + c) : 0.0;
    }
    return out;
}

ScalarField higgs_deriv_norm_torus(const Divisor& d, const GridPtr& grid) {
    detail::require_kind(*grid, SurfaceGrid::Kind::Torus, "higgs_deriv_norm_torus");
    validate_torus_divisor(d, *grid);
    TorusHiggsParts parts = torus_parts(d, *grid, true);
    const double c = torus_norm_constant(parts);
    ScalarField out(grid);
    for (int i = 0; i < out.size(); ++i) out[i] = parts.deriv_raw[i] * std::exp(c);
    return out;
}

} // namespace gvx
