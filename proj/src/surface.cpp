#include "gvx/surface.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>

namespace gvx {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// FFTW plumbing.  Plans are cached per transform geometry and executed with
// the new-array interface on per-call fftw_malloc'ed buffers, so concurrent
// calls on immutable grids are safe.
// ---------------------------------------------------------------------------

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct PlanPair {
    fftw_plan fwd = nullptr;  // r2c
    fftw_plan bwd = nullptr;  // c2r
};

// 2-d r2c/c2r plans keyed by (n1, n2).
PlanPair& plans_2d(int n1, int n2) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_pair(n1, n2);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    PlanPair p;
    double* in = fftw_alloc_real(static_cast<size_t>(n1) * n2);
    fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n1) * (n2 / 2 + 1));
    p.fwd = fftw_plan_dft_r2c_2d(n1, n2, in, out, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_c2r_2d(n1, n2, out, in, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    return cache.emplace(key, p).first->second;
}

// Batched 1-d r2c/c2r plans: `howmany` contiguous rows of length n.
PlanPair& plans_rows(int n, int howmany) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_pair(n, howmany);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    PlanPair p;
    double* in = fftw_alloc_real(static_cast<size_t>(n) * howmany);
    fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1) * howmany);
    int nn[1] = {n};
    p.fwd = fftw_plan_many_dft_r2c(1, nn, howmany, in, nullptr, 1, n, out, nullptr, 1,
                                   n / 2 + 1, FFTW_ESTIMATE);
    p.bwd = fftw_plan_many_dft_c2r(1, nn, howmany, out, nullptr, 1, n / 2 + 1, in, nullptr,
                                   1, n, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    return cache.emplace(key, p).first->second;
}

struct RealBuf {
    double* p;
    explicit RealBuf(size_t n) : p(fftw_alloc_real(n)) {}
    ~RealBuf() { fftw_free(p); }
    RealBuf(const RealBuf&) = delete;
    RealBuf& operator=(const RealBuf&) = delete;
};
struct CplxBuf {
    fftw_complex* p;
    explicit CplxBuf(size_t n) : p(fftw_alloc_complex(n)) {}
    ~CplxBuf() { fftw_free(p); }
    CplxBuf(const CplxBuf&) = delete;
    CplxBuf& operator=(const CplxBuf&) = delete;
};

int signed_mode(int k, int n) { return k <= n / 2 ? k : k - n; }

// ---------------------------------------------------------------------------
// Torus spectral operators.  Multiplier taking the DFT index pair to the
// metric Laplacian eigenvalue |kappa|^2 / lambda^2.
// ---------------------------------------------------------------------------

double torus_eigenvalue(const SurfaceGrid& g, int k1i, int k2i) {
    const int k1 = signed_mode(k1i, g.n1());
    const int k2 = signed_mode(k2i, g.n2());
    const double re = g.lattice_modulus().real();
    const double im = g.lattice_modulus().imag();
    const double a = static_cast<double>(k1);
    const double b = (static_cast<double>(k2) - re * a) / im;
    return 2.0 * kPi * im * (a * a + b * b);
}

// Applies a real spectral multiplier mult(k1,k2) on the torus.
ScalarField torus_multiplier(const ScalarField& f,
                             const std::function<double(int, int)>& mult) {
    const auto& g = *f.grid();
    const int n1 = g.n1(), n2 = g.n2(), nc = n2 / 2 + 1;
    auto& plans = plans_2d(n1, n2);
    RealBuf re(static_cast<size_t>(n1) * n2);
    CplxBuf sp(static_cast<size_t>(n1) * nc);
    std::copy(f.values().begin(), f.values().end(), re.p);
    fftw_execute_dft_r2c(plans.fwd, re.p, sp.p);
    const double scale = 1.0 / (static_cast<double>(n1) * n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < nc; ++j) {
            const double m = mult(i, j) * scale;
            sp.p[static_cast<size_t>(i) * nc + j][0] *= m;
            sp.p[static_cast<size_t>(i) * nc + j][1] *= m;
        }
    fftw_execute_dft_c2r(plans.bwd, sp.p, re.p);
    ScalarField out(f.grid());
    std::copy(re.p, re.p + static_cast<size_t>(n1) * n2, out.values().begin());
    return out;
}

// Spectral derivative along lattice direction d (0: s, 1: t); the Nyquist
// mode is zeroed so the result stays real-symmetric.
ScalarField torus_lattice_deriv(const ScalarField& f, int d) {
    const auto& g = *f.grid();
    const int n1 = g.n1(), n2 = g.n2(), nc = n2 / 2 + 1;
    auto& plans = plans_2d(n1, n2);
    RealBuf re(static_cast<size_t>(n1) * n2);
    CplxBuf sp(static_cast<size_t>(n1) * nc);
    std::copy(f.values().begin(), f.values().end(), re.p);
    fftw_execute_dft_r2c(plans.fwd, re.p, sp.p);
    const double scale = 1.0 / (static_cast<double>(n1) * n2);
    for (int i = 0; i < n1; ++i) {
        int k1 = signed_mode(i, n1);
        if (2 * i == n1) k1 = 0;
        for (int j = 0; j < nc; ++j) {
            int k2 = j;
            if (2 * j == n2) k2 = 0;
            const double k = 2.0 * kPi * (d == 0 ? k1 : k2) * scale;
            const double a = sp.p[static_cast<size_t>(i) * nc + j][0];
            const double b = sp.p[static_cast<size_t>(i) * nc + j][1];
            // multiply by i*k
            sp.p[static_cast<size_t>(i) * nc + j][0] = -k * b;
            sp.p[static_cast<size_t>(i) * nc + j][1] = k * a;
        }
    }
    fftw_execute_dft_c2r(plans.bwd, sp.p, re.p);
    ScalarField out(f.grid());
    std::copy(re.p, re.p + static_cast<size_t>(n1) * n2, out.values().begin());
    return out;
}

// ---------------------------------------------------------------------------
// Sphere operators: spectral in azimuth, conservative second-order flux
// form in colatitude with the exact cell masses as volumes, so the operator
// is exactly self-adjoint against the quadrature weights.
// ---------------------------------------------------------------------------

// Forward azimuthal FFT of all rows; layout (n_theta) x (n_phi/2+1).
void sphere_fft_rows(const SurfaceGrid& g, const double* in, fftw_complex* out) {
    auto& plans = plans_rows(g.n2(), g.n1());
    RealBuf tmp(static_cast<size_t>(g.n1()) * g.n2());
    std::copy(in, in + static_cast<size_t>(g.n1()) * g.n2(), tmp.p);
    fftw_execute_dft_r2c(plans.fwd, tmp.p, out);
}

void sphere_ifft_rows(const SurfaceGrid& g, fftw_complex* in, double* out) {
    auto& plans = plans_rows(g.n2(), g.n1());
    fftw_execute_dft_c2r(plans.bwd, in, out);
    const double scale = 1.0 / g.n2();
    for (int i = 0; i < g.n1() * g.n2(); ++i) out[i] *= scale;
}

ScalarField sphere_laplacian(const ScalarField& f) {
    const auto& g = *f.grid();
    const int nt = g.n1(), np = g.n2(), nc = np / 2 + 1;
    const double dth = kPi / nt, r2 = g.sphere_radius_sq();
    CplxBuf sp(static_cast<size_t>(nt) * nc);
    sphere_fft_rows(g, f.values().data(), sp.p);
    CplxBuf out(static_cast<size_t>(nt) * nc);
    std::vector<double> sub(nt), sup(nt), dia(nt);
    for (int i = 0; i < nt; ++i) {
        const double denom = dth * r2 * g.cell_mass(i);
        sub[i] = i > 0 ? -g.sin_edge(i) / denom : 0.0;
        sup[i] = i < nt - 1 ? -g.sin_edge(i + 1) / denom : 0.0;
        dia[i] = (g.sin_edge(i) + g.sin_edge(i + 1)) / denom;
    }
    for (int m = 0; m < nc; ++m) {
        const double mm = static_cast<double>(m) * m;
        for (int i = 0; i < nt; ++i) {
            const double diag = dia[i] + mm / (r2 * g.sin_theta(i) * g.sin_theta(i));
            for (int part = 0; part < 2; ++part) {
                double v = diag * sp.p[static_cast<size_t>(i) * nc + m][part];
                if (i > 0) v += sub[i] * sp.p[static_cast<size_t>(i - 1) * nc + m][part];
                if (i < nt - 1) v += sup[i] * sp.p[static_cast<size_t>(i + 1) * nc + m][part];
                out.p[static_cast<size_t>(i) * nc + m][part] = v;
            }
        }
    }
    ScalarField res(f.grid());
    RealBuf re(static_cast<size_t>(nt) * np);
    sphere_ifft_rows(g, out.p, re.p);
    std::copy(re.p, re.p + static_cast<size_t>(nt) * np, res.values().begin());
    return res;
}

ScalarField sphere_helmholtz(const ScalarField& rhs, double shift) {
    const auto& g = *rhs.grid();
    const int nt = g.n1(), np = g.n2(), nc = np / 2 + 1;
    const double dth = kPi / nt, r2 = g.sphere_radius_sq();
    CplxBuf sp(static_cast<size_t>(nt) * nc);
    sphere_fft_rows(g, rhs.values().data(), sp.p);
    std::vector<double> sub(nt), sup(nt), dia0(nt);
    for (int i = 0; i < nt; ++i) {
        const double denom = dth * r2 * g.cell_mass(i);
        sub[i] = i > 0 ? -g.sin_edge(i) / denom : 0.0;
        sup[i] = i < nt - 1 ? -g.sin_edge(i + 1) / denom : 0.0;
        dia0[i] = (g.sin_edge(i) + g.sin_edge(i + 1)) / denom;
    }
    std::vector<cplx> b(nt), cp(nt), dp(nt), x(nt);
    for (int m = 0; m < nc; ++m) {
        const double mm = static_cast<double>(m) * m;
        for (int i = 0; i < nt; ++i) {
            b[i] = cplx(sp.p[static_cast<size_t>(i) * nc + m][0],
                        sp.p[static_cast<size_t>(i) * nc + m][1]);
        }
        if (m == 0 && shift == 0.0) {
            // mean-zero Poisson gauge: project rhs, pin the first unknown
            cplx mean(0.0, 0.0);
            double tot = 0.0;
            for (int i = 0; i < nt; ++i) {
                mean += b[i] * (r2 * g.cell_mass(i));
                tot += r2 * g.cell_mass(i);
            }
            mean /= tot;
            for (int i = 0; i < nt; ++i) b[i] -= mean;
        }
        std::vector<double> dia(nt);
        for (int i = 0; i < nt; ++i)
            dia[i] = dia0[i] + mm / (r2 * g.sin_theta(i) * g.sin_theta(i)) + shift;
        if (m == 0 && shift == 0.0) dia[0] += 1.0;  // remove the constant nullspace
        cp[0] = sup[0] / dia[0];
        dp[0] = b[0] / dia[0];
        for (int i = 1; i < nt; ++i) {
            const cplx den = dia[i] - sub[i] * cp[i - 1];
            cp[i] = sup[i] / den;
            dp[i] = (b[i] - sub[i] * dp[i - 1]) / den;
        }
        x[nt - 1] = dp[nt - 1];
        for (int i = nt - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
        if (m == 0 && shift == 0.0) {
            // fix the additive constant to mean zero
            cplx mean(0.0, 0.0);
            double tot = 0.0;
            for (int i = 0; i < nt; ++i) {
                mean += x[i] * (r2 * g.cell_mass(i));
                tot += r2 * g.cell_mass(i);
            }
            mean /= tot;
            for (int i = 0; i < nt; ++i) x[i] -= mean;
        }
        for (int i = 0; i < nt; ++i) {
            sp.p[static_cast<size_t>(i) * nc + m][0] = x[i].real();
            sp.p[static_cast<size_t>(i) * nc + m][1] = x[i].imag();
        }
    }
    ScalarField res(rhs.grid());
    RealBuf re(static_cast<size_t>(nt) * np);
    sphere_ifft_rows(g, sp.p, re.p);
    std::copy(re.p, re.p + static_cast<size_t>(nt) * np, res.values().begin());
    return res;
}

// Colatitude derivative along full meridian circles (periodic extension
// f(2*pi - theta, phi + pi) = f(theta, phi)); spectral for smooth fields.
// order = 1 or 2; the mirrored half picks up (-1)^order.
ScalarField sphere_dtheta(const ScalarField& f, int order = 1) {
    const auto& g = *f.grid();
    const int nt = g.n1(), np = g.n2();
    const int n = 2 * nt, half = np / 2;
    auto& plans = plans_rows(n, 1);
    ScalarField out(f.grid());
    RealBuf line(static_cast<size_t>(n));
    CplxBuf sp(static_cast<size_t>(n / 2 + 1));
    const double mirror = order == 1 ? -1.0 : 1.0;
    for (int j = 0; j < half; ++j) {
        const int jo = j + half;
        for (int i = 0; i < nt; ++i) line.p[i] = f[i * np + j];
        for (int i = 0; i < nt; ++i) line.p[nt + i] = f[(nt - 1 - i) * np + jo];
        fftw_execute_dft_r2c(plans.fwd, line.p, sp.p);
        // meridian circle has period 2*pi in theta
        for (int k = 0; k <= n / 2; ++k) {
            double kk = static_cast<double>(k);
            if (2 * k == n && order == 1) kk = 0.0;
            const double a = sp.p[k][0], b = sp.p[k][1];
            if (order == 1) {
                sp.p[k][0] = -kk * b / n;
                sp.p[k][1] = kk * a / n;
            } else {
                sp.p[k][0] = -kk * kk * a / n;
                sp.p[k][1] = -kk * kk * b / n;
            }
        }
        fftw_execute_dft_c2r(plans.bwd, sp.p, line.p);
        for (int i = 0; i < nt; ++i) out[i * np + j] = line.p[i];
        for (int i = 0; i < nt; ++i) out[(nt - 1 - i) * np + jo] = mirror * line.p[nt + i];
    }
    return out;
}

ScalarField sphere_dphi(const ScalarField& f) {
    const auto& g = *f.grid();
    const int nt = g.n1(), np = g.n2(), nc = np / 2 + 1;
    CplxBuf sp(static_cast<size_t>(nt) * nc);
    sphere_fft_rows(g, f.values().data(), sp.p);
    for (int i = 0; i < nt; ++i)
        for (int m = 0; m < nc; ++m) {
            const double k = (2 * m == np) ? 0.0 : static_cast<double>(m);
            const double a = sp.p[static_cast<size_t>(i) * nc + m][0];
            const double b = sp.p[static_cast<size_t>(i) * nc + m][1];
            sp.p[static_cast<size_t>(i) * nc + m][0] = -k * b;
            sp.p[static_cast<size_t>(i) * nc + m][1] = k * a;
        }
    ScalarField res(f.grid());
    RealBuf re(static_cast<size_t>(nt) * np);
    sphere_ifft_rows(g, sp.p, re.p);
    std::copy(re.p, re.p + static_cast<size_t>(nt) * np, res.values().begin());
    return res;
}

} // namespace

// ---------------------------------------------------------------------------
// SurfaceGrid / ScalarField
// ---------------------------------------------------------------------------

cplx SurfaceGrid::lattice_modulus() const {
    if (kind_ != Kind::Torus) throw GridMismatch("lattice_modulus: not a torus grid");
    return modulus_;
}

double SurfaceGrid::torus_metric_factor() const {
    if (kind_ != Kind::Torus) throw GridMismatch("torus_metric_factor: not a torus grid");
    return metric_factor_;
}

double SurfaceGrid::sphere_radius_sq() const { return radius_sq_; }

cplx SurfaceGrid::chart_point(int idx) const {
    if (kind_ == Kind::Torus) {
        return cplx(coord1_[idx], 0.0) + coord2_[idx] * modulus_;
    }
    const double th = coord1_[idx], ph = coord2_[idx];
    return std::tan(0.5 * th) * cplx(std::cos(ph), std::sin(ph));
}

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_ ? grid_->node_count() : 0, fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_ && static_cast<int>(values_.size()) != grid_->node_count())
        throw InvalidArgument("ScalarField: value count does not match grid");
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    detail::require_same_grid(*this, o);
    for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
    detail::require_same_grid(*this, o);
    for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}
ScalarField& ScalarField::operator+=(double c) {
    for (double& v : values_) v += c;
    return *this;
}
ScalarField& ScalarField::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

namespace detail {
void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (a.grid().get() != b.grid().get())
        throw GridMismatch("fields live on different grids");
}
void require_kind(const SurfaceGrid& g, SurfaceGrid::Kind k, const char* op) {
    if (g.kind() != k)
        throw GridMismatch(std::string(op) + ": wrong grid kind");
}
} // namespace detail

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

GridPtr make_torus_grid(int n1, int n2, cplx lattice_modulus) {
    if (n1 < 8 || n2 < 8)
        throw ResolutionTooSmall("make_torus_grid: need n1, n2 >= 8");
    if (!(lattice_modulus.imag() > 0.0))
        throw DegenerateLattice("make_torus_grid: Im(modulus) must be positive");
    auto g = std::shared_ptr<SurfaceGrid>(new SurfaceGrid());
    g->kind_ = SurfaceGrid::Kind::Torus;
    g->n1_ = n1;
    g->n2_ = n2;
    g->modulus_ = lattice_modulus;
    g->metric_factor_ = 2.0 * kPi / lattice_modulus.imag();
    const int n = n1 * n2;
    g->coord1_.resize(n);
    g->coord2_.resize(n);
    const double w = 2.0 * kPi / n;
    g->weights_.assign(n, w);
    g->density_.assign(n, g->metric_factor_ * lattice_modulus.imag());
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            g->coord1_[i * n2 + j] = static_cast<double>(i) / n1;
            g->coord2_[i * n2 + j] = static_cast<double>(j) / n2;
        }
    return g;
}

GridPtr make_sphere_grid(int n_theta, int n_phi) {
    if (n_theta < 8 || n_phi < 8)
        throw ResolutionTooSmall("make_sphere_grid: need n_theta, n_phi >= 8");
    if (n_phi % 2 != 0)
        throw ResolutionTooSmall("make_sphere_grid: n_phi must be even");
    auto g = std::shared_ptr<SurfaceGrid>(new SurfaceGrid());
    g->kind_ = SurfaceGrid::Kind::Sphere;
    g->n1_ = n_theta;
    g->n2_ = n_phi;
    g->radius_sq_ = 0.5;
    const double dth = kPi / n_theta, dph = 2.0 * kPi / n_phi;
    g->theta_.resize(n_theta);
    g->sin_theta_.resize(n_theta);
    g->cell_mass_.resize(n_theta);
    g->sin_edge_.resize(n_theta + 1);
    for (int i = 0; i <= n_theta; ++i)
        g->sin_edge_[i] = (i == 0 || i == n_theta) ? 0.0 : std::sin(i * dth);
    for (int i = 0; i < n_theta; ++i) {
        g->theta_[i] = (i + 0.5) * dth;
        g->sin_theta_[i] = std::sin(g->theta_[i]);
        g->cell_mass_[i] = std::cos(i * dth) - std::cos((i + 1) * dth);
    }
    const int n = n_theta * n_phi;
    g->coord1_.resize(n);
    g->coord2_.resize(n);
    g->weights_.resize(n);
    g->density_.resize(n);
    double total = 0.0;
    for (int i = 0; i < n_theta; ++i)
        for (int j = 0; j < n_phi; ++j) {
            const int idx = i * n_phi + j;
            g->coord1_[idx] = g->theta_[i];
            g->coord2_[idx] = j * dph;
            g->weights_[idx] = g->radius_sq_ * g->cell_mass_[i] * dph;
            g->density_[idx] = g->radius_sq_ * g->sin_theta_[i];
            total += g->weights_[idx];
        }
    const double rescale = 2.0 * kPi / total;
    for (double& w : g->weights_) w *= rescale;
    return g;
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

ScalarField laplacian(const ScalarField& f) {
    const auto& g = *f.grid();
    if (g.kind() == SurfaceGrid::Kind::Torus) {
        return torus_multiplier(f, [&g](int i, int j) { return torus_eigenvalue(g, i, j); });
    }
    return sphere_laplacian(f);
}

double integrate(const ScalarField& f) {
    const auto& w = f.grid()->weights();
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) s += f[static_cast<int>(i)] * w[i];
    return s;
}

ScalarField gradient_squared(const ScalarField& f) {
    const auto& g = *f.grid();
    ScalarField out(f.grid());
    if (g.kind() == SurfaceGrid::Kind::Torus) {
        ScalarField fs = torus_lattice_deriv(f, 0);
        ScalarField ft = torus_lattice_deriv(f, 1);
        const double re = g.lattice_modulus().real(), im = g.lattice_modulus().imag();
        const double lam2 = g.torus_metric_factor();
        for (int i = 0; i < f.size(); ++i) {
            const double fx = fs[i];
            const double fy = (ft[i] - re * fs[i]) / im;
            out[i] = (fx * fx + fy * fy) / lam2;
        }
        return out;
    }
    ScalarField fth = sphere_dtheta(f);
    ScalarField fph = sphere_dphi(f);
    const double r2 = g.sphere_radius_sq();
    for (int i = 0; i < f.size(); ++i) {
        const double st = g.sin_theta(i / g.n2());
        const double a = fth[i];
        const double b = fph[i] / st;
        out[i] = (a * a + b * b) / r2;
    }
    return out;
}

ScalarField helmholtz_solve(const ScalarField& rhs, double shift) {
    const auto& g = *rhs.grid();
    if (shift < 0.0) throw InvalidArgument("helmholtz_solve: shift must be >= 0");
    if (g.kind() == SurfaceGrid::Kind::Sphere) return sphere_helmholtz(rhs, shift);
    if (shift == 0.0) {
        const double mean = integrate(rhs) / (2.0 * kPi);
        ScalarField r = rhs;
        r += -mean;
        return torus_multiplier(r, [&g](int i, int j) {
            const double e = torus_eigenvalue(g, i, j);
            return e == 0.0 ? 0.0 : 1.0 / e;
        });
    }
    return torus_multiplier(
        rhs, [&g, shift](int i, int j) { return 1.0 / (torus_eigenvalue(g, i, j) + shift); });
}

ScalarField deriv_coord1(const ScalarField& f) {
    if (f.grid()->kind() == SurfaceGrid::Kind::Torus) return torus_lattice_deriv(f, 0);
    return sphere_dtheta(f);
}

ScalarField deriv_coord2(const ScalarField& f) {
    if (f.grid()->kind() == SurfaceGrid::Kind::Torus) return torus_lattice_deriv(f, 1);
    return sphere_dphi(f);
}

ScalarField deriv2_coord1(const ScalarField& f) {
    const auto& g = *f.grid();
    if (g.kind() == SurfaceGrid::Kind::Torus) {
        return torus_multiplier(f, [&g](int i, int j) {
            (void)j;
            int k1 = signed_mode(i, g.n1());
            return -(2.0 * kPi * k1) * (2.0 * kPi * k1);
        });
    }
    return sphere_dtheta(f, 2);
}

std::pair<ScalarField, ScalarField> complex_derivative(const ScalarField& f) {
    const auto& g = *f.grid();
    ScalarField re(f.grid()), im(f.grid());
    if (g.kind() == SurfaceGrid::Kind::Torus) {
        // z = s + t*modulus; d/dz = d/dx via chart gradient
        ScalarField fs = torus_lattice_deriv(f, 0);
        ScalarField ft = torus_lattice_deriv(f, 1);
        const double mre = g.lattice_modulus().real(), mim = g.lattice_modulus().imag();
        for (int i = 0; i < f.size(); ++i) {
            const double fx = fs[i];
            const double fy = (ft[i] - mre * fs[i]) / mim;
            re[i] = 0.5 * fx;
            im[i] = -0.5 * fy;
        }
        return {re, im};
    }
    // d/dz = (1/z) * (sin(theta) d_theta - i d_phi)/2 in the stereographic chart
    ScalarField fth = sphere_dtheta(f);
    ScalarField fph = sphere_dphi(f);
    for (int i = 0; i < f.size(); ++i) {
        const int ith = i / g.n2();
        const double st = g.sin_theta(ith);
        const cplx z = g.chart_point(i);
        const cplx d = 0.5 * (st * fth[i] - cplx(0.0, 1.0) * fph[i]) / z;
        re[i] = d.real();
        im[i] = d.imag();
    }
    return {re, im};
}

void write_field(const std::string& path, const ScalarField& f) {
    std::ofstream out(path);
    if (!out) throw Error("write_field: cannot open " + path);
    char line[160];
    for (int i = 0; i < f.size(); ++i) {
        std::snprintf(line, sizeof line, "%d %.17g %.17g %.17g\n", i,
                      f.grid()->coord1(i), f.grid()->coord2(i), f[i]);
        out << line;
    }
    std::ofstream meta(path + ".meta");
    const auto& g = *f.grid();
    meta << "kind = " << (g.kind() == SurfaceGrid::Kind::Torus ? "torus" : "sphere") << "\n";
    meta << "n1 = " << g.n1() << "\n";
    meta << "n2 = " << g.n2() << "\n";
    if (g.kind() == SurfaceGrid::Kind::Torus) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "lattice_re = %.17g\nlattice_im = %.17g\n",
                      g.lattice_modulus().real(), g.lattice_modulus().imag());
        meta << buf;
    }
}

} // namespace gvx
