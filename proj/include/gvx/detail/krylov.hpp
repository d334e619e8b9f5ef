#ifndef GVX_DETAIL_KRYLOV_HPP
#define GVX_DETAIL_KRYLOV_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace gvx::detail {

using Vec = std::vector<double>;
using LinOp = std::function<Vec(const Vec&)>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double sup(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline void axpy(double a, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

/// Preconditioned conjugate gradient for SPD operators.  Returns the
/// achieved sup-norm residual.
inline double pcg(const LinOp& A, const LinOp& M, const Vec& b, Vec& x, double tol,
                  int max_iter) {
    x.assign(b.size(), 0.0);
    Vec r = b;
    Vec z = M(r);
    Vec p = z;
    double rz = dot(r, z);
    double res = sup(r);
    for (int it = 0; it < max_iter && res > tol; ++it) {
        Vec ap = A(p);
        const double pap = dot(p, ap);
        if (pap <= 0.0) break;  // loss of positivity: return best iterate
        const double alpha = rz / pap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        res = sup(r);
        if (res <= tol) break;
        z = M(r);
        const double rz2 = dot(r, z);
        const double beta = rz2 / rz;
        rz = rz2;
        for (size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    return res;
}

/// Preconditioned BiCGStab for general operators.  Returns the achieved
/// sup-norm residual (of the unpreconditioned system).
inline double bicgstab(const LinOp& A, const LinOp& M, const Vec& b, Vec& x, double tol,
                       int max_iter) {
    x.assign(b.size(), 0.0);
    Vec r = b;
    Vec r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    Vec v(b.size(), 0.0), p(b.size(), 0.0);
    double res = sup(r);
    for (int it = 0; it < max_iter && res > tol; ++it) {
        const double rho1 = dot(r0, r);
        if (std::abs(rho1) < 1e-300) break;
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho1 / rho) * (alpha / omega);
            for (size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        Vec ph = M(p);
        v = A(ph);
        const double den = dot(r0, v);
        if (std::abs(den) < 1e-300) break;
        alpha = rho1 / den;
        Vec s = r;
        axpy(-alpha, v, s);
        if (sup(s) <= tol) {
            axpy(alpha, ph, x);
            res = sup(s);
            break;
        }
        Vec sh = M(s);
        Vec t = A(sh);
        const double tt = dot(t, t);
        if (tt < 1e-300) break;
        omega = dot(t, s) / tt;
        axpy(alpha, ph, x);
        axpy(omega, sh, x);
        r = s;
        axpy(-omega, t, r);
        res = sup(r);
        rho = rho1;
    }
    return res;
}

} // namespace gvx::detail

#endif
