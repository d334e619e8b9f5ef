#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gvx/higgs.hpp"

using namespace gvx;

namespace {
constexpr double kPi = std::numbers::pi;

Divisor div_of(std::initializer_list<std::pair<cplx, int>> finite, int inf_mult = 0) {
    std::vector<DivisorPoint> pts;
    for (auto& [z, m] : finite) pts.push_back({z, false, m});
    if (inf_mult > 0) pts.push_back({cplx(), true, inf_mult});
    return Divisor(pts);
}

} // namespace

TEST_SUITE_BEGIN("higgs");

TEST_CASE("classifier: the three-way split") {
    CHECK(classify_divisor(div_of({{cplx(0, 0), 1}, {cplx(1, 0), 1}, {cplx(0, 1), 1}})) ==
          StabilityClass::Stable);
    CHECK(classify_divisor(div_of({{cplx(0, 0), 2}, {cplx(1, 0), 2}})) ==
          StabilityClass::StrictlyPolystable);
    for (int n = 1; n <= 6; ++n)
        CHECK(classify_divisor(div_of({{cplx(0.3, 0.1), n}})) == StabilityClass::Unstable);
    // borderline weight with a non-closed orbit: no solutions exist, grouped
    // with the unstable bucket
    CHECK(classify_divisor(div_of({{cplx(0, 0), 2}, {cplx(1, 0), 1}, {cplx(2, 0), 1}})) ==
          StabilityClass::Unstable);
}

TEST_CASE("classifier invariants under relabeling") {
    auto d1 = div_of({{cplx(0, 0), 2}, {cplx(1, 0), 1}});
    auto d2 = div_of({{cplx(1, 0), 1}, {cplx(0, 0), 2}});
    CHECK(classify_divisor(d1) == classify_divisor(d2));
    // chart swap z -> 1/z exchanges 0 and infinity
    auto d3 = div_of({{cplx(0, 0), 1}}, 1);
    auto d4 = div_of({{cplx(0, 0), 1}}, 1);
    CHECK(classify_divisor(d3) == classify_divisor(d4));
    CHECK(classify_divisor(d3) == StabilityClass::StrictlyPolystable);
}

TEST_CASE("divisor validation") {
    CHECK_THROWS_AS(div_of({{cplx(0, 0), 0}}), InvalidDivisor);
    CHECK_THROWS_AS(div_of({{cplx(0, 0), 1}, {cplx(0, 0), 2}}), InvalidDivisor);
    CHECK_THROWS_AS(Divisor(std::vector<DivisorPoint>{}), InvalidDivisor);
}

TEST_CASE("bradlow admissibility is a strict inequality") {
    CHECK(bradlow_admissible(2, 6.0));
    CHECK_FALSE(bradlow_admissible(2, 4.0));
    CHECK(bradlow_admissible(1, 2.0000001));
}

TEST_CASE("hilbert-mumford exponent") {
    CHECK(hilbert_mumford_exponent(div_of({{cplx(0.5, 0.5), 5}})) == 5);
    CHECK(hilbert_mumford_exponent(div_of({{cplx(0, 0), 2}, {cplx(1, 0), 2}})) == 2);
    auto stable = div_of({{cplx(0, 0), 1}, {cplx(1, 0), 1}, {cplx(0, 1), 1}});
    CHECK(hilbert_mumford_exponent(stable) == 1);
    CHECK(stable.degree() - 2 * hilbert_mumford_exponent(stable) > 0);
    // unstable <=> N - 2l < 0 on configurations with a strict maximal point
    auto uns = div_of({{cplx(0, 0), 3}, {cplx(1, 0), 1}});
    CHECK(classify_divisor(uns) == StabilityClass::Unstable);
    CHECK(uns.degree() - 2 * hilbert_mumford_exponent(uns) < 0);
}

TEST_CASE("sphere higgs norm: monomial closed form") {
    auto g = make_sphere_grid(32, 64);
    for (auto [l, n] : {std::pair{0, 1}, {1, 2}, {2, 3}}) {
        Divisor d = l > 0 ? div_of({{cplx(0, 0), l}}, n - l) : div_of({}, n);
        ScalarField hn = higgs_norm_sphere(d, g);
        double err = 0.0;
        for (int i = 0; i < hn.size(); ++i) {
            const double r2 = std::norm(g->chart_point(i));
            const double expect =
                std::exp(l * std::log(r2) - n * std::log1p(r2));
            err = std::max(err, std::abs(hn[i] - expect));
        }
        CHECK(err < 1e-12);
        for (int i = 0; i < hn.size(); ++i) CHECK(hn[i] >= 0.0);
    }
}

TEST_CASE("sphere higgs norm vanishes on on-grid divisor points") {
    auto g = make_sphere_grid(16, 32);
    const cplx z0 = g->chart_point(5 * 32 + 7);
    ScalarField hn = higgs_norm_sphere(div_of({{z0, 2}}, 0), g);
    CHECK(hn[5 * 32 + 7] == 0.0);
}

TEST_CASE("sphere constant-curvature identity (Weitzenbock form), second order") {
    // sup error away from the pole rows; the flux-form operator loses one
    // order in the two pole cells but stays second order in the interior
    auto err_at = [](int nt, int np) {
        auto g = make_sphere_grid(nt, np);
        Divisor d = div_of({{cplx(0.4, 0.2), 1}, {cplx(-0.9, 0.5), 1}});
        const int n = d.degree();
        ScalarField hn = higgs_norm_sphere(d, g);
        ScalarField dn = higgs_deriv_norm_sphere(d, g);
        ScalarField lap_hn = laplacian(hn);
        double err = 0.0, err_all = 0.0, scale = 0.0;
        for (int i = 0; i < hn.size(); ++i) {
            const double th = g->coord1(i);
            const double r2 = std::norm(g->chart_point(i));
            const double lam2 = 2.0 / ((1.0 + r2) * (1.0 + r2));
            const double rhs = 2.0 * n * hn[i] - (4.0 / lam2) * dn[i];
            const double e = std::abs(lap_hn[i] - rhs);
            err_all = std::max(err_all, e);
            if (th > 0.3 && th < kPi - 0.3) err = std::max(err, e);
            scale = std::max(scale, std::abs(rhs));
        }
        return std::pair{err / scale, err_all / scale};
    };
    const auto [e64, a64] = err_at(64, 128);
    const auto [e128, a128] = err_at(128, 256);
    CHECK(e64 < 2e-3);
    CHECK(e128 < e64 / 3.0);
    CHECK(a64 < 5e-2);
    CHECK(a128 < a64);
}

TEST_CASE("azimuthal symmetry of the antipodal-pair configuration") {
    auto g = make_sphere_grid(32, 64);
    ScalarField hn = higgs_norm_sphere(div_of({{cplx(0, 0), 1}}, 1), g);
    for (int i = 0; i < g->n1(); ++i) {
        const double ref = hn[i * g->n2()];
        for (int j = 1; j < g->n2(); ++j)
            CHECK(std::abs(hn[i * g->n2() + j] - ref) < 1e-13);
    }
}

TEST_CASE("theta function: zeros and quasi-periodicity") {
    const cplx tau(0.21, 1.13);
    CHECK(std::abs(theta1(cplx(0, 0), tau)) < 1e-14);
    CHECK(std::abs(theta1(cplx(1, 0) + tau, tau)) < 1e-13);
    const cplx v(0.31, 0.17);
    const cplx lhs1 = theta1(v + 1.0, tau);
    CHECK(std::abs(lhs1 + theta1(v, tau)) < 1e-13 * std::abs(lhs1));
    const cplx ipi(0.0, kPi);
    const cplx lhs2 = theta1(v + tau, tau);
    const cplx rhs2 = -std::exp(-ipi * tau - 2.0 * ipi * v) * theta1(v, tau);
    CHECK(std::abs(lhs2 - rhs2) < 1e-12 * std::abs(lhs2));
    // derivative consistency by central differences
    const cplx h(1e-6, 0.0);
    const cplx fd = (theta1(v + h, tau) - theta1(v - h, tau)) / (2.0 * h);
    CHECK(std::abs(theta1_deriv(v, tau) - fd) < 1e-8);
}

TEST_CASE("torus higgs norm: prescribed zeros and periodic construction") {
    auto g = make_torus_grid(64, 64, cplx(0.0, 1.0));
    Divisor d = div_of({{cplx(0.5, 0.5), 1}});
    ScalarField hn = higgs_norm_torus(d, g);
    const int center = 32 * 64 + 32;  // node at (0.5, 0.5)
    CHECK(hn[center] == 0.0);
    CHECK(hn.max() == 1.0);
    for (int i = 0; i < hn.size(); ++i) CHECK(hn[i] >= 0.0);

    // the doubly periodic combination: equal values at lattice-translated
    // arguments of the underlying theta factors
    const cplx tau(0.0, 1.0);
    auto gval = [&](cplx v) {
        return 2.0 * std::log(std::abs(theta1(v, tau))) -
               2.0 * kPi * v.imag() * v.imag() / tau.imag();
    };
    const cplx v(0.23, 0.61);
    CHECK(gval(v + 1.0) == doctest::Approx(gval(v)).epsilon(1e-12));
    CHECK(gval(v + tau) == doctest::Approx(gval(v)).epsilon(1e-12));
}

TEST_CASE("torus constant-curvature identity at spectral accuracy") {
    // Delta ln|phi|^2 = 2N off D is tested in the equivalent smooth form
    // Delta |phi|^2 = 2N |phi|^2 - (4/lambda^2)|D phi|^2, which holds at
    // every node (the log form is singular on D and defeats any fixed
    // exclusion radius).
    auto g = make_torus_grid(64, 64, cplx(0.0, 1.0));
    Divisor d = div_of({{cplx(0.31, 0.47), 1}, {cplx(0.72, 0.18), 1}});
    const int n = d.degree();
    ScalarField hn = higgs_norm_torus(d, g);
    ScalarField dn = higgs_deriv_norm_torus(d, g);
    ScalarField lap_hn = laplacian(hn);
    const double lam2 = g->torus_metric_factor();
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < hn.size(); ++i) {
        const double rhs = 2.0 * n * hn[i] - (4.0 / lam2) * dn[i];
        err = std::max(err, std::abs(lap_hn[i] - rhs));
        scale = std::max(scale, std::abs(rhs));
    }
    CHECK(err < 1e-6 * scale);
    CHECK(err < 1e-9 * scale);  // spectral: far below the contract tolerance
}

TEST_CASE("torus curvature density integrates to the degree") {
    auto g = make_torus_grid(64, 64, cplx(0.0, 1.0));
    Divisor d = div_of({{cplx(0.25, 0.25), 1}, {cplx(0.75, 0.5), 2}});
    const int n = d.degree();
    ScalarField hn = higgs_norm_torus(d, g);
    ScalarField dn = higgs_deriv_norm_torus(d, g);
    ScalarField lap_hn = laplacian(hn);
    const double lam2 = g->torus_metric_factor();
    // reconstruct i Lambda F = (Delta|phi|^2 + (4/lambda^2)|D phi|^2)/(2|phi|^2)
    // where the quotient is well conditioned; constancy is the
    // Hermite-Einstein condition
    ScalarField curv(g, static_cast<double>(n));
    double dev = 0.0;
    for (int i = 0; i < hn.size(); ++i) {
        if (hn[i] > 1e-3 * hn.max()) {
            curv[i] = (lap_hn[i] + (4.0 / lam2) * dn[i]) / (2.0 * hn[i]);
            dev = std::max(dev, std::abs(curv[i] - n));
        }
    }
    CHECK(dev < 1e-6 * n);
    CHECK(std::abs(integrate(curv) - 2.0 * kPi * n) < 1e-8 * 2.0 * kPi * n);
}

TEST_CASE("torus divisor domain validation") {
    auto g = make_torus_grid(16, 16, cplx(0.0, 1.0));
    CHECK_THROWS_AS(higgs_norm_torus(div_of({{cplx(1.5, 0.5), 1}}), g), InvalidDivisor);
    CHECK_THROWS_AS(higgs_norm_torus(div_of({{cplx(0.5, 0.5), 1}}, 1), g), InvalidDivisor);
    auto gs = make_sphere_grid(16, 32);
    CHECK_THROWS_AS(higgs_norm_torus(div_of({{cplx(0.5, 0.5), 1}}), gs), GridMismatch);
    CHECK_THROWS_AS(higgs_norm_sphere(div_of({{cplx(0.5, 0.5), 1}}), g), GridMismatch);
}

TEST_SUITE_END();
