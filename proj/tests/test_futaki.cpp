#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gvx/futaki.hpp"
#include "gvx/surface.hpp"

using namespace gvx;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE_BEGIN("futaki");

TEST_CASE("closed form: substitution examples and preconditions") {
    CHECK(futaki_closed_form(2, 1, 0.7, 5.3) == cplx(0.0, 0.0));
    CHECK(futaki_closed_form(1, 0, 1.0, 6.0).imag() == doctest::Approx(8.0 * kPi));
    CHECK(futaki_closed_form(2, 0, 0.5, 6.0).imag() == doctest::Approx(4.0 * kPi));
    CHECK_THROWS_AS(futaki_closed_form(2, 2, 1.0, 6.0), InvalidArgument);
    CHECK_THROWS_AS(futaki_closed_form(2, -1, 1.0, 6.0), InvalidArgument);
    CHECK_THROWS_AS(futaki_closed_form(2, 0, 0.0, 6.0), InvalidArgument);
}

TEST_CASE("quadrature matches the closed form") {
    auto g = make_sphere_grid(128, 256);
    {
        FutakiResult q = futaki_quadrature(0, 1, 1.0, 6.0, g);
        const cplx cf = futaki_closed_form(1, 0, 1.0, 6.0);
        CHECK(std::abs(q.value - cf) < 1e-6 * std::abs(cf));
        CHECK(std::abs(q.sub_vertical - kPi * (2.0 * 0 - 1)) < 1e-6);
        CHECK(std::abs(q.sub_coupling) < 1e-8);
    }
    {
        FutakiResult q = futaki_quadrature(1, 2, 1.0, 6.0, g);
        CHECK(std::abs(q.value) < 1e-8);
        CHECK(std::abs(q.sub_vertical) < 1e-8);
    }
    // purely imaginary for the diagonal generator
    FutakiResult q = futaki_quadrature(1, 3, 0.7, 8.0, g);
    CHECK(std::abs(q.value.real()) < 1e-10);
}

TEST_CASE("quadrature improves under refinement") {
    const cplx cf = futaki_closed_form(3, 1, 0.5, 8.0);
    auto err_at = [&](int nt, int np) {
        auto g = make_sphere_grid(nt, np);
        return std::abs(futaki_quadrature(1, 3, 0.5, 8.0, g).value - cf);
    };
    const double e32 = err_at(32, 64);
    const double e64 = err_at(64, 128);
    CHECK(e64 <= e32 + 1e-12);
    CHECK(e64 < 1e-9 * std::abs(cf));
}

TEST_CASE("base-point independence under a bundle-metric perturbation") {
    auto g = make_sphere_grid(64, 128);
    const cplx base = futaki_quadrature_perturbed(1, 3, 1.0, 8.0, g, 0.0);
    const cplx cf = futaki_closed_form(3, 1, 1.0, 8.0);
    CHECK(std::abs(base - cf) < 1e-8 * std::abs(cf));
    for (double eps : {0.05, 0.2}) {
        const cplx pert = futaki_quadrature_perturbed(1, 3, 1.0, 8.0, g, eps);
        CHECK(std::abs(pert - base) < 1e-6 * std::abs(base));
    }
}

TEST_CASE("character property: off-diagonal generator pairs to zero") {
    auto g = make_sphere_grid(64, 128);
    for (int n : {1, 2}) {
        const cplx v = futaki_offdiagonal_quadrature(n, 1.0, 2.0 * n + 2.0, g);
        CHECK(std::abs(v) < 1e-8);
    }
}

TEST_CASE("obstruction consistency with the admissible range") {
    for (int n = 1; n <= 4; ++n) {
        const double tau = 2.0 * n + 2.0;  // admissible: tau > 2N
        for (int l = 0; l < n; ++l) {
            const cplx v = futaki_closed_form(n, l, 1.0, tau);
            if (2 * l == n) {
                CHECK(v == cplx(0.0, 0.0));
            } else {
                CHECK(std::abs(v) > 1e-12);
            }
        }
    }
}

TEST_CASE("maximal weight: values and the sign bridge to polystability") {
    CHECK(maximal_weight(2, 1, 1.0, 6.0) == 0.0);
    CHECK(maximal_weight(2, 2, 1.0, 6.0) == doctest::Approx(-16.0 * kPi));
    CHECK(maximal_weight(3, 1, 1.0, 8.0) == doctest::Approx(8.0 * kPi));
    for (int n = 1; n <= 4; ++n) {
        const double tau = 2.0 * n + 2.0;
        for (int l = 0; l <= n; ++l) {
            const double w = maximal_weight(n, l, 1.0, tau);
            CHECK((w < 0.0) == (n - 2 * l < 0));
        }
    }
}

TEST_CASE("extremal pair identities hold at the Fubini-Study pair") {
    auto g = make_sphere_grid(128, 256);
    auto [e1, e2] = extremal_pair_errors(g);
    CHECK(e1 < 1e-4);
    CHECK(e2 < 1e-4);
    CHECK(check_extremal_pair(g));

    // spot value at the pole: Delta |phi|^2 -> 2 as z -> 0
    ScalarField hn(g);
    for (int i = 0; i < hn.size(); ++i)
        hn[i] = 1.0 / (1.0 + std::norm(g->chart_point(i)));
    ScalarField lap = laplacian(hn);
    CHECK(lap[0] == doctest::Approx(2.0).epsilon(5e-3));
}

TEST_CASE("identities fail off the Fubini-Study pair") {
    auto g = make_sphere_grid(64, 128);
    // perturb the bundle metric: the first identity picks up an O(eps) error
    ScalarField hn(g);
    for (int i = 0; i < hn.size(); ++i) {
        const double r2 = std::norm(g->chart_point(i));
        const double xi = (1.0 - r2) / (1.0 + r2);
        hn[i] = std::exp(0.2 * xi) / (1.0 + r2);
    }
    ScalarField lap = laplacian(hn);
    double err = 0.0;
    for (int i = 0; i < hn.size(); ++i) {
        const double r2 = std::norm(g->chart_point(i));
        err = std::max(err, std::abs(lap[i] - 2.0 * (1.0 - r2) / (1.0 + r2)));
    }
    CHECK(err > 1e-2);
}

TEST_SUITE_END();
