#ifndef GVX_HIGGS_HPP
#define GVX_HIGGS_HPP

#include <optional>
#include <vector>

#include "gvx/surface.hpp"

namespace gvx {

/// Effective divisor D = sum n_j p_j.  A point is either a finite chart
/// coordinate or the point at infinity (sphere only).
struct DivisorPoint {
    cplx z{};            ///< chart coordinate (ignored when at_infinity)
    bool at_infinity = false;
    int multiplicity = 1;
};

class Divisor {
public:
    Divisor() = default;
    explicit Divisor(std::vector<DivisorPoint> points);

    const std::vector<DivisorPoint>& points() const { return points_; }
    int degree() const { return degree_; }  ///< N = sum of multiplicities
    int max_multiplicity() const;
    bool has_infinity() const;

private:
    std::vector<DivisorPoint> points_;
    int degree_ = 0;
};

enum class StabilityClass { Stable, StrictlyPolystable, Unstable };

const char* to_string(StabilityClass s);

/// Three-way classification of the SL(2,C)-action on degree-N divisors:
/// stable iff every multiplicity is < N/2, strictly polystable iff the
/// divisor is two points of multiplicity N/2 each, unstable otherwise.
StabilityClass classify_divisor(const Divisor& d);

/// Existence bound for the vortex equation at volume 2*pi: true iff
/// N < tau/2 (strict).
bool bradlow_admissible(int n, double tau);

/// Exponent of the limiting monomial configuration under the most
/// destabilizing one-parameter subgroup: the largest multiplicity.
int hilbert_mumford_exponent(const Divisor& d);

/// Pointwise squared norm of the holomorphic section with divisor D on the
/// degree-N bundle over the sphere, in the Fubini-Study metric:
/// |p(z)|^2 / (1+|z|^2)^N with p monic vanishing on the finite part of D.
ScalarField higgs_norm_sphere(const Divisor& d, const GridPtr& grid);

/// Squared norm of the covariant derivative of the same section (Chern
/// connection of the Fubini-Study metric); smooth companion field used to
/// verify the constant-curvature identity in Weitzenbock form.
ScalarField higgs_deriv_norm_sphere(const Divisor& d, const GridPtr& grid);

/// Doubly periodic squared norm on the torus, built from translated odd
/// theta factors with the Gaussian quasi-periodicity correction; vanishes
/// to order 2*n_j at each divisor point and satisfies the constant-curvature
/// (Hermite-Einstein) identity away from D.  Normalized to max value 1.
ScalarField higgs_norm_torus(const Divisor& d, const GridPtr& grid);

/// Covariant-derivative squared norm companion on the torus, with the same
/// normalization constant as higgs_norm_torus.
ScalarField higgs_deriv_norm_torus(const Divisor& d, const GridPtr& grid);

/// First Jacobi theta function theta_1(v | modulus) and its v-derivative,
/// by the sine series with terms kept down to absolute size 1e-14; the
/// argument is reduced to the fundamental cell first.
cplx theta1(cplx v, cplx modulus);
cplx theta1_deriv(cplx v, cplx modulus);

} // namespace gvx

#endif
