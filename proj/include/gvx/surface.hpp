#ifndef GVX_SURFACE_HPP
#define GVX_SURFACE_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "gvx/errors.hpp"

namespace gvx {

using cplx = std::complex<double>;

/// Background geometry: a discretized flat torus or round (Fubini-Study)
/// sphere, always rescaled so the total area is 2*pi.
///
/// Conventions used throughout the library:
///   * the Laplacian is the geometer's positive-semidefinite operator
///     (Delta = -div grad); a plane wave is an eigenfield with eigenvalue
///     +|k|^2, and at an interior maximum Delta f >= 0,
///   * Vol = integrate(1) = 2*pi,
///   * the background Gauss curvature is constant: 0 on the torus, 2 on
///     the sphere.
class SurfaceGrid {
public:
    enum class Kind { Torus, Sphere };

    Kind kind() const { return kind_; }
    int n1() const { return n1_; }          ///< torus: s-resolution; sphere: theta rows
    int n2() const { return n2_; }          ///< torus: t-resolution; sphere: phi columns
    int node_count() const { return n1_ * n2_; }

    /// Torus lattice modulus (Im > 0).  Throws GridMismatch on a sphere.
    cplx lattice_modulus() const;

    /// Constant conformal factor of the flat torus metric relative to the
    /// lattice chart (z = s + t*modulus), chosen so the area is 2*pi.
    /// Throws GridMismatch on a sphere.
    double torus_metric_factor() const;

    /// Squared radius of the sphere (1/2 for area 2*pi).
    double sphere_radius_sq() const;

    /// Per-node chart coordinates.  Torus: lattice coordinates (s,t) in
    /// [0,1)^2.  Sphere: colatitude theta in (0,pi) and azimuth phi in
    /// [0,2*pi); the rows are staggered so no node sits on a pole.
    double coord1(int idx) const { return coord1_[idx]; }
    double coord2(int idx) const { return coord2_[idx]; }

    /// Per-node area weights; strictly positive, summing to 2*pi.
    const std::vector<double>& weights() const { return weights_; }

    /// Per-node density of the metric area element relative to the chart
    /// measure (torus: constant; sphere: r^2 sin(theta)).
    const std::vector<double>& chart_density() const { return density_; }

    /// Stereographic chart coordinate z = tan(theta/2) e^{i phi} of a
    /// sphere node, or s + t*modulus for a torus node.
    cplx chart_point(int idx) const;

    /// Constant background Gauss curvature (0 torus, 2 sphere).
    double background_curvature() const { return kind_ == Kind::Torus ? 0.0 : 2.0; }

    // Sphere internals used by the differential operators.
    double theta(int i) const { return theta_[i]; }
    double sin_theta(int i) const { return sin_theta_[i]; }
    double cell_mass(int i) const { return cell_mass_[i]; }  ///< cos(edge_i)-cos(edge_{i+1})
    double sin_edge(int i) const { return sin_edge_[i]; }    ///< sin at cell edge, 0 at poles

    friend std::shared_ptr<const SurfaceGrid> make_torus_grid(int, int, cplx);
    friend std::shared_ptr<const SurfaceGrid> make_sphere_grid(int, int);

private:
    SurfaceGrid() = default;

    Kind kind_ = Kind::Torus;
    int n1_ = 0, n2_ = 0;
    cplx modulus_;
    double metric_factor_ = 0.0;  // torus conformal factor
    double radius_sq_ = 0.5;
    std::vector<double> coord1_, coord2_, weights_, density_;
    std::vector<double> theta_, sin_theta_, cell_mass_, sin_edge_;
};

using GridPtr = std::shared_ptr<const SurfaceGrid>;

/// Real-valued grid function.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, double fill = 0.0);
    ScalarField(GridPtr grid, std::vector<double> values);

    const GridPtr& grid() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }
    double& operator[](int i) { return values_[i]; }
    double operator[](int i) const { return values_[i]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double min() const;
    double max() const;
    double sup_norm() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator+=(double c);
    ScalarField& operator*=(double c);

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Uniform periodic grid on the torus C/(Z + Z*modulus), flat metric
/// rescaled to total area 2*pi.  Requires n1, n2 >= 8 and Im(modulus) > 0.
GridPtr make_torus_grid(int n1, int n2, cplx lattice_modulus);

/// Staggered latitude-longitude grid on the round sphere of area 2*pi.
/// Requires n_theta >= 8 and n_phi >= 8 even.
GridPtr make_sphere_grid(int n_theta, int n_phi);

/// Discrete Laplace-Beltrami operator of the background metric
/// (positive-semidefinite convention).  Annihilates constants exactly and
/// its output integrates to zero; self-adjoint with respect to the grid
/// quadrature.  Torus: spectral.  Sphere: second-order conservative
/// discretization, spectral in azimuth.
ScalarField laplacian(const ScalarField& f);

/// Quadrature: sum of value * area weight.  Exact for constants.
double integrate(const ScalarField& f);

/// Pointwise squared gradient |grad f|^2 in the background metric.
ScalarField gradient_squared(const ScalarField& f);

/// Solves (Delta + shift) u = rhs for shift > 0, or the mean-zero Poisson
/// problem when shift == 0 (rhs is projected onto mean zero first).
ScalarField helmholtz_solve(const ScalarField& rhs, double shift);

/// Spectral partial derivatives used by diagnostics.  On the sphere the
/// colatitude derivative is computed along full meridian circles, so it is
/// spectrally accurate for smooth fields.
ScalarField deriv_coord1(const ScalarField& f);
ScalarField deriv_coord2(const ScalarField& f);

/// Second derivative along coordinate 1 in a single spectral pass (the
/// meridian extension of a first derivative is odd across the poles, so
/// composing deriv_coord1 twice is not valid on the sphere).
ScalarField deriv2_coord1(const ScalarField& f);

/// Complex Wirtinger derivative z -> d/dz of a field, in the stereographic
/// chart (sphere) or lattice chart (torus); returns (Re, Im) parts.
std::pair<ScalarField, ScalarField> complex_derivative(const ScalarField& f);

/// Columnar text export: one line per node with "index coord1 coord2
/// value".  The sidecar (path + ".meta") records grid kind, resolution and
/// lattice modulus.
void write_field(const std::string& path, const ScalarField& f);

namespace detail {
/// Throws GridMismatch unless both fields live on the same grid object.
void require_same_grid(const ScalarField& a, const ScalarField& b);
void require_kind(const SurfaceGrid& g, SurfaceGrid::Kind k, const char* op);
} // namespace detail

} // namespace gvx

#endif
