#ifndef GVX_GRAVITATING_HPP
#define GVX_GRAVITATING_HPP

#include <string>
#include <vector>

#include "gvx/higgs.hpp"
#include "gvx/surface.hpp"
#include "gvx/vortex.hpp"

namespace gvx {

/// Model constants at volume 2*pi.  The topological constant is pinned by
/// c = chi - 2*alpha*tau*N; the Einstein-Bogomolnyi regime is c = 0, which
/// forces genus 0 and alpha = chi/(2*tau*N).
struct ModelParams {
    double alpha = 0.0;  ///< coupling (continuity parameter t along a path)
    double tau = 0.0;
    int n = 0;      ///< divisor degree N = c1(L)
    int genus = 0;
    int chi = 0;    ///< 2 - 2*genus
    double c = 0.0;

    static ModelParams make(int genus, int n, double tau, double alpha);
    /// c = 0 gauge on the sphere: alpha = chi/(2*tau*N), c set to exact zero.
    static ModelParams einstein_bogomolnyi(int n, double tau);
};

/// Topological constant of the coupled system at volume 2*pi.
double topological_c(const ModelParams& p);

/// Coupling threshold (2g-2)/(2*tau*(tau/2 - N)) below which existence and
/// uniqueness are guaranteed in genus >= 2.  Requires genus >= 2 and
/// 0 < N < tau/2.
double alpha_star(int genus, double tau, int n);

/// Boundedness monitors recorded for each accepted state along a path.
struct EstimateTrace {
    double y_min = 0.0;   ///< min of y = e^{4 t tau f - 2 c v}
    double y_max = 0.0;
    double osc_f = 0.0;   ///< max f - min f
    double osc_v = 0.0;
    double integral_first = 0.0;   ///< int (|phi|^2_h - tau) e^E w0  (target -4 pi N)
    double integral_second = 0.0;  ///< int e^E w0                    (target 2 pi)
    double integral_log = 0.0;     ///< int (4 t tau f - 2 c v) w0
    bool blowup_flag = false;      ///< set when a monitor grows monotonically
};

/// One accepted point of the coupled solve: conformal exponent f for the
/// bundle metric, Kahler potential v for omega = (1 - Delta v) omega0.
struct GravState {
    ScalarField f;
    ScalarField v;
    double t = 0.0;      ///< continuity parameter (= coupling alpha of this state)
    double r1_sup = 0.0;
    double r2_sup = 0.0;
    EstimateTrace monitors;
};

struct ContinuityOptions {
    double tol = 1e-9;
    int max_newton = 40;
    double step_init = 0.0125;
    double step_min = 1e-6;
    double step_grow = 2.0;   ///< applied after 3 consecutive accepted steps
    int max_steps = 10000;
};

struct ContinuityResult {
    std::vector<GravState> states;  ///< accepted states, t increasing from 0
    SolveStatus status = SolveStatus::NonConvergence;
    std::string detail;
    double last_t = 0.0;
};

/// Continuity method for the coupled system on the torus: anchor at t = 0
/// (decoupled: v = 0 and f from the vortex equation), then march t to
/// alpha_target with adaptive steps (halve on Newton failure, grow after 3
/// successes, floor step_min).  Each accepted state has both discrete
/// residuals below tol and 1 - Delta v > 0 everywhere.
ContinuityResult solve_continuity(const GridPtr& grid, const ScalarField& higgs, int n,
                                  double tau, double alpha_target,
                                  const ContinuityOptions& opts = {});

struct EbOptions {
    double tol = 1e-8;
    int max_newton = 80;
    /// Coupling-ramp homotopy stages from the vortex anchor to the full
    /// c = 0 problem.
    std::vector<double> ramp = {0.0, 0.25, 0.5, 0.75, 1.0};
};

struct EbResult {
    GravState state;            ///< valid when status == Converged
    SolveStatus status = SolveStatus::NonConvergence;
    std::string detail;
    double residual_sup = 0.0;
    double v_residual_sup = 0.0;     ///< reconstructed second-equation residual
    double osc_f_final = 0.0;        ///< oscillation of the last iterate (blow-up signature)
    cplx futaki_certificate{0.0, 0.0};  ///< nonzero when the divisor obstructs
    StabilityClass stability = StabilityClass::Stable;
};

/// Einstein-Bogomolnyi solve on the sphere (c = 0, alpha = chi/(2 tau N)):
/// the single equation
///   Delta f + e^{2u}(e^{2f}|phi|^2 - tau)/2 + N = 0,
///   u = 2 alpha tau f - alpha e^{2f}|phi|^2 + c',
/// with c' fixed so that int e^{2u} w0 = 2 pi.  The Kahler potential v is
/// reconstructed from Delta v = 1 - e^{2u}.  On failure for a non-stable
/// divisor the Futaki character of the limit configuration is attached.
EbResult solve_einstein_bogomolnyi_sphere(const Divisor& d, double tau, double tol,
                                          const GridPtr& grid, const EbOptions& opts = {});

/// Residuals of the two gravitating-vortex equations evaluated in the
/// moving metric omega = (1 - Delta v) omega0.  The second equation uses
/// the trace of the Ricci form (the Gauss curvature) as its curvature
/// term, which is the normalization that makes c = chi - 2 alpha tau N.
/// Throws if Kahler positivity fails.
std::pair<double, double> residuals_gravitating(const GravState& state,
                                                const ModelParams& params,
                                                const GridPtr& grid,
                                                const ScalarField& higgs);

/// Recomputes the boundedness monitors of a state.
EstimateTrace monitor_estimates(const GravState& state, const ModelParams& params);

// --- shared low-level pieces (also used by diagnostics and tests) ---

/// Discrete residual of the coupled continuity system at (f, v, t).
std::pair<ScalarField, ScalarField> continuity_residual(const ScalarField& f,
                                                        const ScalarField& v, double t,
                                                        const ScalarField& higgs, int n,
                                                        double tau, int chi);

/// Action of the analytic linearization of continuity_residual on (df, dv).
std::pair<ScalarField, ScalarField> continuity_jacobian_apply(
    const ScalarField& f, const ScalarField& v, double t, const ScalarField& higgs, int n,
    double tau, int chi, const ScalarField& df, const ScalarField& dv);

/// Kahler conformal factor 1 - Delta v of a state.
ScalarField kahler_factor(const GravState& state);

/// Gauss curvature of the moving metric (trace of its Ricci form).
ScalarField gauss_curvature_moving(const GravState& state);

/// Pointwise |phi|^2_h = e^{2f} |phi|^2_{h0}.
ScalarField higgs_norm_moving(const GravState& state, const ScalarField& higgs);

} // namespace gvx

#endif
