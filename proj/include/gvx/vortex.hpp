#ifndef GVX_VORTEX_HPP
#define GVX_VORTEX_HPP

#include <functional>
#include <optional>
#include <string>

#include "gvx/surface.hpp"

namespace gvx {

enum class SolveStatus { Converged, NonConvergence, StepUnderflow };

const char* to_string(SolveStatus s);

/// Result of the fixed-background vortex solve.  On success the conformal
/// exponent f (for the bundle metric h = h0 e^{2f}) satisfies
///   Delta f + (e^{2f} |phi|^2 - tau)/2 + N = 0
/// below the requested sup-norm tolerance, and e^{2f}|phi|^2 <= tau up to
/// roundoff.
struct VortexSolution {
    ScalarField f;
    double residual_sup = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::NonConvergence;
    std::string detail;  ///< failure signature (runaway, budget, ...)
};

struct VortexOptions {
    double tol = 1e-10;
    int max_iter = 60;
    /// Newton runaway cutoffs: the discrete iteration at an inadmissible tau
    /// drives f down uniformly while the Higgs norm collapses to zero.
    double f_floor = -50.0;
    double higgs_collapse_frac = 1e-4;  ///< max |phi|^2_h below frac*tau => collapse
    std::optional<double> initial_constant;  ///< override the default initial guess
    /// Per-iteration hook (iteration, sup residual) used by the CLI verbose log.
    std::function<void(int, double)> on_iteration;
};

/// Damped Newton solve of the vortex equation on a fixed background.
/// n is the divisor degree of the section whose squared norm is `higgs`.
VortexSolution solve_vortex(const GridPtr& grid, const ScalarField& higgs, int n,
                            double tau, const VortexOptions& opts = {});

} // namespace gvx

#endif
