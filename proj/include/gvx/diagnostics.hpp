#ifndef GVX_DIAGNOSTICS_HPP
#define GVX_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gvx/gravitating.hpp"

namespace gvx {

/// One named verification with its tolerance; `lower_bound` checks pass
/// when value >= target - tol, otherwise |value - target| <= tol.
struct AuditCheck {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tol = 0.0;
    bool lower_bound = false;
    bool pass = false;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool all_pass() const;
    std::string to_text() const;  ///< one check per line: name value target tol PASS/FAIL
};

/// Variation pairing of the coupled equations at a state, evaluated in the
/// moving metric against a direction (metric potential velocity,
/// bundle-scale velocity).  The potential component must integrate to zero
/// in the moving metric (throws otherwise); vanishes at solutions.
double sigma_one_form(const GravState& state, const ModelParams& params,
                      const ScalarField& higgs, const ScalarField& dir_potential,
                      const ScalarField& dir_scale);

/// Projects the potential component onto mean zero in the moving metric.
ScalarField project_direction(const GravState& state, const ScalarField& dir_potential);

/// Flow pairing along the diagonal one-parameter subgroup for a two-point
/// monomial configuration l*[0] + (N-l)*[infinity]: the pullback ray is
/// evaluated through the moment-map pairing at the fixed Fubini-Study pair
/// (the flow acts on the section, which the normalized lift fixes), so the
/// sequence is constant equal to the maximal weight 4 pi alpha
/// (tau - 2N)(N - 2l).  Nondecreasing by construction; quadrature error is
/// the only deviation.
std::vector<double> weight_along_flow(const Divisor& d, double alpha, double tau,
                                      const std::vector<double>& flow_times,
                                      const GridPtr& grid);

/// Seeded smooth band-limited random field (deterministic in the seed).
ScalarField random_smooth_field(const GridPtr& grid, std::uint64_t seed, int modes = 6);

/// Full identity audit of a state: residuals, Kahler positivity, the
/// |phi|^2_h <= tau bound, the two integral identities, Gauss-Bonnet,
/// the degree identity in the moving metric, measured vs topological c,
/// the Kahler-Einstein-type reformulation cross-check, and a seeded sweep
/// of sigma_one_form directions.
AuditReport audit_state(const GravState& state, const ModelParams& params,
                        const GridPtr& grid, const ScalarField& higgs, double tol = 1e-8);

} // namespace gvx

#endif
