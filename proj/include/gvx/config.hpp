#ifndef GVX_CONFIG_HPP
#define GVX_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gvx/higgs.hpp"

namespace gvx {

/// Flat key = value run configuration.  The volume convention (2*pi) is
/// fixed and not configurable.  parse_config(serialize(c)) == c.
struct RunConfig {
    std::string command = "solve";           // classify | solve | futaki | sweep | audit
    std::string surface = "torus";           // torus | sphere
    int n1 = 64;
    int n2 = 64;
    double lattice_re = 0.0;
    double lattice_im = 1.0;
    std::string divisor = "1*[0.5+0.5i]";
    double tau = 6.0;
    double alpha = 0.05;                     // coupling target (continuity) / futaki alpha
    int futaki_n = 1;
    int futaki_l = 0;
    std::string solver = "auto";             // vortex | continuity | eb | auto
    double tol = 1e-8;
    int max_iter = 100;
    double step_init = 0.0125;
    double step_min = 1e-6;
    std::string out = "out";
    std::uint64_t seed = 1;
    bool verbose = false;
    std::string sweep_param;                 // name of the swept key (e.g. alpha)
    std::string sweep_values;                // comma-separated numbers

    bool operator==(const RunConfig&) const = default;
};

/// Serializes every field, one "key = value" line each, in fixed order.
std::string serialize_config(const RunConfig& c);

/// Parses the key = value format ('#' starts a comment).  Unknown keys are
/// an error.  Values round-trip exactly.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

/// Divisor text format: terms "m*[point]" joined with '+', where point is
/// a complex literal ("0", "1.5", "2i", "0.5+0.3i", "-1-2i") or "inf".
Divisor parse_divisor(const std::string& text);
std::string serialize_divisor(const Divisor& d);

/// Validates every numeric field against the module preconditions; returns
/// a list of human-readable violations (empty when valid).
std::vector<std::string> validate_config(const RunConfig& c);

} // namespace gvx

#endif
