#ifndef GVX_ERRORS_HPP
#define GVX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gvx {

/// Base class for all precondition / contract violations thrown by this
/// library.  Solver non-convergence is *not* an exception: it is reported
/// through status fields on the result structs.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Lattice modulus with non-positive imaginary part.
struct DegenerateLattice : Error {
    explicit DegenerateLattice(const std::string& what) : Error(what) {}
};

/// Grid resolution below the supported minimum (or odd azimuthal count).
struct ResolutionTooSmall : Error {
    explicit ResolutionTooSmall(const std::string& what) : Error(what) {}
};

/// A field was combined with an operator or field living on another grid,
/// or an operation received a grid of the wrong kind.
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& what) : Error(what) {}
};

/// Malformed divisor (repeated points, bad multiplicity, point outside the
/// fundamental domain, ...).
struct InvalidDivisor : Error {
    explicit InvalidDivisor(const std::string& what) : Error(what) {}
};

/// Generic argument precondition violation.
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

} // namespace gvx

#endif
