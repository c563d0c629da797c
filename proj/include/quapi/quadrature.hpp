// quadrature.hpp: adaptive Gauss–Kronrod integration of real and complex integrands

#pragma once

#include <functional>
#include <string_view>

#include "quapi/types.hpp"

namespace quapi {

struct QuadratureSpec {
    double abs_tol{1e-10};
    double rel_tol{1e-10};
    int max_subdivisions{1000};
    /// Frequency integrals are truncated at this multiple of the spectral cutoff.
    double frequency_upper_cutoff_multiplier{20.0};

    void validate() const;
    bool operator==(const QuadratureSpec&) const = default;
};

using RealIntegrand = std::function<double(double)>;
using ComplexIntegrand = std::function<Complex(double)>;

/// Globally adaptive 21-point Gauss–Kronrod over [a, b]. Throws ConvergenceError
/// (tagged with `context`) when the tolerances are not met within
/// `max_subdivisions` intervals.
double integrate(const RealIntegrand& f, double a, double b, const QuadratureSpec& quad,
                 std::string_view context);

/// Real and imaginary parts are integrated as two real problems; integrand values
/// are memoized by abscissa so nodes shared by both passes are evaluated once.
Complex integrate_complex(const ComplexIntegrand& f, double a, double b,
                          const QuadratureSpec& quad, std::string_view context);

}  // namespace quapi
