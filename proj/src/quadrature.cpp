#include "quapi/quadrature.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "quapi/errors.hpp"

namespace quapi {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
        throw ValidationError("quadrature.abs_tol", "must be a finite positive number");
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
        throw ValidationError("quadrature.rel_tol", "must be a finite positive number");
    if (max_subdivisions < 1)
        throw ValidationError("quadrature.max_subdivisions", "must be a positive integer");
    if (!(frequency_upper_cutoff_multiplier > 1.0) || !std::isfinite(frequency_upper_cutoff_multiplier))
        throw ValidationError("quadrature.cutoff_multiplier", "must be a finite number > 1");
}

namespace {

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const noexcept { gsl_integration_workspace_free(w); }
};

void disable_gsl_abort() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

double trampoline(double x, void* params) {
    return (*static_cast<const RealIntegrand*>(params))(x);
}

}  // namespace

double integrate(const RealIntegrand& f, double a, double b, const QuadratureSpec& quad,
                 std::string_view context) {
    disable_gsl_abort();
    if (a == b) return 0.0;

    const auto limit = static_cast<std::size_t>(quad.max_subdivisions);
    std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(limit));
    if (!ws) throw std::bad_alloc();

    gsl_function fn;
    fn.function = &trampoline;
    fn.params = const_cast<RealIntegrand*>(&f);

    double result = 0.0;
    double abserr = 0.0;
    const int status = gsl_integration_qag(&fn, a, b, quad.abs_tol, quad.rel_tol, limit,
                                           GSL_INTEG_GAUSS21, ws.get(), &result, &abserr);
    if (status != GSL_SUCCESS || !std::isfinite(result)) {
        std::ostringstream msg;
        msg << "quadrature did not converge (" << context << ") over [" << a << ", " << b
            << "]: " << gsl_strerror(status) << ", error estimate " << abserr;
        throw ConvergenceError(abserr, msg.str());
    }
    return result;
}

Complex integrate_complex(const ComplexIntegrand& f, double a, double b,
                          const QuadratureSpec& quad, std::string_view context) {
    std::unordered_map<double, Complex> seen;
    auto sample = [&](double x) -> const Complex& {
        auto it = seen.find(x);
        if (it == seen.end()) it = seen.emplace(x, f(x)).first;
        return it->second;
    };
    const double re = integrate([&](double x) { return sample(x).real(); }, a, b, quad, context);
    const double im = integrate([&](double x) { return sample(x).imag(); }, a, b, quad, context);
    return {re, im};
}

}  // namespace quapi
