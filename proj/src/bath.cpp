#include "quapi/bath.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "quapi/errors.hpp"

namespace quapi::bath {

namespace {

// Below this |βω| the thermal factors are replaced by their Laurent series.
constexpr double kSmallArgument = 1e-8;

double frequency_limit(const SpectralDensityModel& model, const QuadratureSpec& quad) {
    return quad.frequency_upper_cutoff_multiplier * model.cutoff;
}

// J(ω)·coth(βω/2) with the ω → 0 singularity removed analytically.
double thermal_weight(const SpectralDensityModel& model, double beta, double omega) {
    const double x = beta * omega;
    if (std::abs(x) < kSmallArgument) {
        // coth(x/2) ≈ 2/x + x/6
        return spectral_density_over_omega(model, omega) * 2.0 / beta +
               eval_spectral_density(model, omega) * x / 6.0;
    }
    return eval_spectral_density(model, omega) / std::tanh(0.5 * x);
}

// J_odd(ω)/(1 − e^{−βω}), J_odd(ω) = sign(ω)·J(|ω|).
double bose_weight(const SpectralDensityModel& model, double beta, double omega) {
    const double x = beta * omega;
    if (std::abs(x) < kSmallArgument) {
        // 1/(1 − e^{−x}) ≈ 1/x + 1/2 + x/12
        const double j = eval_spectral_density(model, omega);
        return spectral_density_over_omega(model, omega) / beta +
               std::copysign(j, omega) * (0.5 + x / 12.0);
    }
    return std::copysign(eval_spectral_density(model, omega), omega) / -std::expm1(-x);
}

}  // namespace

std::string_view to_string(SpectralKind kind) {
    switch (kind) {
        case SpectralKind::SuperOhmicGaussianCutoff: return "super_ohmic_gaussian";
        case SpectralKind::OhmicExponentialCutoff: return "ohmic_exponential";
        case SpectralKind::Zero: return "zero";
    }
    return "zero";
}

SpectralKind spectral_kind_from_string(std::string_view name) {
    if (name == "super_ohmic_gaussian") return SpectralKind::SuperOhmicGaussianCutoff;
    if (name == "ohmic_exponential") return SpectralKind::OhmicExponentialCutoff;
    if (name == "zero") return SpectralKind::Zero;
    throw ValidationError("bath.spectral_density.kind",
                          "unknown kind '" + std::string(name) +
                              "' (expected super_ohmic_gaussian, ohmic_exponential or zero)");
}

SpectralDensityModel SpectralDensityModel::super_ohmic_gaussian(double amplitude, double cutoff) {
    return {SpectralKind::SuperOhmicGaussianCutoff, amplitude, cutoff};
}

SpectralDensityModel SpectralDensityModel::ohmic_exponential(double amplitude, double cutoff) {
    return {SpectralKind::OhmicExponentialCutoff, amplitude, cutoff};
}

SpectralDensityModel SpectralDensityModel::zero() { return {SpectralKind::Zero, 0.0, 1.0}; }

void SpectralDensityModel::validate() const {
    if (!(cutoff > 0.0) || !std::isfinite(cutoff))
        throw ValidationError("bath.spectral_density.cutoff", "must be a finite positive number");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw ValidationError("bath.spectral_density.amplitude",
                              "must be finite and non-negative (J(ω) ≥ 0)");
}

void BathParams::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw ValidationError("bath.temperature", "must be a finite positive number of kelvin");
    if (!(thermal_rate > 0.0) || !std::isfinite(thermal_rate))
        throw ValidationError("bath.thermal_rate", "must be a finite positive number");
}

double eval_spectral_density(const SpectralDensityModel& model, double omega) {
    if (!std::isfinite(omega)) throw DomainError("spectral density evaluated at non-finite ω");
    const double w = std::abs(omega);
    switch (model.kind) {
        case SpectralKind::SuperOhmicGaussianCutoff: {
            const double r = w / model.cutoff;
            return model.amplitude * w * w * w * std::exp(-r * r);
        }
        case SpectralKind::OhmicExponentialCutoff:
            return model.amplitude * w * std::exp(-w / model.cutoff);
        case SpectralKind::Zero: return 0.0;
    }
    return 0.0;
}

double spectral_density_over_omega(const SpectralDensityModel& model, double omega) {
    if (!std::isfinite(omega)) throw DomainError("spectral density evaluated at non-finite ω");
    const double w = std::abs(omega);
    switch (model.kind) {
        case SpectralKind::SuperOhmicGaussianCutoff: {
            const double r = w / model.cutoff;
            return model.amplitude * w * w * std::exp(-r * r);
        }
        case SpectralKind::OhmicExponentialCutoff:
            return model.amplitude * std::exp(-w / model.cutoff);
        case SpectralKind::Zero: return 0.0;
    }
    return 0.0;
}

Complex bath_response(const SpectralDensityModel& model, const BathParams& bath, double t,
                      const QuadratureSpec& quad) {
    if (!std::isfinite(t)) throw DomainError("bath response requested at non-finite t");
    if (model.is_zero()) return {0.0, 0.0};

    const double beta = bath.beta();
    const double upper = frequency_limit(model, quad);
    const double re = integrate(
        [&](double w) { return thermal_weight(model, beta, w) * std::cos(w * t); }, 0.0, upper,
        quad, "bath response, real part");
    double im = 0.0;
    if (t != 0.0) {
        im = -integrate([&](double w) { return eval_spectral_density(model, w) * std::sin(w * t); },
                        0.0, upper, quad, "bath response, imaginary part");
    }
    return Complex{re, im} / std::numbers::pi;
}

Complex bath_response_bose_form(const SpectralDensityModel& model, const BathParams& bath,
                                double t, const QuadratureSpec& quad) {
    if (!std::isfinite(t)) throw DomainError("bath response requested at non-finite t");
    if (model.is_zero()) return {0.0, 0.0};

    const double beta = bath.beta();
    const double upper = frequency_limit(model, quad);
    auto part = [&](double lo, double hi) {
        const double re = integrate(
            [&](double w) { return bose_weight(model, beta, w) * std::cos(w * t); }, lo, hi, quad,
            "bath response (Bose form), real part");
        const double im = integrate(
            [&](double w) { return -bose_weight(model, beta, w) * std::sin(w * t); }, lo, hi, quad,
            "bath response (Bose form), imaginary part");
        return Complex{re, im};
    };
    // Split at ω = 0 where the ohmic weight has a kink.
    return (part(-upper, 0.0) + part(0.0, upper)) / std::numbers::pi;
}

}  // namespace quapi::bath
