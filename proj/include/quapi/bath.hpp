// bath.hpp: spectral densities and the bath response function α(t)
//
// Units: ħ = 1, time in ps, frequency in ps⁻¹, temperature in K.

#pragma once

#include <string_view>

#include "quapi/quadrature.hpp"
#include "quapi/types.hpp"

namespace quapi::bath {

/// CODATA 2018 exact values (SI).
inline constexpr double kBoltzmannSI = 1.380649e-23;   // J K⁻¹
inline constexpr double kHbarSI = 1.054571817e-34;     // J s
/// k_B/ħ in ps⁻¹ K⁻¹: converts a temperature into an angular frequency.
inline constexpr double kThermalRate = kBoltzmannSI / kHbarSI * 1e-12;

enum class SpectralKind { SuperOhmicGaussianCutoff, OhmicExponentialCutoff, Zero };

std::string_view to_string(SpectralKind kind);
SpectralKind spectral_kind_from_string(std::string_view name);

/// J(ω) family. SuperOhmicGaussianCutoff: A·ω³·exp(−(ω/ω_c)²), A in ps².
/// OhmicExponentialCutoff: A·ω·exp(−ω/ω_c), A dimensionless.
/// Evaluated at |ω| (even extension).
struct SpectralDensityModel {
    SpectralKind kind{SpectralKind::Zero};
    double amplitude{0.0};
    double cutoff{1.0};

    static SpectralDensityModel super_ohmic_gaussian(double amplitude, double cutoff);
    static SpectralDensityModel ohmic_exponential(double amplitude, double cutoff);
    static SpectralDensityModel zero();

    bool is_zero() const noexcept { return kind == SpectralKind::Zero || amplitude == 0.0; }
    void validate() const;
    bool operator==(const SpectralDensityModel&) const = default;
};

struct BathParams {
    double temperature{25.0};
    double thermal_rate{kThermalRate};

    /// β in ps (ħ = 1), so that β·ω is dimensionless.
    double beta() const noexcept { return 1.0 / (temperature * thermal_rate); }
    void validate() const;
    bool operator==(const BathParams&) const = default;
};

double eval_spectral_density(const SpectralDensityModel& model, double omega);

/// J(ω)/ω at |ω|, finite at ω = 0.
double spectral_density_over_omega(const SpectralDensityModel& model, double omega);

/// α(t) = (1/π) ∫₀^Ω J(ω) [coth(βω/2) cos ωt − i sin ωt] dω with Ω the configured
/// multiple of the cutoff.
Complex bath_response(const SpectralDensityModel& model, const BathParams& bath, double t,
                      const QuadratureSpec& quad);

/// Two-sided Bose–Einstein form (1/π) ∫ J_odd(ω) e^{−iωt} / (1 − e^{−βω}) dω.
/// Cross-check for bath_response only.
Complex bath_response_bose_form(const SpectralDensityModel& model, const BathParams& bath,
                                double t, const QuadratureSpec& quad);

}  // namespace quapi::bath
