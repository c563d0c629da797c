// config.hpp: JSON run configuration
//
// {
//   "system":     {"coordinates": [...], "hamiltonian": [[[re, im], ...], ...], "rho0": ...},
//   "bath":       {"spectral_density": {"kind": ..., "amplitude": ..., "cutoff": ...},
//                  "temperature": ...},
//   "quadrature": {"abs_tol": ..., "rel_tol": ..., "max_subdivisions": ...,
//                  "cutoff_multiplier": ..., "alpha_sampling": "direct" | "tabulated"},
//   "run":        {"dt": ..., "steps": ..., "dkmax": ..., "mode": ..., "threads": n | "auto",
//                  "output": ..., "dump_eta": path | null, "memory_budget": bytes,
//                  "kernel": "auto" | "scalar" | "avx2"}
// }
//
// "quadrature" is optional, as are the run keys after "mode".

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "quapi/bath.hpp"
#include "quapi/dynamics.hpp"
#include "quapi/eta.hpp"
#include "quapi/quadrature.hpp"
#include "quapi/system.hpp"

namespace quapi::config {

struct Configuration {
    sys::SystemSpec system;
    bath::SpectralDensityModel spectral_density;
    bath::BathParams bath;
    QuadratureSpec quadrature;
    eta::AlphaSampling alpha_sampling{eta::AlphaSampling::Direct};
    RunConfig run;

    void validate() const;
    bool operator==(const Configuration&) const = default;
};

/// Parses and validates. Throws ConfigError for malformed input (with line and
/// column for syntax errors, the dotted key path otherwise) and ValidationError
/// for violated invariants.
Configuration parse_config(std::string_view text, std::string_view source = "<string>");
Configuration load_config(const std::string& path);

nlohmann::json to_json(const Configuration& config);
void save_config(const Configuration& config, const std::string& path);

/// Laser-driven quantum dot at 25 K: s = {0, 1}, Ω = π/8 ps⁻¹,
/// J(ω) = π·0.027 ps²·ω³·exp(−(ω/2.2 ps⁻¹)²), ρ(0) = |0⟩⟨0|.
Configuration qdot25k();

}  // namespace quapi::config
