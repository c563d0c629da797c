// system.hpp: open-system description and exact short-time propagators

#pragma once

#include "quapi/types.hpp"

namespace quapi::sys {

/// Open quantum system in the eigenbasis of its bath-coupling coordinate.
struct SystemSpec {
    RealVector coordinates;  // s_a, eigenvalue of the coupling coordinate for basis state a
    Matrix hamiltonian;      // ps⁻¹, Hermitian
    Matrix rho0;             // unit trace, Hermitian

    int dimension() const noexcept { return static_cast<int>(coordinates.size()); }
    void validate() const;

    /// H = ½(0 Ω; Ω 0), s = {0, 1}, ρ(0) = |0⟩⟨0|.
    static SystemSpec driven_two_level(double rabi_frequency);

    bool operator==(const SystemSpec& other) const;
};

/// K = exp(−iHΔt) and its adjoint, both in the coordinate basis.
struct PropagatorPair {
    Matrix forward;
    Matrix backward;
};

PropagatorPair short_time_propagator(const SystemSpec& spec, double dt);

/// max |A − A†| over all elements.
double hermiticity_defect(const Matrix& m);

}  // namespace quapi::sys
