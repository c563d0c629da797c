// brute_force.hpp: explicit sum over every discrete path
//
// Reference semantics for the tensor propagation: enumerates all M^{2(N+1)}
// forward/backward paths and weights each by its propagator chain, initial
// density-matrix element and truncated influence functional.

#pragma once

#include <cstdint>

#include "quapi/eta.hpp"
#include "quapi/system.hpp"
#include "quapi/types.hpp"

namespace quapi {

inline constexpr std::uint64_t kBruteForcePathLimit = 10'000'000;

/// ρ(t_N). Pairs (k, k′) with k − k′ ≤ dkmax contribute, each with the η
/// class from eta::classify_pair. Throws SizeError beyond kBruteForcePathLimit paths.
Matrix brute_force_rho(const sys::SystemSpec& spec, const eta::EtaTable& eta, double dt,
                       int horizon, int dkmax);

}  // namespace quapi
