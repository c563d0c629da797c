#include "quapi/brute_force.hpp"

#include <vector>

#include <fmt/format.h>

#include "quapi/errors.hpp"
#include "quapi/path_indexer.hpp"

namespace quapi {

Matrix brute_force_rho(const sys::SystemSpec& spec, const eta::EtaTable& eta, double dt,
                       int horizon, int dkmax) {
    spec.validate();
    if (horizon < 0) throw DomainError("horizon must be non-negative");
    if (dkmax < 0) throw DomainError("dkmax must be non-negative");
    if (eta.dkmax < std::min(dkmax, horizon))
        throw DomainError("η table does not cover the requested memory length");

    const int m = spec.dimension();
    const int points = horizon + 1;
    std::uint64_t paths = 0;
    try {
        paths = checked_power(static_cast<std::uint64_t>(m), 2 * points);
    } catch (const CapacityError&) {
        paths = kBruteForcePathLimit + 1;
    }
    if (paths > kBruteForcePathLimit)
        throw SizeError(fmt::format("brute-force sum over M^(2(N+1)) = {}^{} paths exceeds the limit of {}",
                                    m, 2 * points, kBruteForcePathLimit));

    const sys::PropagatorPair k = sys::short_time_propagator(spec, dt);
    const auto& s = spec.coordinates;

    // Pair list with its coefficient, fixed for every path.
    struct Pair {
        int k, kp;
        Complex eta;
    };
    std::vector<Pair> pairs;
    for (int a = 0; a <= horizon; ++a)
        for (int b = std::max(0, a - dkmax); b <= a; ++b) pairs.push_back({a, b, eta.for_pair(a, b, horizon)});

    Matrix rho = Matrix::Zero(m, m);
    std::vector<int> plus(static_cast<std::size_t>(points), 0), minus(static_cast<std::size_t>(points), 0);
    for (std::uint64_t path = 0; path < paths; ++path) {
        // digits: (j₀⁺, j₀⁻, …, j_N⁺, j_N⁻), last varies fastest
        std::uint64_t rest = path;
        for (int p = points; p-- > 0;) {
            minus[static_cast<std::size_t>(p)] = static_cast<int>(rest % static_cast<std::uint64_t>(m));
            rest /= static_cast<std::uint64_t>(m);
            plus[static_cast<std::size_t>(p)] = static_cast<int>(rest % static_cast<std::uint64_t>(m));
            rest /= static_cast<std::uint64_t>(m);
        }
        Complex weight = spec.rho0(plus[0], minus[0]);
        for (int t = 0; t < horizon; ++t) {
            const auto u = static_cast<std::size_t>(t);
            weight *= k.forward(plus[u + 1], plus[u]) * k.backward(minus[u], minus[u + 1]);
        }
        if (weight == Complex{}) continue;
        Complex exponent{};
        for (const Pair& pr : pairs) {
            const auto a = static_cast<std::size_t>(pr.k), b = static_cast<std::size_t>(pr.kp);
            exponent += (s[plus[a]] - s[minus[a]]) *
                        (pr.eta * s[plus[b]] - std::conj(pr.eta) * s[minus[b]]);
        }
        rho(plus.back(), minus.back()) += weight * std::exp(-exponent);
    }
    return rho;
}

}  // namespace quapi
