// eta.hpp: discretized influence-functional coefficients
//
// Every coefficient is a double time integral of α(t′ − t″) over a window of
// the time grid. Interior points own the window [kΔt, (k+1)Δt]; the first and
// last points of a trajectory own half windows of width Δt/2.

#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "quapi/bath.hpp"
#include "quapi/quadrature.hpp"
#include "quapi/types.hpp"

namespace quapi::eta {

using ResponseFunction = std::function<Complex(double)>;

enum class EtaClass {
    InteriorOffdiag,  // η_kk′, 0 < k′ < k < N
    InteriorSelf,     // η_kk,  0 < k < N
    InitialSelf,      // η_00
    TerminalSelf,     // η_NN
    TerminalInitial,  // η_N0
    InitialEdge,      // η_k0,  0 < k < N
    TerminalEdge,     // η_Nk,  0 < k < N
};

std::string_view to_string(EtaClass cls);

/// Class of the pair (k, k′), k ≥ k′, in a trajectory ending at index N.
EtaClass classify_pair(int k, int k_prime, int horizon);

/// How α is sampled at quadrature nodes while building a table.
enum class AlphaSampling {
    Direct,     // every node evaluates the frequency integral (memoized)
    Tabulated,  // cubic spline over a uniform grid with step ≤ Δt/50
};

std::string_view to_string(AlphaSampling sampling);
AlphaSampling alpha_sampling_from_string(std::string_view name);

/// All η coefficients of a run. Lag-indexed classes are stored for lags
/// 1..dkmax at position lag − 1; use the accessors.
struct EtaTable {
    double dt{0.0};
    int dkmax{0};
    std::vector<Complex> interior_offdiag_by_lag;
    Complex interior_self{};
    Complex initial_self{};
    Complex terminal_self{};
    std::vector<Complex> terminal_initial_by_lag;
    std::vector<Complex> initial_edge_by_lag;
    std::vector<Complex> terminal_edge_by_lag;

    Complex interior_offdiag(int lag) const;
    Complex terminal_initial(int lag) const;
    Complex initial_edge(int lag) const;
    Complex terminal_edge(int lag) const;

    /// Coefficient for the pair (k, k′) in a trajectory ending at `horizon`.
    Complex for_pair(int k, int k_prime, int horizon) const;

    static EtaTable zeros(double dt, int dkmax);
};

/// ∫_{a1}^{b1} ∫_{a2}^{b2} α(t′ − t″) dt″ dt′ by iterated adaptive quadrature.
Complex rectangle_integral(const ResponseFunction& alpha, double outer_lo, double outer_hi,
                           double inner_lo, double inner_hi, const QuadratureSpec& quad);

/// ∫_{lo}^{hi} ∫_{lo}^{t′} α(t′ − t″) dt″ dt′.
Complex triangle_integral(const ResponseFunction& alpha, double lo, double hi,
                          const QuadratureSpec& quad);

/// η_kk′ for an arbitrary interior pair k ≠ k′, integrated on its own window.
Complex interior_pair(const ResponseFunction& alpha, int k, int k_prime, double dt,
                      const QuadratureSpec& quad);

/// Table built from an arbitrary response function (test hook for analytic α).
EtaTable build_eta_table(const ResponseFunction& alpha, double dt, int dkmax,
                         const QuadratureSpec& quad);

/// Table for a physical bath. A zero spectral density short-circuits to zeros.
EtaTable build_eta_table(const bath::SpectralDensityModel& model, const bath::BathParams& bath,
                         double dt, int dkmax, const QuadratureSpec& quad,
                         AlphaSampling sampling = AlphaSampling::Direct);

/// Rows `class,lag,re,im` with a header line; self classes use lag 0.
void write_eta_csv(const EtaTable& table, const std::string& path);

}  // namespace quapi::eta
