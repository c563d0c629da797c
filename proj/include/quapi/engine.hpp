// engine.hpp: iterative augmented-tensor propagation of the reduced density matrix
//
// The tensor at step n holds, for every assignment of the path segments
// x_{n−W+1} … x_n inside the memory window (x = j⁺·M + j⁻), the sum over all
// older path segments of
//
//     ρ(0) · Π propagator pairs · Π influence pair factors
//
// where every influence pair uses its non-terminal η class. Terminal classes
// are applied only when a density matrix is read out, so the propagating
// tensor never needs to be rewritten.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quapi/eta.hpp"
#include "quapi/kernels.hpp"
#include "quapi/system.hpp"
#include "quapi/types.hpp"

namespace quapi::engine {

enum class Phase { Growing, Sliding };

struct AugmentedTensor {
    std::vector<Complex> amplitudes;  // flat, indexed as PathIndexer(M, window)
    int current_step{0};
    int window{1};  // time points held, min(current_step, dkmax) + 1
    Phase phase{Phase::Growing};
};

/// exp(−(s[j_k⁺] − s[j_k⁻])·(η·s[j_k′⁺] − η*·s[j_k′⁻])).
Complex influence_pair_factor(int jk_plus, int jk_minus, int jkp_plus, int jkp_minus, Complex eta,
                              std::span<const double> coordinates);

/// 16·M^{2(dkmax+1)}: bytes of one full-window complex tensor.
std::uint64_t tensor_bytes(int dimension, int dkmax);

/// 64·M^{2(dkmax+1)}: the four full-window arrays the propagation keeps resident.
std::uint64_t primary_memory_cost(int dimension, int dkmax);

struct EngineOptions {
    int threads{1};
    const kernels::KernelSet* kernel{nullptr};  // nullptr selects kernels::best()
};

class TensorPropagator {
public:
    TensorPropagator(const sys::SystemSpec& spec, const eta::EtaTable& eta,
                     const sys::PropagatorPair& propagators, int dkmax, EngineOptions options = {});

    int dimension() const noexcept { return dimension_; }
    int dkmax() const noexcept { return dkmax_; }
    const kernels::KernelSet& kernel() const noexcept { return *kernel_; }
    void set_threads(int threads);

    /// Tensor at step 0: ρ(0) weighted by the initial self factor.
    AugmentedTensor seed() const;

    /// Tensor at step min(1, horizon).
    AugmentedTensor initialize(int horizon);

    /// Advances `tensor` by one time step in place.
    void advance(AugmentedTensor& tensor);

    AugmentedTensor propagate_step(const AugmentedTensor& tensor);

    /// ⟨s⁺|ρ(t_k)|s⁻⟩ treating the tensor's current step k as the final time.
    Matrix readout(const AugmentedTensor& tensor);

    /// Builds the sliding-phase tables now instead of at first use.
    void prepare_sliding_tables();

private:
    using PairMatrix = std::vector<Complex>;  // [x_new·D + x_old]

    struct PairFactor {
        int position;  // digit of the row prefix, 0 = oldest
        const PairMatrix* matrix;
    };

    PairMatrix pair_matrix(Complex eta) const;
    std::vector<Complex> self_vector(Complex eta) const;
    void build_table(int prefix_digits, const std::vector<Complex>& self,
                     std::span<const PairFactor> pairs, std::vector<Complex>& out) const;
    Matrix reduce(const std::vector<Complex>& amplitudes, const std::vector<Complex>& weights) const;
    void advance_markovian(AugmentedTensor& tensor);

    int dimension_;
    std::size_t fanout_;  // D = M²
    int dkmax_;
    int threads_;
    const kernels::KernelSet* kernel_;
    std::vector<double> coordinates_;
    Matrix rho0_;

    PairMatrix propagator_;
    std::vector<Complex> self_initial_;
    std::vector<Complex> self_interior_;
    std::vector<Complex> self_terminal_ratio_;
    std::vector<PairMatrix> offdiag_;            // lag − 1
    std::vector<PairMatrix> initial_edge_;       // lag − 1
    std::vector<PairMatrix> terminal_edge_ratio_;
    std::vector<PairMatrix> terminal_initial_ratio_;

    bool sliding_ready_{false};
    std::vector<Complex> step_table_;     // D^{dkmax+1}
    std::vector<Complex> readout_table_;  // D^{dkmax+1}
    std::vector<Complex> scratch_;        // next tensor
};

}  // namespace quapi::engine
