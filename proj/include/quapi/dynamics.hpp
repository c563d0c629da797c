// dynamics.hpp: run configuration and trajectory orchestration

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quapi/engine.hpp"
#include "quapi/eta.hpp"
#include "quapi/system.hpp"
#include "quapi/types.hpp"

namespace quapi {

enum class ReadoutMode { AllPoints, JustFinalPoint };

std::string_view to_string(ReadoutMode mode);
ReadoutMode readout_mode_from_string(std::string_view name);

inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{1} << 31;  // 2 GiB

struct RunConfig {
    double dt{0.1};
    int steps{1};  // N; final time N·Δt
    int dkmax{1};
    ReadoutMode mode{ReadoutMode::AllPoints};
    int threads{0};  // 0 = auto
    std::string output_path{"trajectory.csv"};
    std::optional<std::string> eta_dump_path;
    std::uint64_t memory_budget{kDefaultMemoryBudget};
    std::string kernel{"auto"};

    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// Threads to use: explicit count, else QUAPI_THREADS, else hardware concurrency.
int resolve_threads(int requested);

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> rhos;
};

struct PhaseTimes {
    double setup_s{0.0};        // propagator and factor tables
    double propagation_s{0.0};  // tensor steps
    double readout_s{0.0};      // density-matrix reductions
};

struct DynamicsResult {
    Trajectory trajectory;
    PhaseTimes times;
    std::uint64_t pmc_bytes{0};
};

/// Throws CapacityError when the primary memory cost exceeds `budget`.
void check_memory_budget(int dimension, int dkmax, std::uint64_t budget);

/// Propagates to step N, reading out at every step (AllPoints) or only at
/// t = 0 and t = N·Δt (JustFinalPoint).
DynamicsResult run_dynamics(const sys::SystemSpec& spec, const eta::EtaTable& eta,
                            const RunConfig& config);

}  // namespace quapi
