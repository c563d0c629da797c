#include "quapi/dynamics.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "quapi/errors.hpp"

namespace quapi {

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_{std::chrono::steady_clock::now()};
};

}  // namespace

std::string_view to_string(ReadoutMode mode) {
    return mode == ReadoutMode::AllPoints ? "allPoints" : "justFinalPoint";
}

ReadoutMode readout_mode_from_string(std::string_view name) {
    if (name == "allPoints") return ReadoutMode::AllPoints;
    if (name == "justFinalPoint") return ReadoutMode::JustFinalPoint;
    throw ValidationError("run.mode", "expected allPoints or justFinalPoint, got '" +
                                          std::string(name) + "'");
}

void RunConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("run.dt", "must be a finite positive number of ps");
    if (steps < 1) throw ValidationError("run.steps", "must be a positive integer");
    if (dkmax < 0) throw ValidationError("run.dkmax", "must be a non-negative integer");
    if (threads < 0) throw ValidationError("run.threads", "must be positive or \"auto\"");
    if (output_path.empty()) throw ValidationError("run.output", "must not be empty");
    if (memory_budget == 0) throw ValidationError("run.memory_budget", "must be positive");
    if (kernel != "auto" && kernel != "scalar" && kernel != "avx2")
        throw ValidationError("run.kernel", "expected auto, scalar or avx2");
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QUAPI_THREADS"); env && *env) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end && *end == '\0' && value > 0) return static_cast<int>(value);
        if (std::string_view(env) != "auto")
            throw ValidationError("QUAPI_THREADS", "must be a positive integer or auto");
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void check_memory_budget(int dimension, int dkmax, std::uint64_t budget) {
    const std::uint64_t pmc = engine::primary_memory_cost(dimension, dkmax);
    if (pmc > budget)
        throw CapacityError(pmc, fmt::format("required primary memory cost {} bytes (64·{}^{}) exceeds "
                                             "the memory budget of {} bytes",
                                             pmc, dimension, 2 * (dkmax + 1), budget));
}

DynamicsResult run_dynamics(const sys::SystemSpec& spec, const eta::EtaTable& eta,
                            const RunConfig& config) {
    spec.validate();
    config.validate();
    const int m = spec.dimension();
    check_memory_budget(m, config.dkmax, config.memory_budget);

    DynamicsResult result;
    result.pmc_bytes = engine::primary_memory_cost(m, config.dkmax);
    Stopwatch clock;

    const sys::PropagatorPair propagators = sys::short_time_propagator(spec, config.dt);
    engine::TensorPropagator engine(spec, eta, propagators, config.dkmax,
                                    {resolve_threads(config.threads), &kernels::by_name(config.kernel)});
    if (config.steps > config.dkmax) engine.prepare_sliding_tables();
    result.times.setup_s = clock.lap();

    auto record = [&](const engine::AugmentedTensor& tensor) {
        result.times.propagation_s += clock.lap();
        result.trajectory.times.push_back(tensor.current_step * config.dt);
        result.trajectory.rhos.push_back(engine.readout(tensor));
        result.times.readout_s += clock.lap();
    };

    engine::AugmentedTensor tensor = engine.seed();
    record(tensor);
    for (int k = 1; k <= config.steps; ++k) {
        engine.advance(tensor);
        if (config.mode == ReadoutMode::AllPoints || k == config.steps) record(tensor);
    }
    return result;
}

}  // namespace quapi
