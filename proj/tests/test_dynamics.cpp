#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "oracles.hpp"
#include "quapi/brute_force.hpp"
#include "quapi/dynamics.hpp"
#include "quapi/errors.hpp"
#include "trajectory_checks.hpp"

using namespace quapi;

namespace {

const double kOmega = std::numbers::pi / 8;

const eta::EtaTable& qdot_eta(int dkmax) {
    static std::map<int, eta::EtaTable> cache;
    auto it = cache.find(dkmax);
    if (it == cache.end()) {
        const auto model = bath::SpectralDensityModel::super_ohmic_gaussian(std::numbers::pi * 0.027, 2.2);
        it = cache.emplace(dkmax, eta::build_eta_table(model, bath::BathParams{25.0}, 0.1, dkmax, {})).first;
    }
    return it->second;
}

RunConfig make_config(int steps, int dkmax, ReadoutMode mode = ReadoutMode::AllPoints, int threads = 1) {
    RunConfig c;
    c.dt = 0.1;
    c.steps = steps;
    c.dkmax = dkmax;
    c.mode = mode;
    c.threads = threads;
    return c;
}

Trajectory qdot_run(int steps, int dkmax, ReadoutMode mode = ReadoutMode::AllPoints, int threads = 1) {
    return run_dynamics(sys::SystemSpec::driven_two_level(kOmega), qdot_eta(dkmax),
                        make_config(steps, dkmax, mode, threads))
        .trajectory;
}

}  // namespace

TEST_CASE("readout modes") {
    CHECK(to_string(ReadoutMode::AllPoints) == "allPoints");
    CHECK(readout_mode_from_string("justFinalPoint") == ReadoutMode::JustFinalPoint);
    CHECK_THROWS_AS(readout_mode_from_string("everyPoint"), ValidationError);

    const auto all = qdot_run(100, 4);
    const auto last = qdot_run(100, 4, ReadoutMode::JustFinalPoint);
    REQUIRE(all.rhos.size() == 101);
    REQUIRE(last.rhos.size() == 2);
    CHECK(last.times.front() == 0.0);
    CHECK(last.times.back() == all.times.back());
    CHECK((last.rhos.back().array() == all.rhos.back().array()).all());
    CHECK((last.rhos.front().array() == all.rhos.front().array()).all());
}

TEST_CASE("zero bath follows the closed-system Rabi formula") {
    const auto spec = sys::SystemSpec::driven_two_level(kOmega);
    for (int dkmax : {0, 1, 3, 6}) {
        auto config = make_config(64, dkmax);
        config.dt = 0.25;
        const auto traj = run_dynamics(spec, eta::EtaTable::zeros(config.dt, dkmax), config).trajectory;
        REQUIRE(traj.rhos.size() == 65);
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.rhos.size(); ++k) {
            const double expected = std::pow(std::sin(kOmega * traj.times[k] / 2), 2);
            worst = std::max(worst, std::abs(traj.rhos[k](1, 1).real() - expected));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("trajectory matches brute force when memory covers the horizon") {
    const auto spec = sys::SystemSpec::driven_two_level(kOmega);
    const auto traj = qdot_run(5, 5);
    for (int k = 0; k <= 5; ++k)
        CHECK(oracle::max_abs_diff(traj.rhos[k], brute_force_rho(spec, qdot_eta(5), 0.1, k, 5)) < 1e-12);
}

TEST_CASE("damped Rabi oscillations") {
    const auto traj = qdot_run(989, 6);
    REQUIRE(traj.rhos.size() == 990);
    const auto p = checks::population(traj, 1);
    CHECK(checks::damped_oscillation(p));
    CHECK(checks::max_trace_defect(traj) < 1e-10);
    CHECK(checks::max_hermiticity_defect(traj) < 1e-10);
}

TEST_CASE("memory truncation converges") {
    std::map<int, Trajectory> runs;
    for (int dkmax = 2; dkmax <= 6; ++dkmax) runs[dkmax] = qdot_run(150, dkmax);
    std::vector<double> d;
    for (int dkmax = 2; dkmax <= 5; ++dkmax) d.push_back(checks::max_difference(runs[dkmax], runs[dkmax + 1]));
    int violations = 0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (d[i + 1] > d[i]) ++violations;
    CHECK(violations <= 1);
}

TEST_CASE("thread count does not change results") {
    const auto one = qdot_run(40, 8, ReadoutMode::AllPoints, 1);
    for (int threads : {2, 3, 8}) {
        CAPTURE(threads);
        CHECK(checks::bit_identical(one, qdot_run(40, 8, ReadoutMode::AllPoints, threads)));
    }
}

TEST_CASE("memory budget") {
    CHECK_NOTHROW(check_memory_budget(2, 2, 4096));
    try {
        check_memory_budget(2, 20, 1'000'000);
        FAIL("expected a capacity error");
    } catch (const CapacityError& e) {
        CHECK(e.required_bytes() == 281474976710656ull);
        CHECK(std::string(e.what()).find("281474976710656") != std::string::npos);
        CHECK(e.exit_code() == 3);
    }
    auto config = make_config(10, 9);
    config.memory_budget = 1'000'000;
    CHECK_THROWS_AS(run_dynamics(sys::SystemSpec::driven_two_level(kOmega), qdot_eta(2), config), CapacityError);
}

TEST_CASE("reported cost and timings") {
    const auto result = run_dynamics(sys::SystemSpec::driven_two_level(kOmega), qdot_eta(3), make_config(20, 3));
    CHECK(result.pmc_bytes == 64ull * 256);
    CHECK(result.times.setup_s >= 0.0);
    CHECK(result.times.propagation_s >= 0.0);
    CHECK(result.times.readout_s >= 0.0);
}

TEST_CASE("config validation") {
    auto c = make_config(10, 2);
    CHECK_NOTHROW(c.validate());
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = make_config(0, 2);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = make_config(10, -1);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    // memory longer than the horizon is allowed
    c = make_config(3, 7);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("thread resolution") {
    CHECK(resolve_threads(5) == 5);
    ::setenv("QUAPI_THREADS", "3", 1);
    CHECK(resolve_threads(0) == 3);
    ::setenv("QUAPI_THREADS", "many", 1);
    CHECK_THROWS_AS(resolve_threads(0), ValidationError);
    ::unsetenv("QUAPI_THREADS");
    CHECK(resolve_threads(0) >= 1);
}
