#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "quapi/brute_force.hpp"
#include "quapi/engine.hpp"
#include "quapi/errors.hpp"
#include "quapi/eta.hpp"
#include "quapi/system.hpp"

using namespace quapi;
using engine::TensorPropagator;

namespace {

const double kDt = 0.1;

const eta::EtaTable& qdot_eta(int dkmax) {
    static std::map<int, eta::EtaTable> cache;
    auto it = cache.find(dkmax);
    if (it == cache.end()) {
        const auto model = bath::SpectralDensityModel::super_ohmic_gaussian(std::numbers::pi * 0.027, 2.2);
        it = cache.emplace(dkmax, eta::build_eta_table(model, bath::BathParams{25.0}, kDt, dkmax, {})).first;
    }
    return it->second;
}

eta::EtaTable constant_eta(Complex value, double dt, int dkmax) {
    return eta::build_eta_table([value](double) { return value; }, dt, dkmax, {});
}

sys::SystemSpec qdot_system() { return sys::SystemSpec::driven_two_level(std::numbers::pi / 8); }

sys::SystemSpec random_system(int m, std::mt19937_64& rng) {
    sys::SystemSpec spec;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    spec.coordinates.resize(m);
    for (int a = 0; a < m; ++a) spec.coordinates[a] = u(rng);
    spec.hamiltonian = oracle::random_hermitian(m, rng);
    spec.rho0 = oracle::random_density_matrix(m, rng);
    return spec;
}

// final ρ after `horizon` steps through the public step/readout API
Matrix engine_rho(const sys::SystemSpec& spec, const eta::EtaTable& eta, double dt, int horizon, int dkmax,
                  engine::EngineOptions options = {}) {
    TensorPropagator prop(spec, eta, sys::short_time_propagator(spec, dt), dkmax, options);
    auto tensor = prop.initialize(horizon);
    while (tensor.current_step < horizon) tensor = prop.propagate_step(tensor);
    return prop.readout(tensor);
}

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

TEST_CASE("influence pair factor") {
    const double s[] = {0.0, 1.0};
    CHECK(engine::influence_pair_factor(1, 1, 0, 1, {0.4, 0.2}, s) == Complex{1.0, 0.0});
    CHECK(engine::influence_pair_factor(1, 0, 1, 0, {}, s) == Complex{1.0, 0.0});
    const Complex got = engine::influence_pair_factor(1, 0, 1, 0, {0.3, -0.1}, s);
    CHECK(std::abs(got - std::exp(Complex{-0.3, 0.1})) < 1e-15);
    // conj(η) acts on the backward coordinate
    const Complex back = engine::influence_pair_factor(0, 1, 0, 1, {0.3, -0.1}, s);
    CHECK(std::abs(back - std::exp(Complex{-0.3, -0.1})) < 1e-15);
}

TEST_CASE("primary memory cost") {
    CHECK(engine::tensor_bytes(2, 2) == 64 * 16);
    CHECK(engine::primary_memory_cost(2, 2) == 4096);
    CHECK(engine::primary_memory_cost(2, 11) == 1073741824ull);
    CHECK(engine::primary_memory_cost(2, 12) == 4294967296ull);
    CHECK(engine::primary_memory_cost(3, 1) == 64ull * 81);
    CHECK_THROWS_AS(engine::primary_memory_cost(2, 40), CapacityError);
}

TEST_CASE("amplitude count follows the window") {
    const auto spec = qdot_system();
    const int dkmax = 3;
    TensorPropagator prop(spec, qdot_eta(dkmax), sys::short_time_propagator(spec, kDt), dkmax);
    auto tensor = prop.seed();
    for (int k = 0; k <= 7; ++k) {
        CAPTURE(k);
        CHECK(tensor.current_step == k);
        CHECK(tensor.amplitudes.size() == ipow(4, std::min(k, dkmax) + 1));
        CHECK(tensor.phase == (k < dkmax ? engine::Phase::Growing : engine::Phase::Sliding));
        for (const auto& z : tensor.amplitudes) CHECK(std::isfinite(std::abs(z)));
        prop.advance(tensor);
    }
    CHECK(prop.initialize(5).current_step == 1);
    CHECK(prop.initialize(0).current_step == 0);
}

TEST_CASE("readout at k = 0 returns the initial state") {
    const auto spec = qdot_system();
    TensorPropagator prop(spec, qdot_eta(2), sys::short_time_propagator(spec, kDt), 2);
    CHECK(oracle::max_abs_diff(prop.readout(prop.seed()), spec.rho0) == 0.0);
    CHECK(oracle::max_abs_diff(brute_force_rho(spec, qdot_eta(2), kDt, 0, 2), spec.rho0) == 0.0);
}

TEST_CASE("zero bath gives unitary evolution") {
    std::mt19937_64 rng(11);
    const auto spec = random_system(3, rng);
    const double dt = 0.3;
    const auto props = sys::short_time_propagator(spec, dt);
    for (int dkmax : {0, 1, 2}) {
        const auto zero = eta::EtaTable::zeros(dt, dkmax);
        TensorPropagator prop(spec, zero, props, dkmax);
        auto tensor = prop.seed();
        Matrix rho = spec.rho0;
        for (int k = 1; k <= 9; ++k) {
            tensor = prop.propagate_step(tensor);
            rho = props.forward * rho * props.backward;
            CHECK(oracle::max_abs_diff(prop.readout(tensor), rho) < 1e-12);
        }
    }
}

TEST_CASE("Rabi inversion at t = pi / Omega") {
    const auto spec = qdot_system();
    const auto zero = eta::EtaTable::zeros(1.0, 3);
    const Matrix rho = engine_rho(spec, zero, 1.0, 8, 3);
    CHECK(std::abs(rho(1, 1) - 1.0) < 1e-12);
    CHECK(std::abs(brute_force_rho(spec, zero, 1.0, 8, 3)(1, 1) - 1.0) < 1e-12);
}

TEST_CASE("brute-force golden value") {
    const Matrix rho = brute_force_rho(qdot_system(), qdot_eta(5), kDt, 5, 5);
    Matrix golden(2, 2);
    golden << Complex{0.99054944839893677, 0.0}, Complex{0.00035718545550954576, 0.09434773208955867},
        Complex{0.00035718545550954527, -0.094347732089558642}, Complex{0.0094505516010618337, 0.0};
    CHECK(oracle::max_abs_diff(rho, golden) < 1e-12);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
}

TEST_CASE("readout matches brute force at every k") {
    const auto spec = qdot_system();
    const int dkmax = 5;
    TensorPropagator prop(spec, qdot_eta(dkmax), sys::short_time_propagator(spec, kDt), dkmax);
    auto tensor = prop.seed();
    for (int k = 0; k <= 5; ++k) {
        CAPTURE(k);
        const Matrix expected = brute_force_rho(spec, qdot_eta(dkmax), kDt, k, dkmax);
        const auto before = tensor.amplitudes;
        CHECK(oracle::max_abs_diff(prop.readout(tensor), expected) < 1e-12);
        CHECK(tensor.amplitudes == before);
        if (k < 5) prop.advance(tensor);
    }
}

TEST_CASE("truncated memory matches truncated brute force") {
    const auto spec = qdot_system();
    const Matrix expected = brute_force_rho(spec, qdot_eta(3), kDt, 6, 3);
    CHECK(oracle::max_abs_diff(engine_rho(spec, qdot_eta(3), kDt, 6, 3), expected) < 1e-12);
}

TEST_CASE("memoryless limit") {
    std::mt19937_64 rng(5);
    const auto spec = random_system(2, rng);
    const auto table = constant_eta({0.3, -0.2}, 0.2, 0);
    for (int n : {1, 2, 5}) {
        const Matrix expected = brute_force_rho(spec, table, 0.2, n, 0);
        CHECK(oracle::max_abs_diff(engine_rho(spec, table, 0.2, n, 0), expected) < 1e-12);
    }
}

TEST_CASE("oracle equivalence over random systems") {
    std::mt19937_64 rng(31337);
    for (int m : {2, 3}) {
        // M = 3 brute force beyond N = 5 costs seconds per call; one N = 6 case below
        const int max_n = m == 2 ? 6 : 5;
        for (int n = 1; n <= max_n; ++n) {
            for (int dkmax = 1; dkmax <= n; ++dkmax) {
                const auto spec = random_system(m, rng);
                const bool use_qdot = (n + dkmax) % 2 == 0;
                const auto table = use_qdot ? qdot_eta(dkmax) : constant_eta({0.6, -0.25}, kDt, dkmax);
                CAPTURE(m);
                CAPTURE(n);
                CAPTURE(dkmax);
                CAPTURE(use_qdot);
                const Matrix expected = brute_force_rho(spec, table, kDt, n, dkmax);
                CHECK(oracle::max_abs_diff(engine_rho(spec, table, kDt, n, dkmax), expected) < 1e-12);
            }
        }
    }
    const auto spec = random_system(3, rng);
    const Matrix expected = brute_force_rho(spec, qdot_eta(3), kDt, 6, 3);
    CHECK(oracle::max_abs_diff(engine_rho(spec, qdot_eta(3), kDt, 6, 3), expected) < 1e-12);
}

TEST_CASE("kernel variants give identical trajectories") {
    const auto spec = qdot_system();
    const auto& table = qdot_eta(4);
    const Matrix ref = engine_rho(spec, table, kDt, 20, 4, {1, &kernels::scalar()});
    for (const auto* k : kernels::available()) {
        CAPTURE(k->name);
        const Matrix got = engine_rho(spec, table, kDt, 20, 4, {1, k});
        CHECK((got.array() == ref.array()).all());
    }
}

TEST_CASE("brute force size guard") {
    const auto spec = qdot_system();
    CHECK_THROWS_AS(brute_force_rho(spec, qdot_eta(2), kDt, 12, 2), SizeError);
}
