// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "quapi/bench.hpp"
#include "quapi/brute_force.hpp"
#include "quapi/config.hpp"
#include "quapi/dynamics.hpp"
#include "quapi/errors.hpp"
#include "quapi/eta.hpp"
#include "quapi/output.hpp"
#include "trajectory_checks.hpp"

using namespace quapi;

namespace {

const double kOmega = std::numbers::pi / 8;
const double kAmplitude = std::numbers::pi * 0.027;
const double kCutoff = 2.2;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bath::SpectralDensityModel qdot_model() { return bath::SpectralDensityModel::super_ohmic_gaussian(kAmplitude, kCutoff); }

eta::EtaTable qdot_eta(double dt, int dkmax) {
    return eta::build_eta_table(qdot_model(), bath::BathParams{25.0}, dt, dkmax, QuadratureSpec{});
}

RunConfig run_config(double dt, int steps, int dkmax, ReadoutMode mode, int threads) {
    RunConfig c;
    c.dt = dt;
    c.steps = steps;
    c.dkmax = dkmax;
    c.mode = mode;
    c.threads = threads;
    return c;
}

Outcome oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = sys::SystemSpec::driven_two_level(kOmega);
    double worst = 0.0;
    int cases = 0;
    for (int dkmax = 1; dkmax <= 6; ++dkmax) {
        const auto table = qdot_eta(0.1, dkmax);
        for (int n = 1; n <= 6; ++n) {
            const auto traj = run_dynamics(spec, table, run_config(0.1, n, dkmax, ReadoutMode::JustFinalPoint, 1)).trajectory;
            const Matrix expected = brute_force_rho(spec, table, 0.1, n, dkmax);
            worst = std::max(worst, oracle::max_abs_diff(traj.rhos.back(), expected));
            ++cases;
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-12 && elapsed < 10.0,
            fmt::format("{} cases, max |engine - brute force| = {:.3e} (limit 1e-12), {:.2f} s (limit 10 s)", cases,
                        worst, elapsed)};
}

Outcome memory_law() {
    const char* expected[] = {"4.096 KB", "16.38 KB", "65.54 KB", "262.1 KB", "1.049 MB", "4.194 MB",
                              "16.78 MB", "67.11 MB", "268.4 MB", "1.074 GB", "4.295 GB"};
    bool ok = true;
    std::string shown;
    for (int dkmax = 2; dkmax <= 12; ++dkmax) {
        std::uint64_t formula = 64;
        for (int i = 0; i < 2 * (dkmax + 1); ++i) formula *= 2;
        const std::uint64_t pmc = engine::primary_memory_cost(2, dkmax);
        const std::string text = format_bytes(pmc);
        ok = ok && pmc == formula && text == expected[dkmax - 2];
        shown += (shown.empty() ? "" : ", ") + text;
    }
    // the figure a run reports, and the one a refused run carries
    const auto spec = sys::SystemSpec::driven_two_level(kOmega);
    for (int dkmax = 2; dkmax <= 5; ++dkmax) {
        const auto result = run_dynamics(spec, eta::EtaTable::zeros(0.1, dkmax),
                                         run_config(0.1, 8, dkmax, ReadoutMode::JustFinalPoint, 1));
        ok = ok && result.pmc_bytes == engine::primary_memory_cost(2, dkmax);
    }
    try {
        check_memory_budget(2, 12, 1'000'000);
        ok = false;
    } catch (const CapacityError& e) {
        ok = ok && e.required_bytes() == 4294967296ull;
    }
    return {ok, "dkmax 2..12: " + shown};
}

Outcome zero_coupling() {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = sys::SystemSpec::driven_two_level(kOmega);
    const auto table = eta::build_eta_table(bath::SpectralDensityModel::zero(), bath::BathParams{25.0}, 0.1, 8, {});
    double worst = 0.0;
    for (int dkmax : {0, 1, 4, 8}) {
        const auto traj = run_dynamics(spec, table, run_config(0.1, 200, dkmax, ReadoutMode::AllPoints, 1)).trajectory;
        for (std::size_t k = 0; k < traj.rhos.size(); ++k) {
            const double expected = std::pow(std::sin(kOmega * traj.times[k] / 2), 2);
            worst = std::max(worst, std::abs(traj.rhos[k](1, 1).real() - expected));
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-12 && elapsed < 1.0,
            fmt::format("N=200, dkmax in {{0,1,4,8}}: max |rho_11 - sin^2(Omega t/2)| = {:.3e} (limit 1e-12), {:.3f} s "
                        "(limit 1 s)",
                        worst, elapsed)};
}

Outcome constant_response() {
    const double dt = 0.1;
    const auto t = eta::build_eta_table([](double) { return Complex{1.0, 0.0}; }, dt, 3, QuadratureSpec{});
    const double a = dt * dt;
    double worst = 0.0;
    auto check = [&](Complex value, double expected) {
        worst = std::max(worst, std::abs(value - Complex{expected, 0.0}) / expected);
    };
    check(t.interior_self, a / 2);
    check(t.initial_self, a / 8);
    check(t.terminal_self, a / 8);
    for (int lag = 1; lag <= 3; ++lag) {
        check(t.interior_offdiag(lag), a);
        check(t.terminal_initial(lag), a / 4);
        check(t.initial_edge(lag), a / 2);
        check(t.terminal_edge(lag), a / 2);
    }
    return {worst <= 1e-10, fmt::format("max relative deviation {:.3e} (limit 1e-10)", worst)};
}

Outcome physics_sanity() {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = sys::SystemSpec::driven_two_level(kOmega);
    const auto t6 = run_dynamics(spec, qdot_eta(0.1, 6), run_config(0.1, 400, 6, ReadoutMode::AllPoints, 1)).trajectory;
    const auto t7 = run_dynamics(spec, qdot_eta(0.1, 7), run_config(0.1, 400, 7, ReadoutMode::AllPoints, 1)).trajectory;
    const double elapsed = seconds_since(start);
    const auto p = checks::population(t6, 1);
    const bool damped = checks::damped_oscillation(p);
    const double trace = checks::max_trace_defect(t6);
    const double herm = checks::max_hermiticity_defect(t6);
    const double plateau = checks::max_difference(t6, t7);
    return {damped && trace < 1e-10 && herm < 1e-10 && plateau <= 5e-3 && elapsed < 120.0,
            fmt::format("{} extrema damped={}, trace defect {:.2e}, hermiticity defect {:.2e} (limits 1e-10), "
                        "|dkmax 6 - dkmax 7| = {:.3e} (limit 5e-3), {:.2f} s (limit 120 s)",
                        checks::extrema(p).size(), damped, trace, herm, plateau, elapsed)};
}

Outcome horizon_scaling() {
    auto base = config::qdot25k();
    base.run.threads = 0;
    const auto steps = bench::parse_values("100:100:1000");
    const auto report = bench::sweep_horizon(base, steps, 8);
    bool all_fit = true;
    for (const auto& row : report.rows) all_fit = all_fit && row.fitted();
    return {all_fit && report.fit.r_squared >= 0.99,
            fmt::format("dkmax=8, N=100..1000: slope {:.3e} s/step, R^2 = {:.5f} (limit 0.99)", report.fit.slope,
                        report.fit.r_squared)};
}

Outcome mode_equivalence() {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> pick_m(2, 3), pick_dk(0, 4), pick_n(1, 30), pick_kind(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int identical = 0;
    const int total = 20;
    for (int trial = 0; trial < total; ++trial) {
        const int m = pick_m(rng);
        sys::SystemSpec spec;
        spec.coordinates.resize(m);
        for (int a = 0; a < m; ++a) spec.coordinates[a] = 2.0 * u(rng) - 1.0;
        spec.hamiltonian = oracle::random_hermitian(m, rng);
        spec.rho0 = oracle::random_density_matrix(m, rng);
        const int dkmax = pick_dk(rng);
        const int n = pick_n(rng);
        const double dt = 0.05 + 0.2 * u(rng);
        eta::EtaTable table;
        switch (pick_kind(rng)) {
            case 0:
                table = eta::build_eta_table(qdot_model(), bath::BathParams{5.0 + 100.0 * u(rng)}, dt, dkmax, {});
                break;
            case 1:
                table = eta::build_eta_table(bath::SpectralDensityModel::ohmic_exponential(0.2 * u(rng), 1.0 + 3.0 * u(rng)),
                                             bath::BathParams{5.0 + 100.0 * u(rng)}, dt, dkmax, {});
                break;
            default: {
                const Complex c{u(rng), u(rng) - 0.5};
                table = eta::build_eta_table([c](double) { return c; }, dt, dkmax, {});
            }
        }
        const auto all = run_dynamics(spec, table, run_config(dt, n, dkmax, ReadoutMode::AllPoints, 1)).trajectory;
        const auto last = run_dynamics(spec, table, run_config(dt, n, dkmax, ReadoutMode::JustFinalPoint, 1)).trajectory;
        if (last.rhos.size() == 2 && (last.rhos.back().array() == all.rhos.back().array()).all()) ++identical;
    }
    return {identical == total, fmt::format("{}/{} randomized configurations bit-identical", identical, total)};
}

Outcome thread_determinism() {
    const auto spec = sys::SystemSpec::driven_two_level(kOmega);
    const auto table = qdot_eta(0.1, 8);
    const auto ref = run_dynamics(spec, table, run_config(0.1, 200, 8, ReadoutMode::AllPoints, 1)).trajectory;
    bool ok = ref.rhos.size() == 201;
    for (int threads : {2, 8})
        ok = ok && checks::bit_identical(ref, run_dynamics(spec, table, run_config(0.1, 200, 8, ReadoutMode::AllPoints,
                                                                                   threads))
                                                  .trajectory);
    return {ok, "threads {1, 2, 8}, N=200, dkmax=8: trajectories bit-identical=" + std::string(ok ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 oracle equivalence", oracle_equivalence},
        {"AC2 memory law", memory_law},
        {"AC3 zero-coupling analytics", zero_coupling},
        {"AC4 constant-response eta closed forms", constant_response},
        {"AC5 physics sanity", physics_sanity},
        {"AC6 linear horizon scaling", horizon_scaling},
        {"AC7 readout mode equivalence", mode_equivalence},
        {"AC8 determinism under parallelism", thread_determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("[%s] %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
