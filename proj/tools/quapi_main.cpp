// quapi: reduced density-matrix dynamics from the command line
//
//   quapi run --config <path> [--mode allPoints|justFinalPoint] [--threads K]
//             [--output <path>] [--dump-eta <path>] [--memory-budget BYTES]
//   quapi bench dkmax   --config <path> --values 2..12 --reps 3 --output <path>
//   quapi bench horizon --config <path> --values 100:100:1000 --dkmax 8 --output <path>
//
// Exit codes: 2 config, 3 capacity, 4 quadrature convergence, 5 I/O.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "quapi/bench.hpp"
#include "quapi/config.hpp"
#include "quapi/dynamics.hpp"
#include "quapi/errors.hpp"
#include "quapi/eta.hpp"
#include "quapi/output.hpp"

namespace {

struct RunFlags {
    std::string config;
    std::optional<std::string> mode;
    std::optional<int> threads;
    std::optional<std::string> output;
    std::optional<std::string> dump_eta;
    std::optional<std::uint64_t> memory_budget;
    std::optional<std::string> kernel;
};

struct BenchFlags {
    std::string config;
    std::string values;
    int reps{3};
    int dkmax{8};
    std::optional<int> threads;
    std::optional<std::uint64_t> memory_budget;
    std::string output;
};

int run_command(const RunFlags& flags) {
    using namespace quapi;
    config::Configuration cfg = config::load_config(flags.config);
    if (flags.mode) cfg.run.mode = readout_mode_from_string(*flags.mode);
    if (flags.threads) cfg.run.threads = *flags.threads;
    if (flags.output) cfg.run.output_path = *flags.output;
    if (flags.dump_eta) cfg.run.eta_dump_path = *flags.dump_eta;
    if (flags.memory_budget) cfg.run.memory_budget = *flags.memory_budget;
    if (flags.kernel) cfg.run.kernel = *flags.kernel;
    cfg.validate();

    const int m = cfg.system.dimension();
    check_memory_budget(m, cfg.run.dkmax, cfg.run.memory_budget);

    const auto start = std::chrono::steady_clock::now();
    const eta::EtaTable eta = eta::build_eta_table(cfg.spectral_density, cfg.bath, cfg.run.dt,
                                                   cfg.run.dkmax, cfg.quadrature, cfg.alpha_sampling);
    const double eta_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cfg.run.eta_dump_path) eta::write_eta_csv(eta, *cfg.run.eta_dump_path);

    const DynamicsResult result = run_dynamics(cfg.system, eta, cfg.run);
    write_trajectory_csv(result.trajectory, cfg.run.output_path);

    const Matrix& last = result.trajectory.rhos.back();
    std::cout << fmt::format("M={} dt={} ps N={} dkmax={} mode={} threads={} kernel={}\n", m,
                             cfg.run.dt, cfg.run.steps, cfg.run.dkmax, to_string(cfg.run.mode),
                             resolve_threads(cfg.run.threads), kernels::by_name(cfg.run.kernel).name)
              << fmt::format("pmc_bytes={} ({})\n", result.pmc_bytes, format_bytes(result.pmc_bytes))
              << fmt::format("setup_s={:.6f} (eta {:.6f}, tables {:.6f})\n",
                             eta_seconds + result.times.setup_s, eta_seconds, result.times.setup_s)
              << fmt::format("propagation_s={:.6f}\n", result.times.propagation_s)
              << fmt::format("readout_s={:.6f}\n", result.times.readout_s)
              << fmt::format("final t={} rho_11={:.12f} trace={:.12f}\n",
                             result.trajectory.times.back(), last(m - 1, m - 1).real(),
                             last.trace().real())
              << fmt::format("wrote {} rows to {}\n", result.trajectory.rhos.size(), cfg.run.output_path);
    return 0;
}

int bench_command(const BenchFlags& flags, bool horizon) {
    using namespace quapi;
    config::Configuration cfg = config::load_config(flags.config);
    if (flags.memory_budget) cfg.run.memory_budget = *flags.memory_budget;
    if (flags.threads) cfg.run.threads = *flags.threads;
    const std::vector<int> values = bench::parse_values(flags.values);
    bench::BenchOptions options;
    options.reps = flags.reps;
    if (options.reps < 1) throw ConfigError("--reps must be at least 1");

    if (horizon) {
        const bench::HorizonReport report = bench::sweep_horizon(cfg, values, flags.dkmax, options);
        bench::write_report_csv(report.rows, report.fit, flags.output);
        std::cout << fmt::format("horizon sweep dkmax={}: slope={:.6e} s/step intercept={:.6e} s r2={:.6f}\n",
                                 flags.dkmax, report.fit.slope, report.fit.intercept,
                                 report.fit.r_squared);
    } else {
        const std::vector<bench::BenchRow> rows = bench::sweep_dkmax(cfg, values, options);
        bench::write_report_csv(rows, std::nullopt, flags.output);
        for (const auto& row : rows)
            std::cout << fmt::format("dkmax={:>2} pmc={:>10} {}\n", row.param, format_bytes(row.pmc_bytes),
                                     row.fitted() ? fmt::format("prop_serial={:.4f}s prop_parallel={:.4f}s",
                                                                row.prop_serial_s, row.prop_parallel_s)
                                                  : row.status);
    }
    std::cout << "wrote " << flags.output << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced density-matrix dynamics by iterative tensor propagation"};
    app.require_subcommand(1);

    RunFlags run;
    CLI::App* run_cmd = app.add_subcommand("run", "propagate a configuration and write its trajectory");
    run_cmd->add_option("--config", run.config, "JSON configuration")->required();
    run_cmd->add_option("--mode", run.mode, "allPoints or justFinalPoint");
    run_cmd->add_option("--threads", run.threads, "worker threads (default: QUAPI_THREADS or all cores)");
    run_cmd->add_option("--output", run.output, "trajectory CSV path");
    run_cmd->add_option("--dump-eta", run.dump_eta, "write the η table as CSV");
    run_cmd->add_option("--memory-budget", run.memory_budget, "refuse runs whose PMC exceeds BYTES");
    run_cmd->add_option("--kernel", run.kernel, "auto, scalar or avx2");

    CLI::App* bench_cmd = app.add_subcommand("bench", "timing sweeps");
    bench_cmd->require_subcommand(1);
    BenchFlags dk, hz;
    auto add_common = [](CLI::App* cmd, BenchFlags& f, const std::string& default_values) {
        f.values = default_values;
        cmd->add_option("--config", f.config, "JSON configuration")->required();
        cmd->add_option("--values", f.values, "a..b, start:step:stop or comma list")->capture_default_str();
        cmd->add_option("--reps", f.reps, "timed repetitions per row (median)")->capture_default_str();
        cmd->add_option("--threads", f.threads, "threads for the parallel column");
        cmd->add_option("--memory-budget", f.memory_budget, "PMC limit in bytes");
        cmd->add_option("--output", f.output, "report CSV path")->required();
    };
    CLI::App* dk_cmd = bench_cmd->add_subcommand("dkmax", "cost against memory length");
    add_common(dk_cmd, dk, "2..12");
    CLI::App* hz_cmd = bench_cmd->add_subcommand("horizon", "cost against number of time steps");
    add_common(hz_cmd, hz, "100:100:1000");
    hz_cmd->add_option("--dkmax", hz.dkmax, "memory length")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return run_command(run);
        if (dk_cmd->parsed()) return bench_command(dk, false);
        if (hz_cmd->parsed()) return bench_command(hz, true);
    } catch (const quapi::Error& e) {
        std::cerr << "quapi: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "quapi: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
