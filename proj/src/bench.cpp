#include "quapi/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <fmt/format.h>
#include <gsl/gsl_fit.h>

#include "quapi/errors.hpp"

namespace quapi::bench {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Samples {
    std::vector<double> setup, serial, parallel, readout;
};

RunConfig timing_run(const config::Configuration& base, int steps, int dkmax, int threads) {
    RunConfig run = base.run;
    run.steps = steps;
    run.dkmax = dkmax;
    run.mode = ReadoutMode::JustFinalPoint;
    run.threads = threads;
    return run;
}

BenchRow measure(const config::Configuration& base, const eta::EtaTable& eta, double eta_seconds,
                 std::int64_t param, int steps, int dkmax, const BenchOptions& options) {
    BenchRow row;
    row.param = param;
    row.pmc_bytes = engine::primary_memory_cost(base.system.dimension(), dkmax);
    const int parallel = options.parallel_threads > 0 ? options.parallel_threads
                                                      : resolve_threads(base.run.threads);
    const RunConfig serial_run = timing_run(base, steps, dkmax, 1);
    const RunConfig parallel_run = timing_run(base, steps, dkmax, parallel);

    if (options.warmup) run_dynamics(base.system, eta, parallel_run);
    Samples samples;
    for (int r = 0; r < std::max(1, options.reps); ++r) {
        const DynamicsResult s = run_dynamics(base.system, eta, serial_run);
        const DynamicsResult p = run_dynamics(base.system, eta, parallel_run);
        samples.setup.push_back(p.times.setup_s);
        samples.serial.push_back(s.times.propagation_s);
        samples.parallel.push_back(p.times.propagation_s);
        samples.readout.push_back(p.times.readout_s);
    }
    row.setup_s = eta_seconds + median(samples.setup);
    row.prop_serial_s = median(samples.serial);
    row.prop_parallel_s = median(samples.parallel);
    row.readout_s = median(samples.readout);
    return row;
}

BenchRow did_not_fit(std::int64_t param, std::uint64_t pmc) {
    BenchRow row;
    row.param = param;
    row.pmc_bytes = pmc;
    row.setup_s = row.prop_serial_s = row.prop_parallel_s = row.readout_s =
        std::numeric_limits<double>::quiet_NaN();
    row.status = "did not fit";
    return row;
}

std::uint64_t pmc_or_max(int dimension, int dkmax) {
    try {
        return engine::primary_memory_cost(dimension, dkmax);
    } catch (const CapacityError&) {
        return std::numeric_limits<std::uint64_t>::max();
    }
}

}  // namespace

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear fit needs ≥ 2 paired samples");
    double c0 = 0, c1 = 0, cov00 = 0, cov01 = 0, cov11 = 0, residual = 0;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &residual);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double total = 0.0;
    for (double v : y) total += (v - mean) * (v - mean);
    return {c1, c0, total > 0.0 ? 1.0 - residual / total : 1.0};
}

std::vector<BenchRow> sweep_dkmax(const config::Configuration& base, std::span<const int> dkmax_values,
                                  const BenchOptions& options) {
    const int m = base.system.dimension();
    std::vector<BenchRow> rows;
    for (int dkmax : dkmax_values) {
        const std::uint64_t pmc = pmc_or_max(m, dkmax);
        if (pmc > base.run.memory_budget) {
            rows.push_back(did_not_fit(dkmax, pmc));
            continue;
        }
        try {
            const auto start = std::chrono::steady_clock::now();
            const eta::EtaTable eta = eta::build_eta_table(base.spectral_density, base.bath, base.run.dt,
                                                           dkmax, base.quadrature, base.alpha_sampling);
            const double eta_seconds = seconds_since(start);
            rows.push_back(measure(base, eta, eta_seconds, dkmax, base.run.steps, dkmax, options));
        } catch (const CapacityError&) {
            rows.push_back(did_not_fit(dkmax, pmc));
        }
    }
    return rows;
}

HorizonReport sweep_horizon(const config::Configuration& base, std::span<const int> steps, int dkmax,
                            const BenchOptions& options) {
    HorizonReport report;
    const int m = base.system.dimension();
    const std::uint64_t pmc = pmc_or_max(m, dkmax);
    if (pmc > base.run.memory_budget) {
        for (int n : steps) report.rows.push_back(did_not_fit(n, pmc));
        return report;
    }
    const auto start = std::chrono::steady_clock::now();
    const eta::EtaTable eta = eta::build_eta_table(base.spectral_density, base.bath, base.run.dt, dkmax,
                                                   base.quadrature, base.alpha_sampling);
    const double eta_seconds = seconds_since(start);

    std::vector<double> xs, ys;
    for (int n : steps) {
        try {
            report.rows.push_back(measure(base, eta, eta_seconds, n, n, dkmax, options));
        } catch (const CapacityError&) {
            report.rows.push_back(did_not_fit(n, pmc));
            continue;
        }
        const BenchRow& row = report.rows.back();
        xs.push_back(static_cast<double>(n));
        ys.push_back(row.prop_parallel_s + row.readout_s);
    }
    if (xs.size() >= 2) report.fit = fit_line(xs, ys);
    return report;
}

void write_report_csv(std::span<const BenchRow> rows, const std::optional<LinearFit>& fit,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open bench report '" + path + "' for writing");
    out << "param,pmc_bytes,setup_s,prop_serial_s,prop_parallel_s,readout_s,status\n";
    for (const BenchRow& row : rows) {
        if (row.fitted())
            out << fmt::format("{},{},{:.6e},{:.6e},{:.6e},{:.6e},{}\n", row.param, row.pmc_bytes,
                               row.setup_s, row.prop_serial_s, row.prop_parallel_s, row.readout_s,
                               row.status);
        else
            out << fmt::format("{},{},,,,,{}\n", row.param, row.pmc_bytes, row.status);
    }
    if (fit)
        out << fmt::format("# fit prop_parallel_s+readout_s vs param: slope={:.6e},intercept={:.6e},r2={:.6f}\n",
                           fit->slope, fit->intercept, fit->r_squared);
    if (!out) throw IoError("failed writing bench report '" + path + "'");
}

std::vector<int> parse_values(std::string_view text) {
    auto to_int = [&](std::string_view s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(std::string(s), &used);
            if (used != s.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("cannot parse value list '" + std::string(text) + "'");
        }
    };
    std::vector<int> values;
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const int lo = to_int(text.substr(0, dots)), hi = to_int(text.substr(dots + 2));
        if (hi < lo) throw ConfigError("empty range '" + std::string(text) + "'");
        for (int v = lo; v <= hi; ++v) values.push_back(v);
    } else if (const auto c1 = text.find(':'); c1 != std::string_view::npos) {
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw ConfigError("expected start:step:stop, got '" + std::string(text) + "'");
        const int start = to_int(text.substr(0, c1)), step = to_int(text.substr(c1 + 1, c2 - c1 - 1)),
                  stop = to_int(text.substr(c2 + 1));
        if (step <= 0 || stop < start) throw ConfigError("invalid range '" + std::string(text) + "'");
        for (int v = start; v <= stop; v += step) values.push_back(v);
    } else {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto comma = text.find(',', pos);
            const auto piece = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
            values.push_back(to_int(piece));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
    }
    return values;
}

}  // namespace quapi::bench
