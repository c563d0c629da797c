// bench.hpp: wall-clock sweeps over memory length and horizon

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quapi/config.hpp"

namespace quapi::bench {

struct BenchOptions {
    int reps{3};              // medians are over this many timed runs
    int parallel_threads{0};  // 0 = resolve_threads(base run threads)
    bool warmup{true};        // one discarded run before each row
};

/// One report row. Times are medians in seconds; rows that exceed the memory
/// budget carry status "did not fit" and no times.
struct BenchRow {
    std::int64_t param{0};
    std::uint64_t pmc_bytes{0};
    double setup_s{0.0};  // η table plus propagator/factor tables
    double prop_serial_s{0.0};
    double prop_parallel_s{0.0};
    double readout_s{0.0};
    std::string status{"ok"};

    bool fitted() const { return status == "ok"; }
};

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// One row per memory length, horizon fixed by base.run.steps.
std::vector<BenchRow> sweep_dkmax(const config::Configuration& base, std::span<const int> dkmax_values,
                                  const BenchOptions& options = {});

struct HorizonReport {
    std::vector<BenchRow> rows;
    LinearFit fit;  // prop_parallel_s + readout_s against N
};

/// Linear-scaling check: one row per horizon N at fixed memory length, reading
/// out only the final point.
HorizonReport sweep_horizon(const config::Configuration& base, std::span<const int> steps, int dkmax,
                            const BenchOptions& options = {});

/// Columns `param,pmc_bytes,setup_s,prop_serial_s,prop_parallel_s,readout_s,status`,
/// plus a `# fit` footer line when a fit is given.
void write_report_csv(std::span<const BenchRow> rows, const std::optional<LinearFit>& fit,
                      const std::string& path);

/// "2..12" (inclusive range), "100:100:1000" (start:step:stop) or "1,2,5".
std::vector<int> parse_values(std::string_view text);

}  // namespace quapi::bench
