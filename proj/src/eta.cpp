#include "quapi/eta.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <fmt/format.h>
#include <gsl/gsl_spline.h>

#include "quapi/errors.hpp"

namespace quapi::eta {

namespace {

void check_lag(int lag, int dkmax, const char* what) {
    if (lag < 1 || lag > dkmax)
        throw DomainError(fmt::format("{} lag {} outside [1, {}]", what, lag, dkmax));
}

// α shared by all windows of a table build; every distinct abscissa is
// integrated once.
class MemoizedResponse {
public:
    explicit MemoizedResponse(ResponseFunction alpha) : alpha_(std::move(alpha)) {}

    Complex operator()(double t) const {
        {
            std::shared_lock lock(mutex_);
            if (auto it = cache_.find(t); it != cache_.end()) return it->second;
        }
        const Complex value = alpha_(t);
        std::unique_lock lock(mutex_);
        cache_.emplace(t, value);
        return value;
    }

private:
    ResponseFunction alpha_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<double, Complex> cache_;
};

struct SplineDeleter {
    void operator()(gsl_spline* s) const noexcept { gsl_spline_free(s); }
};

// Cubic spline of α on a uniform grid covering [lo, hi].
class TabulatedResponse {
public:
    TabulatedResponse(const ResponseFunction& alpha, double lo, double hi, double max_step) {
        const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / max_step));
        const std::size_t n = std::max<std::size_t>(intervals, 4) + 1;
        const double h = (hi - lo) / static_cast<double>(n - 1);
        std::vector<double> t(n), re(n), im(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = lo + h * static_cast<double>(i);
            const Complex a = alpha(t[i]);
            re[i] = a.real();
            im[i] = a.imag();
        }
        re_.reset(gsl_spline_alloc(gsl_interp_cspline, n), SplineDeleter{});
        im_.reset(gsl_spline_alloc(gsl_interp_cspline, n), SplineDeleter{});
        gsl_spline_init(re_.get(), t.data(), re.data(), n);
        gsl_spline_init(im_.get(), t.data(), im.data(), n);
    }

    Complex operator()(double t) const {
        return {gsl_spline_eval(re_.get(), t, nullptr), gsl_spline_eval(im_.get(), t, nullptr)};
    }

private:
    std::shared_ptr<gsl_spline> re_;
    std::shared_ptr<gsl_spline> im_;
};

struct WindowTask {
    EtaClass cls;
    int lag;
    Complex* slot;
};

Complex compute_window(const ResponseFunction& alpha, EtaClass cls, int lag, double dt,
                       const QuadratureSpec& quad) {
    const double half = 0.5 * dt;
    const double l = static_cast<double>(lag);
    switch (cls) {
        case EtaClass::InteriorOffdiag:
            return rectangle_integral(alpha, l * dt, (l + 1.0) * dt, 0.0, dt, quad);
        case EtaClass::InteriorSelf: return triangle_integral(alpha, 0.0, dt, quad);
        case EtaClass::InitialSelf: return triangle_integral(alpha, 0.0, half, quad);
        // terminal windows are placed on a trajectory ending at lag·Δt (lag = N − k)
        case EtaClass::TerminalSelf: return triangle_integral(alpha, half, dt, quad);
        case EtaClass::TerminalInitial:
            return rectangle_integral(alpha, l * dt - half, l * dt, 0.0, half, quad);
        case EtaClass::InitialEdge:
            return rectangle_integral(alpha, l * dt, (l + 1.0) * dt, 0.0, half, quad);
        case EtaClass::TerminalEdge:
            return rectangle_integral(alpha, l * dt - half, l * dt, 0.0, dt, quad);
    }
    return {};
}

}  // namespace

std::string_view to_string(EtaClass cls) {
    switch (cls) {
        case EtaClass::InteriorOffdiag: return "interior_offdiag";
        case EtaClass::InteriorSelf: return "interior_self";
        case EtaClass::InitialSelf: return "initial_self";
        case EtaClass::TerminalSelf: return "terminal_self";
        case EtaClass::TerminalInitial: return "terminal_initial";
        case EtaClass::InitialEdge: return "initial_edge";
        case EtaClass::TerminalEdge: return "terminal_edge";
    }
    return "";
}

EtaClass classify_pair(int k, int k_prime, int horizon) {
    if (k_prime < 0 || k_prime > k || k > horizon)
        throw DomainError(fmt::format("invalid η pair ({}, {}) for horizon {}", k, k_prime, horizon));
    if (k == k_prime) {
        if (k == 0) return EtaClass::InitialSelf;
        return k == horizon ? EtaClass::TerminalSelf : EtaClass::InteriorSelf;
    }
    if (k_prime == 0) return k == horizon ? EtaClass::TerminalInitial : EtaClass::InitialEdge;
    return k == horizon ? EtaClass::TerminalEdge : EtaClass::InteriorOffdiag;
}

std::string_view to_string(AlphaSampling sampling) {
    return sampling == AlphaSampling::Direct ? "direct" : "tabulated";
}

AlphaSampling alpha_sampling_from_string(std::string_view name) {
    if (name == "direct") return AlphaSampling::Direct;
    if (name == "tabulated") return AlphaSampling::Tabulated;
    throw ValidationError("quadrature.alpha_sampling",
                          "expected 'direct' or 'tabulated', got '" + std::string(name) + "'");
}

Complex EtaTable::interior_offdiag(int lag) const {
    check_lag(lag, dkmax, "interior_offdiag");
    return interior_offdiag_by_lag[static_cast<std::size_t>(lag - 1)];
}

Complex EtaTable::terminal_initial(int lag) const {
    check_lag(lag, dkmax, "terminal_initial");
    return terminal_initial_by_lag[static_cast<std::size_t>(lag - 1)];
}

Complex EtaTable::initial_edge(int lag) const {
    check_lag(lag, dkmax, "initial_edge");
    return initial_edge_by_lag[static_cast<std::size_t>(lag - 1)];
}

Complex EtaTable::terminal_edge(int lag) const {
    check_lag(lag, dkmax, "terminal_edge");
    return terminal_edge_by_lag[static_cast<std::size_t>(lag - 1)];
}

Complex EtaTable::for_pair(int k, int k_prime, int horizon) const {
    const int lag = k - k_prime;
    switch (classify_pair(k, k_prime, horizon)) {
        case EtaClass::InteriorOffdiag: return interior_offdiag(lag);
        case EtaClass::InteriorSelf: return interior_self;
        case EtaClass::InitialSelf: return initial_self;
        case EtaClass::TerminalSelf: return terminal_self;
        case EtaClass::TerminalInitial: return terminal_initial(lag);
        case EtaClass::InitialEdge: return initial_edge(lag);
        case EtaClass::TerminalEdge: return terminal_edge(lag);
    }
    return {};
}

EtaTable EtaTable::zeros(double dt, int dkmax) {
    EtaTable table;
    table.dt = dt;
    table.dkmax = dkmax;
    const auto n = static_cast<std::size_t>(dkmax);
    table.interior_offdiag_by_lag.assign(n, Complex{});
    table.terminal_initial_by_lag.assign(n, Complex{});
    table.initial_edge_by_lag.assign(n, Complex{});
    table.terminal_edge_by_lag.assign(n, Complex{});
    return table;
}

Complex rectangle_integral(const ResponseFunction& alpha, double outer_lo, double outer_hi,
                           double inner_lo, double inner_hi, const QuadratureSpec& quad) {
    return integrate_complex(
        [&](double t_outer) {
            return integrate_complex([&](double t_inner) { return alpha(t_outer - t_inner); },
                                     inner_lo, inner_hi, quad, "η inner integral");
        },
        outer_lo, outer_hi, quad, "η outer integral");
}

Complex triangle_integral(const ResponseFunction& alpha, double lo, double hi,
                          const QuadratureSpec& quad) {
    return integrate_complex(
        [&](double t_outer) {
            return integrate_complex([&](double t_inner) { return alpha(t_outer - t_inner); }, lo,
                                     t_outer, quad, "η inner integral");
        },
        lo, hi, quad, "η outer integral");
}

Complex interior_pair(const ResponseFunction& alpha, int k, int k_prime, double dt,
                      const QuadratureSpec& quad) {
    if (k == k_prime) throw DomainError("interior_pair requires k ≠ k′");
    return rectangle_integral(alpha, k * dt, (k + 1) * dt, k_prime * dt, (k_prime + 1) * dt, quad);
}

EtaTable build_eta_table(const ResponseFunction& alpha, double dt, int dkmax,
                         const QuadratureSpec& quad) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("run.dt", "must be positive");
    if (dkmax < 0) throw ValidationError("run.dkmax", "must be non-negative");
    quad.validate();

    EtaTable table = EtaTable::zeros(dt, dkmax);
    std::vector<WindowTask> tasks{
        {EtaClass::InteriorSelf, 0, &table.interior_self},
        {EtaClass::InitialSelf, 0, &table.initial_self},
        {EtaClass::TerminalSelf, 0, &table.terminal_self},
    };
    for (int lag = 1; lag <= dkmax; ++lag) {
        const auto i = static_cast<std::size_t>(lag - 1);
        tasks.push_back({EtaClass::InteriorOffdiag, lag, &table.interior_offdiag_by_lag[i]});
        tasks.push_back({EtaClass::TerminalInitial, lag, &table.terminal_initial_by_lag[i]});
        tasks.push_back({EtaClass::InitialEdge, lag, &table.initial_edge_by_lag[i]});
        tasks.push_back({EtaClass::TerminalEdge, lag, &table.terminal_edge_by_lag[i]});
    }

    std::vector<std::exception_ptr> failures(tasks.size());
    const auto count = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const WindowTask& task = tasks[static_cast<std::size_t>(i)];
        try {
            *task.slot = compute_window(alpha, task.cls, task.lag, dt, quad);
        } catch (const ConvergenceError& e) {
            failures[static_cast<std::size_t>(i)] = std::make_exception_ptr(ConvergenceError(
                e.error_estimate(),
                fmt::format("η {} (lag {}): {}", to_string(task.cls), task.lag, e.what())));
        } catch (...) {
            failures[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return table;
}

EtaTable build_eta_table(const bath::SpectralDensityModel& model, const bath::BathParams& bath,
                         double dt, int dkmax, const QuadratureSpec& quad, AlphaSampling sampling) {
    model.validate();
    bath.validate();
    quad.validate();
    if (model.is_zero()) {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("run.dt", "must be positive");
        if (dkmax < 0) throw ValidationError("run.dkmax", "must be non-negative");
        return EtaTable::zeros(dt, dkmax);
    }

    auto direct = [model, bath, quad](double t) { return bath::bath_response(model, bath, t, quad); };
    if (sampling == AlphaSampling::Tabulated) {
        // widest window separation is (dkmax + 1)Δt; the narrowest is −Δt/2
        const TabulatedResponse table(direct, -2.0 * dt, (dkmax + 3) * dt, dt / 50.0);
        return build_eta_table(ResponseFunction(table), dt, dkmax, quad);
    }
    auto memo = std::make_shared<MemoizedResponse>(direct);
    return build_eta_table([memo](double t) { return (*memo)(t); }, dt, dkmax, quad);
}

void write_eta_csv(const EtaTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open η dump '" + path + "' for writing");
    auto row = [&](EtaClass cls, int lag, Complex v) {
        out << fmt::format("{},{},{:.17g},{:.17g}\n", to_string(cls), lag, v.real(), v.imag());
    };
    out << "class,lag,re,im\n";
    row(EtaClass::InteriorSelf, 0, table.interior_self);
    row(EtaClass::InitialSelf, 0, table.initial_self);
    row(EtaClass::TerminalSelf, 0, table.terminal_self);
    for (int lag = 1; lag <= table.dkmax; ++lag) row(EtaClass::InteriorOffdiag, lag, table.interior_offdiag(lag));
    for (int lag = 1; lag <= table.dkmax; ++lag) row(EtaClass::TerminalInitial, lag, table.terminal_initial(lag));
    for (int lag = 1; lag <= table.dkmax; ++lag) row(EtaClass::InitialEdge, lag, table.initial_edge(lag));
    for (int lag = 1; lag <= table.dkmax; ++lag) row(EtaClass::TerminalEdge, lag, table.terminal_edge(lag));
    if (!out) throw IoError("failed writing η dump '" + path + "'");
}

}  // namespace quapi::eta
