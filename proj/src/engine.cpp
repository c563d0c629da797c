#include "quapi/engine.hpp"

#include <algorithm>
#include <cmath>
#include <new>

#include <fmt/format.h>

#include "quapi/errors.hpp"
#include "quapi/path_indexer.hpp"

namespace quapi::engine {

namespace {

// Rows handed to one kernel call; fixed so partial sums never depend on the
// thread count.
constexpr std::size_t kRowChunk = 1024;
constexpr std::size_t kParallelThreshold = 4096;

void allocate(std::vector<Complex>& v, std::size_t n, std::uint64_t pmc) {
    try {
        v.assign(n, Complex{});
    } catch (const std::bad_alloc&) {
        throw CapacityError(pmc, fmt::format("could not allocate {} bytes for the augmented tensor "
                                             "(primary memory cost {} bytes)",
                                             16 * static_cast<std::uint64_t>(n), pmc));
    }
}

std::size_t power(std::size_t base, int exponent) {
    return static_cast<std::size_t>(checked_power(base, exponent));
}

}  // namespace

Complex influence_pair_factor(int jk_plus, int jk_minus, int jkp_plus, int jkp_minus, Complex eta,
                              std::span<const double> coordinates) {
    const auto at = [&](int j) { return coordinates[static_cast<std::size_t>(j)]; };
    const double difference = at(jk_plus) - at(jk_minus);
    if (difference == 0.0) return {1.0, 0.0};
    return std::exp(-difference * (eta * at(jkp_plus) - std::conj(eta) * at(jkp_minus)));
}

std::uint64_t tensor_bytes(int dimension, int dkmax) {
    const std::uint64_t elements =
        checked_power(static_cast<std::uint64_t>(dimension), 2 * (dkmax + 1));
    if (elements > UINT64_MAX / 16)
        throw CapacityError(UINT64_MAX, "tensor byte count overflows 64 bits");
    return 16 * elements;
}

std::uint64_t primary_memory_cost(int dimension, int dkmax) {
    const std::uint64_t one = tensor_bytes(dimension, dkmax);
    if (one > UINT64_MAX / 4)
        throw CapacityError(UINT64_MAX, "primary memory cost overflows 64-bit byte count");
    return 4 * one;
}

TensorPropagator::TensorPropagator(const sys::SystemSpec& spec, const eta::EtaTable& eta,
                                   const sys::PropagatorPair& propagators, int dkmax,
                                   EngineOptions options)
    : dimension_(spec.dimension()),
      fanout_(static_cast<std::size_t>(dimension_) * static_cast<std::size_t>(dimension_)),
      dkmax_(dkmax),
      threads_(std::max(1, options.threads)),
      kernel_(options.kernel ? options.kernel : &kernels::best()),
      coordinates_(spec.coordinates.data(), spec.coordinates.data() + spec.coordinates.size()),
      rho0_(spec.rho0) {
    if (dkmax < 0) throw ValidationError("run.dkmax", "must be non-negative");
    if (eta.dkmax < dkmax)
        throw ValidationError("run.dkmax", fmt::format("η table covers lags up to {} but {} requested",
                                                       eta.dkmax, dkmax));
    const auto m = static_cast<std::size_t>(dimension_);
    if (propagators.forward.rows() != static_cast<Eigen::Index>(m))
        throw ValidationError("system.hamiltonian", "propagator dimension mismatch");

    propagator_.resize(fanout_ * fanout_);
    const Matrix& k = propagators.forward;
    for (std::size_t xn = 0; xn < fanout_; ++xn) {
        const auto np = static_cast<Eigen::Index>(xn / m), nm = static_cast<Eigen::Index>(xn % m);
        for (std::size_t xo = 0; xo < fanout_; ++xo) {
            const auto op = static_cast<Eigen::Index>(xo / m), om = static_cast<Eigen::Index>(xo % m);
            // ⟨s_{k+1}⁺|K|s_k⁺⟩ ⟨s_k⁻|K†|s_{k+1}⁻⟩
            propagator_[xn * fanout_ + xo] = kernels::mul(k(np, op), std::conj(k(nm, om)));
        }
    }

    self_initial_ = self_vector(eta.initial_self);
    self_interior_ = self_vector(eta.interior_self);
    self_terminal_ratio_ = self_vector(eta.terminal_self - eta.interior_self);
    for (int lag = 1; lag <= dkmax_; ++lag) {
        offdiag_.push_back(pair_matrix(eta.interior_offdiag(lag)));
        initial_edge_.push_back(pair_matrix(eta.initial_edge(lag)));
        terminal_edge_ratio_.push_back(pair_matrix(eta.terminal_edge(lag) - eta.interior_offdiag(lag)));
        terminal_initial_ratio_.push_back(pair_matrix(eta.terminal_initial(lag) - eta.initial_edge(lag)));
    }
}

void TensorPropagator::set_threads(int threads) { threads_ = std::max(1, threads); }

TensorPropagator::PairMatrix TensorPropagator::pair_matrix(Complex eta) const {
    const int m = dimension_;
    PairMatrix out(fanout_ * fanout_);
    for (std::size_t xn = 0; xn < fanout_; ++xn)
        for (std::size_t xo = 0; xo < fanout_; ++xo)
            out[xn * fanout_ + xo] = influence_pair_factor(
                static_cast<int>(xn) / m, static_cast<int>(xn) % m, static_cast<int>(xo) / m,
                static_cast<int>(xo) % m, eta, coordinates_);
    return out;
}

std::vector<Complex> TensorPropagator::self_vector(Complex eta) const {
    const int m = dimension_;
    std::vector<Complex> out(fanout_);
    for (std::size_t x = 0; x < fanout_; ++x) {
        const int p = static_cast<int>(x) / m, q = static_cast<int>(x) % m;
        out[x] = influence_pair_factor(p, q, p, q, eta, coordinates_);
    }
    return out;
}

// out[i·D + x] = self[x] · Π_pairs matrix[x·D + digit_position(i)], where i has
// `prefix_digits` base-D digits, most significant first.
void TensorPropagator::build_table(int prefix_digits, const std::vector<Complex>& self,
                                   std::span<const PairFactor> pairs,
                                   std::vector<Complex>& out) const {
    const std::size_t d = fanout_;
    const std::size_t rows = power(d, prefix_digits);
    const auto row_count = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(threads_) if (rows * d > kParallelThreshold)
    for (std::ptrdiff_t r = 0; r < row_count; ++r) {
        std::size_t digits[64];
        std::size_t rest = static_cast<std::size_t>(r);
        for (int p = prefix_digits; p-- > 0;) {
            digits[p] = rest % d;
            rest /= d;
        }
        const std::size_t base = static_cast<std::size_t>(r) * d;
        for (std::size_t x = 0; x < d; ++x) {
            Complex value = self[x];
            for (const PairFactor& f : pairs)
                value = kernels::mul(value, (*f.matrix)[x * d + digits[f.position]]);
            out[base + x] = value;
        }
    }
}

Matrix TensorPropagator::reduce(const std::vector<Complex>& amplitudes,
                                const std::vector<Complex>& weights) const {
    const std::size_t d = fanout_;
    const std::size_t rows = amplitudes.size() / d;
    const std::size_t chunks = (rows + kRowChunk - 1) / kRowChunk;
    std::vector<Complex> partial(chunks * d, Complex{});
    const auto chunk_count = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) num_threads(threads_) if (rows > kParallelThreshold)
    for (std::ptrdiff_t c = 0; c < chunk_count; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kRowChunk;
        const std::size_t end = std::min(rows, begin + kRowChunk);
        kernel_->weighted_column_sum(amplitudes.data(), weights.data(), d, begin, end,
                                     partial.data() + static_cast<std::size_t>(c) * d);
    }
    const int m = dimension_;
    Matrix rho = Matrix::Zero(m, m);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t x = 0; x < d; ++x) {
            const Complex p = partial[c * d + x];
            Complex& r = rho(static_cast<Eigen::Index>(x) / m, static_cast<Eigen::Index>(x) % m);
            r = {r.real() + p.real(), r.imag() + p.imag()};
        }
    return rho;
}

void TensorPropagator::prepare_sliding_tables() {
    if (sliding_ready_ || dkmax_ == 0) return;
    const std::uint64_t pmc = primary_memory_cost(dimension_, dkmax_);
    const std::size_t full = power(fanout_, dkmax_ + 1);
    allocate(step_table_, full, pmc);
    allocate(readout_table_, full, pmc);

    // Prefix digits are x_{n−Δ} … x_{n−1}; x_{n−l} sits at position Δ − l.
    std::vector<PairFactor> step_pairs{{dkmax_ - 1, &propagator_}};
    std::vector<PairFactor> readout_pairs;
    for (int lag = 1; lag <= dkmax_; ++lag) {
        const auto i = static_cast<std::size_t>(lag - 1);
        step_pairs.push_back({dkmax_ - lag, &offdiag_[i]});
        readout_pairs.push_back({dkmax_ - lag, &terminal_edge_ratio_[i]});
    }
    build_table(dkmax_, self_interior_, step_pairs, step_table_);
    build_table(dkmax_, self_terminal_ratio_, readout_pairs, readout_table_);
    sliding_ready_ = true;
}

AugmentedTensor TensorPropagator::seed() const {
    AugmentedTensor tensor;
    tensor.amplitudes.resize(fanout_);
    const int m = dimension_;
    for (std::size_t x = 0; x < fanout_; ++x)
        tensor.amplitudes[x] =
            kernels::mul(rho0_(static_cast<Eigen::Index>(x) / m, static_cast<Eigen::Index>(x) % m),
                         self_initial_[x]);
    tensor.current_step = 0;
    tensor.window = 1;
    tensor.phase = dkmax_ == 0 ? Phase::Sliding : Phase::Growing;
    return tensor;
}

AugmentedTensor TensorPropagator::initialize(int horizon) {
    AugmentedTensor tensor = seed();
    if (horizon >= 1) advance(tensor);
    return tensor;
}

AugmentedTensor TensorPropagator::propagate_step(const AugmentedTensor& tensor) {
    AugmentedTensor next = tensor;
    advance(next);
    return next;
}

// Memoryless case: the propagator couples the only retained point to the new one.
void TensorPropagator::advance_markovian(AugmentedTensor& tensor) {
    const std::size_t d = fanout_;
    std::vector<Complex> next(d);
    for (std::size_t xn = 0; xn < d; ++xn) {
        Complex s{};
        for (std::size_t xo = 0; xo < d; ++xo) {
            const Complex p = kernels::mul(propagator_[xn * d + xo], tensor.amplitudes[xo]);
            s = {s.real() + p.real(), s.imag() + p.imag()};
        }
        next[xn] = kernels::mul(s, self_interior_[xn]);
    }
    tensor.amplitudes = std::move(next);
    ++tensor.current_step;
}

void TensorPropagator::advance(AugmentedTensor& tensor) {
    if (dkmax_ == 0) {
        advance_markovian(tensor);
        return;
    }
    const std::size_t d = fanout_;
    const int n = tensor.current_step + 1;
    const std::uint64_t pmc = primary_memory_cost(dimension_, dkmax_);

    std::size_t blocks = 1;
    std::size_t stride = 0;
    std::size_t rows = 0;
    const std::vector<Complex>* table = nullptr;
    std::vector<Complex> growing_table;

    if (n <= dkmax_) {
        // Growing: the window gains x_n; nothing is summed out.
        const int prefix = tensor.window;  // x_0 … x_{n−1}
        std::vector<PairFactor> pairs{{prefix - 1, &propagator_}};
        for (int lag = 1; lag < n; ++lag)
            pairs.push_back({n - lag, &offdiag_[static_cast<std::size_t>(lag - 1)]});
        pairs.push_back({0, &initial_edge_[static_cast<std::size_t>(n - 1)]});
        allocate(growing_table, power(d, prefix + 1), pmc);
        build_table(prefix, self_interior_, pairs, growing_table);
        rows = power(d, prefix);
        table = &growing_table;
    } else {
        // Sliding: sum out the oldest point, which no later pair can reach.
        prepare_sliding_tables();
        rows = power(d, dkmax_);
        blocks = d;
        stride = rows;
        table = &step_table_;
    }

    if (scratch_.size() != rows * d) allocate(scratch_, rows * d, pmc);
    const std::size_t chunks = (rows + kRowChunk - 1) / kRowChunk;
    const auto chunk_count = static_cast<std::ptrdiff_t>(chunks);
    const Complex* src = tensor.amplitudes.data();
    Complex* dst = scratch_.data();
    const Complex* weights = table->data();
#pragma omp parallel for schedule(static) num_threads(threads_) if (rows > kParallelThreshold)
    for (std::ptrdiff_t c = 0; c < chunk_count; ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kRowChunk;
        const std::size_t end = std::min(rows, begin + kRowChunk);
        kernel_->contract_scale(src, blocks, stride, weights, d, dst, begin, end);
    }

    tensor.amplitudes.swap(scratch_);
    tensor.current_step = n;
    tensor.window = std::min(n, dkmax_) + 1;
    tensor.phase = n >= dkmax_ ? Phase::Sliding : Phase::Growing;
}

Matrix TensorPropagator::readout(const AugmentedTensor& tensor) {
    const int n = tensor.current_step;
    const int m = dimension_;
    if (n == 0 || dkmax_ == 0) {
        const std::vector<Complex>& weights = n == 0 ? std::vector<Complex>(fanout_, Complex{1.0, 0.0})
                                                     : self_terminal_ratio_;
        return reduce(tensor.amplitudes, weights);
    }
    if (n > dkmax_) {
        prepare_sliding_tables();
        return reduce(tensor.amplitudes, readout_table_);
    }
    // Growing window x_0 … x_n: x_0 is still coupled to the final point.
    const int prefix = tensor.window - 1;
    std::vector<PairFactor> pairs;
    for (int lag = 1; lag < n; ++lag)
        pairs.push_back({n - lag, &terminal_edge_ratio_[static_cast<std::size_t>(lag - 1)]});
    pairs.push_back({0, &terminal_initial_ratio_[static_cast<std::size_t>(n - 1)]});
    std::vector<Complex> weights;
    allocate(weights, tensor.amplitudes.size(), primary_memory_cost(m, dkmax_));
    build_table(prefix, self_terminal_ratio_, pairs, weights);
    return reduce(tensor.amplitudes, weights);
}

}  // namespace quapi::engine
