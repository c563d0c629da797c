#include "quapi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "quapi/errors.hpp"

namespace quapi::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(fmt::format("config error at '{}': {}", where, what));
}

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json& object, const std::string& where,
                    std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : object.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail(join(where, key), "unknown key");
}

const json& require_object(const json& parent, const std::string& key, const std::string& where) {
    if (!parent.contains(key)) fail(join(where, key), "missing required object");
    const json& v = parent.at(key);
    if (!v.is_object()) fail(join(where, key), "expected an object");
    return v;
}

double as_double(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

double require_double(const json& parent, const std::string& key, const std::string& where) {
    if (!parent.contains(key)) fail(join(where, key), "missing required number");
    return as_double(parent.at(key), join(where, key));
}

std::int64_t as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<std::int64_t>();
}

int require_int(const json& parent, const std::string& key, const std::string& where) {
    if (!parent.contains(key)) fail(join(where, key), "missing required integer");
    const std::int64_t v = as_integer(parent.at(key), join(where, key));
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        fail(join(where, key), "integer out of range");
    return static_cast<int>(v);
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    return v.get<std::string>();
}

Complex as_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(where, "expected a complex number [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

Matrix as_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(v[0].is_array() ? v[0].size() : 0);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = v[static_cast<std::size_t>(r)];
        const std::string row_where = fmt::format("{}[{}]", where, r);
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            fail(row_where, fmt::format("expected a row of {} complex entries", cols));
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = as_complex(row[static_cast<std::size_t>(c)], fmt::format("{}[{}]", row_where, c));
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

sys::SystemSpec parse_system(const json& root) {
    const json& j = require_object(root, "system", "");
    reject_unknown(j, "system", {"coordinates", "hamiltonian", "rho0"});
    sys::SystemSpec spec;
    if (!j.contains("coordinates") || !j.at("coordinates").is_array() || j.at("coordinates").empty())
        fail("system.coordinates", "expected a non-empty array of numbers");
    const json& coords = j.at("coordinates");
    spec.coordinates.resize(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i)
        spec.coordinates[static_cast<Eigen::Index>(i)] =
            as_double(coords[i], fmt::format("system.coordinates[{}]", i));
    if (!j.contains("hamiltonian")) fail("system.hamiltonian", "missing required matrix");
    if (!j.contains("rho0")) fail("system.rho0", "missing required matrix");
    spec.hamiltonian = as_matrix(j.at("hamiltonian"), "system.hamiltonian");
    spec.rho0 = as_matrix(j.at("rho0"), "system.rho0");
    return spec;
}

void parse_bath(const json& root, Configuration& config) {
    const json& j = require_object(root, "bath", "");
    reject_unknown(j, "bath", {"spectral_density", "temperature", "thermal_rate"});
    const json& sd = require_object(j, "spectral_density", "bath");
    reject_unknown(sd, "bath.spectral_density", {"kind", "amplitude", "cutoff"});
    if (!sd.contains("kind")) fail("bath.spectral_density.kind", "missing required string");
    config.spectral_density.kind =
        bath::spectral_kind_from_string(as_string(sd.at("kind"), "bath.spectral_density.kind"));
    if (config.spectral_density.kind == bath::SpectralKind::Zero) {
        config.spectral_density.amplitude =
            sd.contains("amplitude") ? as_double(sd.at("amplitude"), "bath.spectral_density.amplitude") : 0.0;
        config.spectral_density.cutoff =
            sd.contains("cutoff") ? as_double(sd.at("cutoff"), "bath.spectral_density.cutoff") : 1.0;
    } else {
        config.spectral_density.amplitude = require_double(sd, "amplitude", "bath.spectral_density");
        config.spectral_density.cutoff = require_double(sd, "cutoff", "bath.spectral_density");
    }
    config.bath.temperature = require_double(j, "temperature", "bath");
    if (j.contains("thermal_rate")) config.bath.thermal_rate = as_double(j.at("thermal_rate"), "bath.thermal_rate");
}

void parse_quadrature(const json& root, Configuration& config) {
    if (!root.contains("quadrature")) return;
    const json& j = require_object(root, "quadrature", "");
    reject_unknown(j, "quadrature",
                   {"abs_tol", "rel_tol", "max_subdivisions", "cutoff_multiplier", "alpha_sampling"});
    QuadratureSpec& q = config.quadrature;
    if (j.contains("abs_tol")) q.abs_tol = as_double(j.at("abs_tol"), "quadrature.abs_tol");
    if (j.contains("rel_tol")) q.rel_tol = as_double(j.at("rel_tol"), "quadrature.rel_tol");
    if (j.contains("max_subdivisions")) q.max_subdivisions = require_int(j, "max_subdivisions", "quadrature");
    if (j.contains("cutoff_multiplier"))
        q.frequency_upper_cutoff_multiplier = as_double(j.at("cutoff_multiplier"), "quadrature.cutoff_multiplier");
    if (j.contains("alpha_sampling"))
        config.alpha_sampling =
            eta::alpha_sampling_from_string(as_string(j.at("alpha_sampling"), "quadrature.alpha_sampling"));
}

void parse_run(const json& root, Configuration& config) {
    const json& j = require_object(root, "run", "");
    reject_unknown(j, "run", {"dt", "steps", "dkmax", "mode", "threads", "output", "dump_eta",
                              "memory_budget", "kernel"});
    RunConfig& run = config.run;
    run.dt = require_double(j, "dt", "run");
    run.steps = require_int(j, "steps", "run");
    run.dkmax = require_int(j, "dkmax", "run");
    if (j.contains("mode")) run.mode = readout_mode_from_string(as_string(j.at("mode"), "run.mode"));
    if (j.contains("threads")) {
        const json& t = j.at("threads");
        if (t.is_string()) {
            if (t.get<std::string>() != "auto") fail("run.threads", "expected a positive integer or \"auto\"");
            run.threads = 0;
        } else {
            const std::int64_t v = as_integer(t, "run.threads");
            if (v < 1 || v > 4096) fail("run.threads", "expected a positive integer or \"auto\"");
            run.threads = static_cast<int>(v);
        }
    }
    if (j.contains("output")) run.output_path = as_string(j.at("output"), "run.output");
    if (j.contains("dump_eta") && !j.at("dump_eta").is_null())
        run.eta_dump_path = as_string(j.at("dump_eta"), "run.dump_eta");
    if (j.contains("memory_budget")) {
        const std::int64_t v = as_integer(j.at("memory_budget"), "run.memory_budget");
        if (v < 1) fail("run.memory_budget", "expected a positive byte count");
        run.memory_budget = static_cast<std::uint64_t>(v);
    }
    if (j.contains("kernel")) run.kernel = as_string(j.at("kernel"), "run.kernel");
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

void Configuration::validate() const {
    system.validate();
    spectral_density.validate();
    bath.validate();
    quadrature.validate();
    run.validate();
}

Configuration parse_config(std::string_view text, std::string_view source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // byte points one past the offending character
        const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(fmt::format("{}:{}:{}: JSON parse error: {}", source, line, column, e.what()));
    }
    if (!root.is_object()) fail("", "top level must be a JSON object");
    reject_unknown(root, "", {"system", "bath", "quadrature", "run"});

    Configuration config;
    config.system = parse_system(root);
    parse_bath(root, config);
    parse_quadrature(root, config);
    parse_run(root, config);
    config.validate();
    return config;
}

Configuration load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

json to_json(const Configuration& config) {
    json coords = json::array();
    for (Eigen::Index i = 0; i < config.system.coordinates.size(); ++i)
        coords.push_back(config.system.coordinates[i]);
    const RunConfig& run = config.run;
    json threads = run.threads > 0 ? json(run.threads) : json("auto");
    json dump = run.eta_dump_path ? json(*run.eta_dump_path) : json(nullptr);
    return json{
        {"system",
         {{"coordinates", coords},
          {"hamiltonian", matrix_to_json(config.system.hamiltonian)},
          {"rho0", matrix_to_json(config.system.rho0)}}},
        {"bath",
         {{"spectral_density",
           {{"kind", std::string(bath::to_string(config.spectral_density.kind))},
            {"amplitude", config.spectral_density.amplitude},
            {"cutoff", config.spectral_density.cutoff}}},
          {"temperature", config.bath.temperature},
          {"thermal_rate", config.bath.thermal_rate}}},
        {"quadrature",
         {{"abs_tol", config.quadrature.abs_tol},
          {"rel_tol", config.quadrature.rel_tol},
          {"max_subdivisions", config.quadrature.max_subdivisions},
          {"cutoff_multiplier", config.quadrature.frequency_upper_cutoff_multiplier},
          {"alpha_sampling", std::string(eta::to_string(config.alpha_sampling))}}},
        {"run",
         {{"dt", run.dt},
          {"steps", run.steps},
          {"dkmax", run.dkmax},
          {"mode", std::string(to_string(run.mode))},
          {"threads", threads},
          {"output", run.output_path},
          {"dump_eta", dump},
          {"memory_budget", run.memory_budget},
          {"kernel", run.kernel}}},
    };
}

void save_config(const Configuration& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_json(config).dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

Configuration qdot25k() {
    Configuration config;
    config.system = sys::SystemSpec::driven_two_level(std::numbers::pi / 8.0);
    config.spectral_density =
        bath::SpectralDensityModel::super_ohmic_gaussian(std::numbers::pi * 0.027, 2.2);
    config.bath.temperature = 25.0;
    config.run.dt = 0.1;
    config.run.steps = 50;
    config.run.dkmax = 4;
    config.run.mode = ReadoutMode::AllPoints;
    config.run.output_path = "qdot25K.csv";
    return config;
}

}  // namespace quapi::config
