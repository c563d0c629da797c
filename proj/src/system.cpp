#include "quapi/system.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "quapi/errors.hpp"

namespace quapi::sys {

namespace {
constexpr double kHermitianTolerance = 1e-12;
constexpr double kTraceTolerance = 1e-12;
}  // namespace

double hermiticity_defect(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void SystemSpec::validate() const {
    const auto m = coordinates.size();
    if (m < 1) throw ValidationError("system.coordinates", "at least one basis state is required");
    if (!coordinates.allFinite())
        throw ValidationError("system.coordinates", "coordinates must be finite");
    if (hamiltonian.rows() != m || hamiltonian.cols() != m)
        throw ValidationError("system.hamiltonian", "must be an M×M matrix with M = number of coordinates");
    if (rho0.rows() != m || rho0.cols() != m)
        throw ValidationError("system.rho0", "must be an M×M matrix with M = number of coordinates");
    if (!hamiltonian.allFinite()) throw ValidationError("system.hamiltonian", "entries must be finite");
    if (!rho0.allFinite()) throw ValidationError("system.rho0", "entries must be finite");
    if (hermiticity_defect(hamiltonian) > kHermitianTolerance)
        throw ValidationError("system.hamiltonian", "not Hermitian within 1e-12");
    if (std::abs(rho0.trace() - Complex{1.0, 0.0}) > kTraceTolerance)
        throw ValidationError("system.rho0", "trace must equal 1 within 1e-12");
    if (hermiticity_defect(rho0) > kHermitianTolerance)
        throw ValidationError("system.rho0", "not Hermitian within 1e-12");
}

SystemSpec SystemSpec::driven_two_level(double rabi_frequency) {
    SystemSpec spec;
    spec.coordinates = RealVector::LinSpaced(2, 0.0, 1.0);
    spec.hamiltonian = Matrix::Zero(2, 2);
    spec.hamiltonian(0, 1) = spec.hamiltonian(1, 0) = 0.5 * rabi_frequency;
    spec.rho0 = Matrix::Zero(2, 2);
    spec.rho0(0, 0) = 1.0;
    return spec;
}

bool SystemSpec::operator==(const SystemSpec& other) const {
    return coordinates.size() == other.coordinates.size() && coordinates == other.coordinates &&
           hamiltonian.rows() == other.hamiltonian.rows() &&
           hamiltonian.cols() == other.hamiltonian.cols() && hamiltonian == other.hamiltonian &&
           rho0.rows() == other.rho0.rows() && rho0.cols() == other.rho0.cols() &&
           rho0 == other.rho0;
}

PropagatorPair short_time_propagator(const SystemSpec& spec, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("run.dt", "must be positive");
    if (hermiticity_defect(spec.hamiltonian) > kHermitianTolerance)
        throw ValidationError("system.hamiltonian", "not Hermitian within 1e-12");

    // Symmetrize so the solver sees an exactly Hermitian matrix.
    const Matrix h = 0.5 * (spec.hamiltonian + spec.hamiltonian.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw ValidationError("system.hamiltonian", "eigendecomposition failed");

    const Eigen::VectorXcd phases =
        (solver.eigenvalues().cast<Complex>() * Complex{0.0, -dt}).array().exp().matrix();
    PropagatorPair pair;
    pair.forward = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    pair.backward = pair.forward.adjoint();
    return pair;
}

}  // namespace quapi::sys
