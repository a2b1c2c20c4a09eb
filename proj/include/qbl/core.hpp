// core.hpp — shared aliases, unit constants and small matrix helpers

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qbl {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

// The one unit-bridging constant: energies live in cm^-1, temperatures in Kelvin.
inline constexpr double k_boltzmann_cm = 0.6950348;   // cm^-1 / K

// hbar = 1, energies in cm^-1, time in (cm^-1)^-1.  One internal time unit
// corresponds to 1/(2*pi*c) picoseconds.
inline constexpr double c_cm_per_ps = 0.0299792458;
inline constexpr double ps_per_internal_unit = 1.0 / (2.0 * pi * c_cm_per_ps);

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

inline Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix anticomm(const Matrix& a, const Matrix& b) { return a * b + b * a; }

inline double fro_norm(const Matrix& m) { return m.norm(); }

inline double herm_deviation(const Matrix& m) { return (m - m.adjoint()).norm(); }

inline void ensure_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) throw std::runtime_error(what + ": non-finite entries");
}

inline void require_hermitian(const Matrix& m, const std::string& what,
                              double rel_tol = 1e-10) {
    require(m.rows() == m.cols(), what + ": matrix must be square");
    const double scale = std::max(m.norm(), 1e-300);
    if (herm_deviation(m) > rel_tol * scale)
        throw std::invalid_argument(what + ": matrix is not Hermitian (deviation " +
                                    std::to_string(herm_deviation(m) / scale) +
                                    " relative)");
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace qbl
