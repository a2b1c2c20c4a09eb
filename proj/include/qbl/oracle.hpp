// oracle.hpp — independent slow-path evaluations used to cross-check the
// eigenbasis fast path: direct quadrature of the dissipator integral and the
// exact coherent propagator

#pragma once

#include <functional>

#include "qbl/generator.hpp"

namespace qbl::oracle {

// adaptive Simpson on a matrix-valued integrand, Frobenius-norm error control
namespace detail {

inline Matrix simpson_recurse(const std::function<Matrix(double)>& f, double a, double b,
                              const Matrix& fa, const Matrix& fm, const Matrix& fb,
                              const Matrix& whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Matrix flm = f(lm), frm = f(rm);
    const Matrix left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Matrix right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Matrix sum = left + right;
    if (depth <= 0) return sum;
    if ((sum - whole).norm() <= 15.0 * tol) return sum + (sum - whole) / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline Matrix integrate_matrix(const std::function<Matrix(double)>& f, double a, double b,
                               double tol, int max_depth = 40) {
    const Matrix fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const Matrix whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

inline cplx integrate_scalar(const std::function<cplx(double)>& f, double a, double b,
                             double tol) {
    const auto wrap = [&](double t) {
        Matrix m(1, 1);
        m(0, 0) = f(t);
        return m;
    };
    return integrate_matrix(wrap, a, b, tol)(0, 0);
}

// S(-tau) = e^{-iH tau} S e^{iH tau} evaluated in the eigenbasis
inline Matrix freely_evolved_coupling(const EigenSystem& eig, const Matrix& s_eigen,
                                      double tau) {
    const Eigen::Index d = eig.energies.size();
    Matrix m(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            m(a, b) = s_eigen(a, b) * std::exp(cplx(0.0, (eig.energies(b) - eig.energies(a)) * tau));
    return eig.vectors * m * eig.vectors.adjoint();
}

// time beyond which the dissipator integrand tail is below `tail` relative to
// the slowest decay channel
inline double quadrature_horizon(const CorrelationSeries& series, double tail = 1e-12) {
    double a_min = series.exponents.front();
    double c_total = 0.0;
    for (std::size_t k = 0; k < series.exponents.size(); ++k) {
        a_min = std::min(a_min, series.exponents[k]);
        c_total += std::abs(series.coefficients[k]);
    }
    return std::log(std::max(c_total / (tail * a_min), 10.0)) / a_min;
}

// direct evaluation of one environment's dissipator,
//   Int_0^taumax [S, rho S(-tau)] conj(C(tau)) dtau + h.c.,
// against the same correlation series the generator was built from
inline Matrix dissipator_quadrature(const EigenSystem& eig, const Matrix& s_site,
                                    const Matrix& rho, const CorrelationSeries& series,
                                    double tol = 1e-9) {
    const Matrix s_eigen = eig.vectors.adjoint() * s_site * eig.vectors;
    const auto integrand = [&](double tau) {
        const Matrix s_tau = freely_evolved_coupling(eig, s_eigen, tau);
        const Matrix x = rho * s_tau;
        return std::conj(correlation_function(tau, series)) * (s_site * x - x * s_site);
    };
    const double horizon = quadrature_horizon(series);
    const Matrix half = integrate_matrix(integrand, 0.0, horizon, tol);
    return half + half.adjoint();
}

// rho(t) = e^{-iHt} rho0 e^{iHt}
inline Matrix exact_propagator_state(const EigenSystem& eig, const Matrix& rho0, double t) {
    const Eigen::Index d = eig.energies.size();
    Vector phase(d);
    for (Eigen::Index k = 0; k < d; ++k) phase(k) = std::exp(cplx(0.0, -eig.energies(k) * t));
    const Matrix u = eig.vectors * phase.asDiagonal() * eig.vectors.adjoint();
    return u * rho0 * u.adjoint();
}

// seeded random Hermitian unit-trace state (positive by construction)
inline Matrix random_density_matrix(int dim, unsigned seed) {
    std::srand(seed);
    Matrix a = Matrix::Random(dim, dim);  // uses std::rand under the hood
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    return rho;
}

}  // namespace qbl::oracle
