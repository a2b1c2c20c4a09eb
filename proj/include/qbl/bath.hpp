// bath.hpp — Lorentz-Drude environment statistics: spectral density, Bose
// occupation rates, the Matsubara expansion of C(tau) and the one-sided
// transform Gamma(w) that feeds the Redfield dissipator.
//
// Spectral density convention: J(w) = 2 lambda w wc / (w^2 + wc^2), the
// normalization in which lambda is the reorganization energy,
// (1/pi) Int_0^inf J(w)/w dw = lambda.  Any other convention rescales every
// rate in the model.

#pragma once

#include <cmath>
#include <vector>

#include "qbl/core.hpp"

namespace qbl {

enum class TailMode {
    analytic,   // explicit terms plus the closed-form series remainder (digamma)
    truncated,  // literal truncated sum; pairs with a truncated C(tau) oracle
};

struct BathSpec {
    double lambda = 35.0;        // reorganization energy, cm^-1
    double cutoff = 106.0;       // Lorentz-Drude cutoff, cm^-1
    double temperature = 300.0;  // Kelvin
    int matsubara_terms = 1000;
    double tail_tol = 1e-10;
    TailMode tail = TailMode::analytic;

    double beta() const { return 1.0 / (k_boltzmann_cm * temperature); }

    // nu_n = 2 pi n / beta
    double matsubara_frequency(int n) const { return 2.0 * pi * n / beta(); }

    void validate() const {
        require(lambda > 0.0, "bath lambda must be > 0, got " + std::to_string(lambda));
        require(cutoff > 0.0, "bath cutoff must be > 0, got " + std::to_string(cutoff));
        require(temperature > 0.0,
                "bath temperature must be > 0, got " + std::to_string(temperature));
        require(matsubara_terms >= 1, "matsubara_terms must be >= 1");
        require(tail_tol > 0.0, "tail_tol must be > 0");
        // degenerate resonance nu_n = wc makes the Matsubara coefficient blow up
        const double x = beta() * cutoff / (2.0 * pi);
        const double n_near = std::round(x);
        if (n_near >= 1.0 && std::abs(x - n_near) < 1e-9 * std::max(x, 1.0))
            throw std::domain_error(
                "bath cutoff coincides with Matsubara frequency nu_" +
                std::to_string(static_cast<int>(n_near)) +
                " = 2 pi n / beta; perturb the cutoff by one part in 1e9");
        require(static_cast<double>(matsubara_terms) > x,
                "matsubara_terms must exceed beta*cutoff/(2 pi) = " + std::to_string(x));
    }
};

// J(w) = 2 lambda w wc / (w^2 + wc^2); odd in w
inline double spectral_density(double w, const BathSpec& b) {
    return 2.0 * b.lambda * w * b.cutoff / (w * w + b.cutoff * b.cutoff);
}

namespace detail {

// u / (exp(u) - 1), continuous through u = 0
inline double bose_kernel(double u) {
    if (u == 0.0) return 1.0;
    const double d = std::expm1(u);
    if (std::isinf(d)) return 0.0;
    return u / d;
}

}  // namespace detail

// gamma(w) = J(w) (n_B(w) + 1), with the analytic limit 2 lambda k_B T / wc at w = 0
inline double rate_gamma(double w, const BathSpec& b) {
    const double kbt = k_boltzmann_cm * b.temperature;
    // J(w)(n_B(w)+1) = 2 lambda wc / (w^2+wc^2) * (w + kbt * u/(e^u - 1)), u = beta w
    return 2.0 * b.lambda * b.cutoff / (w * w + b.cutoff * b.cutoff) *
           (w + kbt * detail::bose_kernel(b.beta() * w));
}

// C(tau) = sum_k c_k exp(-a_k tau): the cutoff pole plus Matsubara terms,
// truncated at matsubara_terms or when a term's tau=0 magnitude drops below
// tail_tol, whichever comes first.
struct CorrelationSeries {
    std::vector<double> exponents;   // a_k, cm^-1
    std::vector<cplx> coefficients;  // c_k, (cm^-1)^2
    double beta = 0.0;
    double lambda = 0.0;
    double cutoff = 0.0;
    double first_omitted = 0.0;  // |c| at tau = 0 of the first dropped term
    int terms_used = 0;          // Matsubara terms kept (excludes the cutoff pole)
    bool tol_converged = false;  // tail_tol cut the series before the cap
};

inline CorrelationSeries correlation_series(const BathSpec& b) {
    b.validate();
    CorrelationSeries s;
    s.beta = b.beta();
    s.lambda = b.lambda;
    s.cutoff = b.cutoff;
    const double bw = s.beta * b.cutoff;
    s.exponents.push_back(b.cutoff);
    s.coefficients.push_back(b.lambda * b.cutoff * cplx(1.0 / std::tan(0.5 * bw), -1.0));
    int n = 1;
    for (; n <= b.matsubara_terms; ++n) {
        const double nu = b.matsubara_frequency(n);
        const double c = 4.0 * b.lambda * b.cutoff / s.beta * nu /
                         (nu * nu - b.cutoff * b.cutoff);
        if (n > 1 && std::abs(c) < b.tail_tol) {  // keep at least one Matsubara term
            s.first_omitted = std::abs(c);
            s.tol_converged = true;
            break;
        }
        s.exponents.push_back(nu);
        s.coefficients.push_back(c);
    }
    s.terms_used = static_cast<int>(s.exponents.size()) - 1;
    if (!s.tol_converged) {
        const double nu = b.matsubara_frequency(s.terms_used + 1);
        s.first_omitted =
            std::abs(4.0 * b.lambda * b.cutoff / s.beta * nu / (nu * nu - b.cutoff * b.cutoff));
    }
    return s;
}

inline cplx correlation_function(double tau, const CorrelationSeries& s) {
    require(tau >= 0.0, "correlation_function requires tau >= 0");
    cplx acc = 0.0;
    for (std::size_t k = 0; k < s.exponents.size(); ++k) {
        const double decay = s.exponents[k] * tau;
        if (decay > 745.0) continue;  // exp underflows to zero
        acc += s.coefficients[k] * std::exp(-decay);
    }
    return acc;
}

inline cplx correlation_function(double tau, const BathSpec& b) {
    return correlation_function(tau, correlation_series(b));
}

// Rigorous bound on the dropped tail sum_{n>N} |c_n| e^{-nu_n tau}: beyond the
// cutoff the |c_n| decrease, and successive exponents differ by 2 pi / beta,
// so a geometric sum bounds the remainder.  Diverges (returns inf) at tau = 0,
// where the Drude series itself is log-divergent.
inline double truncation_bound(double tau, const CorrelationSeries& s) {
    require(tau >= 0.0, "truncation_bound requires tau >= 0");
    const double nu_next = 2.0 * pi * (s.terms_used + 1) / s.beta;
    const double spacing = 2.0 * pi / s.beta;
    const double ratio = std::exp(-spacing * tau);
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    return s.first_omitted * std::exp(-nu_next * tau) / (1.0 - ratio);
}

namespace detail {

// digamma for complex arguments with Re z > 0: recurrence up the real axis
// followed by the Stirling-type asymptotic series.
inline cplx digamma(cplx z) {
    if (!(z.real() > 0.0))
        throw std::domain_error("digamma: argument must have positive real part");
    cplx shift = 0.0;
    while (z.real() < 12.0) {
        shift -= 1.0 / z;
        z += 1.0;
    }
    // psi(z) ~ ln z - 1/(2z) - sum B_{2k} / (2k z^{2k})
    static constexpr double coeff[] = {
        1.0 / 12.0,   -1.0 / 120.0,    1.0 / 252.0, -1.0 / 240.0,
        1.0 / 132.0,  -691.0 / 32760.0, 1.0 / 12.0,
    };
    const cplx inv2 = 1.0 / (z * z);
    cplx term = inv2;
    cplx series = 0.0;
    for (double c : coeff) {
        series += c * term;
        term *= inv2;
    }
    return shift + std::log(z) - 0.5 / z - series;
}

}  // namespace detail

// Gamma(w) = Int_0^inf C(tau) e^{i w tau} dtau.  Each exponential contributes
// c_k / (a_k - i w); in analytic mode the infinite Matsubara remainder is added
// in closed form, so the result does not depend on matsubara_terms.
inline cplx half_fourier(double w, const CorrelationSeries& s, TailMode tail) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < s.exponents.size(); ++k)
        acc += s.coefficients[k] / cplx(s.exponents[k], -w);
    if (tail == TailMode::truncated) return acc;
    // remainder sum_{n>N} c_n/(nu_n - i w) via partial fractions and psi:
    // with x = beta wc / 2pi, z = -i beta w / 2pi, each term is
    // (lambda wc beta / pi^2) n / ((n-x)(n+x)(n+z)).
    const double x = s.beta * s.cutoff / (2.0 * pi);
    const cplx z(0.0, -s.beta * w / (2.0 * pi));
    const cplx A = 1.0 / (2.0 * (x + z));
    const cplx B = 1.0 / (2.0 * (z - x));
    const cplx C = -z / (z * z - x * x);  // -> 0 at w = 0
    const double pref = s.lambda * s.cutoff * s.beta / (pi * pi);
    const double base = s.terms_used + 1;
    acc -= pref * (A * detail::digamma(cplx(base - x, 0.0)) +
                   B * detail::digamma(cplx(base + x, 0.0)) +
                   C * detail::digamma(base + z));
    return acc;
}

inline cplx half_fourier(double w, const BathSpec& b) {
    return half_fourier(w, correlation_series(b), b.tail);
}

}  // namespace qbl
