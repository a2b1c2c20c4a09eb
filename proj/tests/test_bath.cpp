#include "test_support.hpp"

using namespace qbl;

namespace {
BathSpec site_bath() { return BathSpec{}; }  // lambda 35, cutoff 106, 300 K
BathSpec probe_bath() {
    BathSpec b;
    b.lambda = 10.0;
    return b;
}
}  // namespace

TEST_CASE("spectral density: J(wc) = lambda, odd, zero at zero") {
    const BathSpec b = site_bath();
    REQUIRE(near_abs(spectral_density(b.cutoff, b), 35.0, 1e-13));
    REQUIRE(spectral_density(0.0, b) == 0.0);
    for (int k = 1; k <= 100; ++k) {
        const double w = 13.7 * k;
        REQUIRE(near_abs(spectral_density(-w, b), -spectral_density(w, b), 1e-13));
    }
}

TEST_CASE("rate: zero-frequency limit, golden values, detailed balance, positivity") {
    const BathSpec b = site_bath();
    REQUIRE(near_rel(rate_gamma(0.0, b), 137.69557358490565, 1e-12));
    REQUIRE(near_rel(rate_gamma(106.0, b), 87.82417874391084, 1e-12));
    REQUIRE(near_rel(rate_gamma(0.0, b),
                     2.0 * b.lambda * k_boltzmann_cm * b.temperature / b.cutoff, 1e-12));
    for (const BathSpec& spec : {site_bath(), probe_bath()}) {
        for (int k = 1; k <= 100; ++k) {
            const double w = 20.0 * k;
            REQUIRE(near_rel(rate_gamma(-w, spec),
                             std::exp(-spec.beta() * w) * rate_gamma(w, spec), 1e-10));
        }
    }
    for (int k = -100; k <= 100; ++k) REQUIRE(rate_gamma(20.0 * k, b) >= 0.0);
}

TEST_CASE("correlation function: Im C(0), monotone modulus, domain guard") {
    const BathSpec b = site_bath();
    const CorrelationSeries s = correlation_series(b);
    REQUIRE(near_abs(correlation_function(0.0, s).imag(), -3710.0, 1e-9));
    double prev = std::abs(correlation_function(0.0, s));
    for (int k = 1; k <= 50; ++k) {
        const double tau = (10.0 / b.cutoff) * k / 50.0;
        const double cur = std::abs(correlation_function(tau, s));
        REQUIRE(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
    REQUIRE_THROWS_AS(correlation_function(-1e-3, s), std::invalid_argument);
}

TEST_CASE("truncation audit: reported bound dominates the dropped tail") {
    BathSpec small = site_bath();
    small.matsubara_terms = 50;
    BathSpec big = site_bath();
    big.matsubara_terms = 6000;
    const CorrelationSeries ss = correlation_series(small);
    const CorrelationSeries sb = correlation_series(big);
    REQUIRE(ss.terms_used == 50);
    REQUIRE(ss.first_omitted > 0.0);
    for (double tau : {3e-4, 1e-3, 3e-3, 1e-2, 0.1}) {
        const double diff = std::abs(correlation_function(tau, ss) - correlation_function(tau, sb));
        REQUIRE(diff <= truncation_bound(tau, ss));
    }
    // the bound decays below tail_tol beyond a finite horizon
    REQUIRE(truncation_bound(0.5, ss) < small.tail_tol);
    REQUIRE(std::isinf(truncation_bound(0.0, ss)));
}

TEST_CASE("half-Fourier transform: golden values (independent mpmath oracle)") {
    const BathSpec b = site_bath();
    REQUIRE(near_c(half_fourier(0.0, b), cplx(137.69557358490604, -35.0), 1e-10));
    REQUIRE(near_c(half_fourier(50.0, b), cplx(126.67836830052843, 23.433492053758172), 1e-10));
    REQUIRE(near_c(half_fourier(-200.0, b), cplx(17.99489962414838, -63.743783639627104), 1e-10));
    REQUIRE(near_c(half_fourier(106.0, b), cplx(87.82417874391072, 50.03396282397667), 1e-10));
    REQUIRE(near_c(half_fourier(50.0, probe_bath()),
                   cplx(36.19381951443675, 6.6952834439308955), 1e-10));
}

TEST_CASE("half-Fourier transform: two-path identity Re Gamma(w) = gamma(w)") {
    const BathSpec b = site_bath();
    for (int k = -10; k <= 9; ++k) {
        const double w = 25.0 * k + 12.5;
        REQUIRE(near_rel(half_fourier(w, b).real(), rate_gamma(w, b), 1e-12));
    }
    REQUIRE(near_rel(half_fourier(0.0, b).real(), rate_gamma(0.0, b), 1e-12));
}

TEST_CASE("half-Fourier transform: independent of matsubara_terms in analytic mode") {
    BathSpec a = site_bath();
    for (double w : {0.0, 50.0, -137.0, 412.0}) {
        BathSpec d = a;
        d.matsubara_terms = 2 * a.matsubara_terms;
        BathSpec tiny = a;
        tiny.matsubara_terms = 7;
        const cplx g = half_fourier(w, a);
        REQUIRE(std::abs(half_fourier(w, d) - g) <= 1e-10 * std::abs(g));
        REQUIRE(std::abs(half_fourier(w, tiny) - g) <= 1e-10 * std::abs(g));
    }
}

TEST_CASE("half-Fourier transform: quadrature of the truncated series matches") {
    BathSpec b = site_bath();
    b.matsubara_terms = 500;
    b.tail = TailMode::truncated;
    const CorrelationSeries s = correlation_series(b);
    for (double w : {0.0, 50.0, -50.0, 200.0, -200.0}) {
        const auto integrand = [&](double tau) {
            return correlation_function(tau, s) * std::exp(cplx(0.0, w * tau));
        };
        const cplx quad = oracle::integrate_scalar(integrand, 0.0, 0.6, 1e-10);
        REQUIRE(near_c(quad, half_fourier(w, s, TailMode::truncated), 1e-6));
    }
}

TEST_CASE("matsubara resonance nu_n = wc is rejected with perturbation guidance") {
    BathSpec b = site_bath();
    b.cutoff = 2.0 * pi / b.beta();  // exactly nu_1
    try {
        b.validate();
        FAIL("resonant cutoff accepted");
    } catch (const std::domain_error& e) {
        REQUIRE(std::string(e.what()).find("perturb") != std::string::npos);
    }
    BathSpec near_res = site_bath();
    near_res.cutoff = (2.0 * pi / near_res.beta()) * (1.0 + 1e-6);  // outside the guard
    REQUIRE_NOTHROW(near_res.validate());
    BathSpec bad = site_bath();
    bad.lambda = -1.0;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("complex digamma against frozen mpmath values") {
    using qbl::detail::digamma;
    REQUIRE(near_c(digamma(cplx(1001.0, 0.0)), cplx(6.9082551956488121, 0.0), 1e-13));
    REQUIRE(near_c(digamma(cplx(1000.919, 0.0)), cplx(6.908174232857914, 0.0), 1e-13));
    REQUIRE(near_c(digamma(cplx(1001.0, -0.5)),
                   cplx(6.908255320523859, -0.00049975004172911457), 1e-13));
    REQUIRE(near_c(digamma(cplx(12.5, 3.25)),
                   cplx(2.5205318560926607, 0.26435260481893151), 1e-13));
    REQUIRE(near_c(digamma(cplx(1.5, -2.0)),
                   cplx(0.79983375817295368, -1.1001971357298587), 1e-13));
    REQUIRE_THROWS_AS(digamma(cplx(-1.0, 0.5)), std::domain_error);
}
