#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "qbl/evolve.hpp"
#include "qbl/oracle.hpp"

inline bool near_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool near_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline bool near_c(qbl::cplx a, qbl::cplx b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

inline qbl::Matrix dark_density() {
    const qbl::Vector ds = qbl::dark_state();
    return ds * ds.adjoint();
}

// default three-environment generator at the given probe strength
inline qbl::RedfieldGenerator default_generator(double chi, double sink_rate,
                                                qbl::GeneratorOptions opt = {}) {
    const qbl::SystemSetup setup = qbl::default_setup();
    const qbl::Matrix h = qbl::build_hamiltonian(setup.model);
    return qbl::build_generator(h, qbl::make_environments(setup, chi),
                                qbl::SinkSpec{sink_rate, 4}, opt);
}
