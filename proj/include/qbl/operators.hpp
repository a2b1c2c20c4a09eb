// operators.hpp — ladder/number operators on the six-spin composite space,
// Hermitian eigendecomposition and unitary exponentials

#pragma once

#include <bit>
#include <vector>

#include "qbl/core.hpp"

namespace qbl {

inline constexpr int n_sites = 6;
inline constexpr int full_dim = 64;

enum class Ladder { raising, lowering };

// Basis convention: bit (n_sites - i) of the basis index encodes the occupancy
// of site i, i.e. site 1 is the leftmost tensor factor / most significant bit.
inline int site_mask(int site) {
    require(site >= 1 && site <= n_sites,
            "site index must be in 1.." + std::to_string(n_sites) + ", got " +
                std::to_string(site));
    return 1 << (n_sites - site);
}

inline int excitation_count(int basis_index) {
    return std::popcount(static_cast<unsigned>(basis_index));
}

// basis index of the state with only `site` excited
inline int single_excitation_index(int site) { return site_mask(site); }

inline Matrix site_ladder(int site, Ladder kind) {
    const int m = site_mask(site);
    Matrix op = Matrix::Zero(full_dim, full_dim);
    for (int b = 0; b < full_dim; ++b) {
        if (b & m) {
            if (kind == Ladder::lowering)
                op(b ^ m, b) = 1.0;
            else
                op(b, b ^ m) = 1.0;
        }
    }
    return op;
}

inline Matrix site_number(int site) {
    const int m = site_mask(site);
    Matrix op = Matrix::Zero(full_dim, full_dim);
    for (int b = 0; b < full_dim; ++b)
        if (b & m) op(b, b) = 1.0;
    return op;
}

// N = sum_i sigma_i^+ sigma_i^-; diagonal entry = number of excited sites
inline Matrix number_operator() {
    Matrix op = Matrix::Zero(full_dim, full_dim);
    for (int b = 0; b < full_dim; ++b) op(b, b) = excitation_count(b);
    return op;
}

// basis indices of the n-excitation sector, ascending
inline std::vector<int> sector_indices(int n) {
    require(n >= 0 && n <= n_sites, "sector must be in 0..6");
    std::vector<int> idx;
    for (int b = 0; b < full_dim; ++b)
        if (excitation_count(b) == n) idx.push_back(b);
    return idx;
}

struct EigenSystem {
    RealVector energies;  // ascending, cm^-1
    Matrix vectors;       // unitary; column a is the eigenvector of energies[a]
};

inline EigenSystem eigh(const Matrix& a) {
    require_hermitian(a, "eigh");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(a));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigendecomposition failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// exp(i * s * G) for Hermitian G, computed in G's eigenbasis
inline Matrix unitary_exp(const Matrix& g, double s) {
    const EigenSystem es = eigh(g);
    Vector phases(es.energies.size());
    for (Eigen::Index k = 0; k < es.energies.size(); ++k)
        phases(k) = std::exp(cplx(0.0, s * es.energies(k)));
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

}  // namespace qbl
