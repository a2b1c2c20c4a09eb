// observables.hpp — site populations, energy, excitation number, purity,
// ergotropy / passive state, and the single-excitation projection

#pragma once

#include <algorithm>
#include <array>
#include <numeric>

#include "qbl/operators.hpp"

namespace qbl {

// Tr[s_i^+ s_i^- rho] for i = 1..6 (full 64-dim rho)
inline std::array<double, 6> populations(const Matrix& rho) {
    require(rho.rows() == full_dim, "populations: expected the 64-dim state");
    std::array<double, 6> p{};
    for (int i = 1; i <= n_sites; ++i) {
        const int m = site_mask(i);
        double acc = 0.0;
        for (int b = 0; b < full_dim; ++b)
            if (b & m) acc += rho(b, b).real();
        p[i - 1] = acc;
    }
    return p;
}

inline double average_energy(const Matrix& rho, const Matrix& h) {
    const cplx e = (h * rho).trace();
    if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real())))
        throw std::runtime_error("average_energy: imaginary residue " +
                                 std::to_string(e.imag()) + " (corrupted state)");
    return e.real();
}

inline double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

inline double excitation_number(const Matrix& rho) {
    double acc = 0.0;
    for (int b = 0; b < static_cast<int>(rho.rows()); ++b)
        acc += excitation_count(b) * rho(b, b).real();
    return acc;
}

// <i|rho|j> over the six one-excitation basis states
inline Matrix project_single_excitation(const Matrix& rho) {
    require(rho.rows() == full_dim, "project_single_excitation: expected the 64-dim state");
    Matrix m(n_sites, n_sites);
    for (int i = 1; i <= n_sites; ++i)
        for (int j = 1; j <= n_sites; ++j)
            m(i - 1, j - 1) = rho(single_excitation_index(i), single_excitation_index(j));
    return m;
}

struct ErgotropyResult {
    double work = 0.0;            // cm^-1
    Matrix passive_state;         // commutes with H, populations non-increasing in energy
    double clamped_weight = 0.0;  // total negative rho-eigenvalue mass clamped to zero
};

namespace detail {

// deterministic ordering inside degenerate H-eigenspaces: ascending index of
// the dominant computational-basis component (W itself is unaffected)
inline std::vector<int> degeneracy_tiebroken_order(const EigenSystem& es,
                                                   double tol = 1e-9) {
    const int d = static_cast<int>(es.energies.size());
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    const double scale = std::max(std::abs(es.energies(0)), std::abs(es.energies(d - 1))) + 1.0;
    auto dominant = [&](int col) {
        int best = 0;
        double mag = 0.0;
        for (int r = 0; r < d; ++r)
            if (std::abs(es.vectors(r, col)) > mag + 1e-12) {
                mag = std::abs(es.vectors(r, col));
                best = r;
            }
        return best;
    };
    int lo = 0;
    while (lo < d) {
        int hi = lo + 1;
        while (hi < d && es.energies(hi) - es.energies(lo) <= tol * scale) ++hi;
        std::sort(order.begin() + lo, order.begin() + hi,
                  [&](int a, int b) { return dominant(a) < dominant(b); });
        lo = hi;
    }
    return order;
}

}  // namespace detail

// W = Tr[H rho] - sum_j r_j^down e_j^up: descending rho-spectrum paired with the
// ascending H-spectrum.  Negative rho-eigenvalues (Redfield transients) are
// clamped to zero with renormalization inside this routine only.
inline ErgotropyResult ergotropy(const Matrix& rho, const Matrix& h) {
    require(rho.rows() == h.rows(), "ergotropy: dimension mismatch");
    const EigenSystem hs = eigh(h);
    Eigen::SelfAdjointEigenSolver<Matrix> rs(hermitize(rho));
    RealVector r = rs.eigenvalues();  // ascending
    ErgotropyResult out;
    for (Eigen::Index k = 0; k < r.size(); ++k)
        if (r(k) < 0.0) {
            out.clamped_weight += -r(k);
            r(k) = 0.0;
        }
    const double total = r.sum();
    if (total > 0.0) r /= total;
    const double energy = average_energy(rho, h);
    const std::vector<int> horder = detail::degeneracy_tiebroken_order(hs);
    const int d = static_cast<int>(r.size());
    double passive_energy = 0.0;
    Matrix passive = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        const double weight = r(d - 1 - j);  // descending rho-spectrum
        const int col = horder[j];           // ascending H-spectrum
        passive_energy += weight * hs.energies(col);
        passive += weight * (hs.vectors.col(col) * hs.vectors.col(col).adjoint());
    }
    out.work = energy - passive_energy;
    out.passive_state = std::move(passive);
    return out;
}

struct EnergeticsReport {
    double energy = 0.0;          // Tr[H rho], cm^-1
    double ergotropy = 0.0;       // cm^-1
    double passive_energy = 0.0;  // energy - ergotropy
    std::array<double, 6> populations{};
    double n_expect = 0.0;
    double purity = 0.0;
};

inline EnergeticsReport make_report(const Matrix& rho, const Matrix& h) {
    EnergeticsReport rep;
    rep.energy = average_energy(rho, h);
    rep.ergotropy = ergotropy(rho, h).work;
    rep.passive_energy = rep.energy - rep.ergotropy;
    rep.populations = populations(rho);
    rep.n_expect = excitation_number(rho);
    rep.purity = purity(rho);
    return rep;
}

}  // namespace qbl
