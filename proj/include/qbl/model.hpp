// model.hpp — six-site ring battery: Hamiltonian, dark state, environment
// coupling operators and the symmetry operators

#pragma once

#include <array>
#include <optional>

#include "qbl/operators.hpp"

namespace qbl {

enum class ProbeKind { number_conserving, dephasing, custom };

struct ModelParams {
    std::array<double, 6> eps{250.0, 200.0, 200.0, 0.0, 200.0, 200.0};  // on-site, cm^-1
    double hopping = -60.0;                                             // cm^-1
    double chi = 1.0;                                                   // probe strength, [0,1]
    double gamma_sink = 0.1;                                            // sink rate, cm^-1
    ProbeKind probe_kind = ProbeKind::number_conserving;
    std::optional<Matrix> custom_probe;  // 64x64 Hermitian, required for probe_kind::custom

    void validate() const {
        require(chi >= 0.0 && chi <= 1.0,
                "chi must lie in [0,1], got " + std::to_string(chi));
        require(gamma_sink >= 0.0,
                "gamma_sink must be >= 0, got " + std::to_string(gamma_sink));
        for (double e : eps)
            require(std::isfinite(e), "on-site energies must be finite");
        require(std::isfinite(hopping), "hopping must be finite");
    }
};

// H = sum_i eps_i n_i + t sum_<ij> (s_i^+ s_j^- + h.c.), ring adjacency 1-2-...-6-1
inline Matrix build_hamiltonian(const ModelParams& p) {
    p.validate();
    Matrix h = Matrix::Zero(full_dim, full_dim);
    for (int i = 1; i <= n_sites; ++i) h += p.eps[i - 1] * site_number(i);
    for (int i = 1; i <= n_sites; ++i) {
        const int j = i % n_sites + 1;
        const Matrix hop = site_ladder(i, Ladder::raising) * site_ladder(j, Ladder::lowering);
        h += p.hopping * (hop + hop.adjoint());
    }
    ensure_finite(h, "build_hamiltonian");
    return h;
}

// |DS> = (|5> + |6> - |2> - |3>)/2, the charged state of the battery
inline Vector dark_state() {
    Vector v = Vector::Zero(full_dim);
    v(single_excitation_index(5)) = 0.5;
    v(single_excitation_index(6)) = 0.5;
    v(single_excitation_index(2)) = -0.5;
    v(single_excitation_index(3)) = -0.5;
    return v;
}

enum class CouplingSite { bath1, bath4, probe };

// S_1 = n_1, S_4 = n_4, S_p = sqrt(chi)(n_2 + n_3); the dephasing variant uses
// sqrt(chi) * H/||H||_2 which is diagonal in the energy eigenbasis, and the
// custom variant takes a user-supplied Hermitian matrix.
inline Matrix coupling_operator(CouplingSite which, const ModelParams& p) {
    p.validate();
    switch (which) {
        case CouplingSite::bath1: return site_number(1);
        case CouplingSite::bath4: return site_number(4);
        case CouplingSite::probe: break;
    }
    const double root_chi = std::sqrt(p.chi);
    switch (p.probe_kind) {
        case ProbeKind::number_conserving:
            return root_chi * (site_number(2) + site_number(3));
        case ProbeKind::dephasing: {
            const Matrix h = build_hamiltonian(p);
            const EigenSystem es = eigh(h);
            const double norm2 = std::max(std::abs(es.energies(0)),
                                          std::abs(es.energies(es.energies.size() - 1)));
            return root_chi / norm2 * h;
        }
        case ProbeKind::custom: {
            require(p.custom_probe.has_value(),
                    "probe_kind is custom but no probe matrix was supplied");
            const Matrix& s = *p.custom_probe;
            require(s.rows() == full_dim && s.cols() == full_dim,
                    "custom probe matrix must be 64x64");
            require_hermitian(s, "custom probe matrix");
            return root_chi * s;
        }
    }
    throw std::logic_error("unreachable probe kind");
}

// Pi = exp[i pi (n_1 + n_4 + (s_2^+ s_6^- + s_3^+ s_5^- + h.c.))]
inline Matrix symmetry_operator() {
    Matrix g = site_number(1) + site_number(4);
    const Matrix chord26 = site_ladder(2, Ladder::raising) * site_ladder(6, Ladder::lowering);
    const Matrix chord35 = site_ladder(3, Ladder::raising) * site_ladder(5, Ladder::lowering);
    g += chord26 + chord26.adjoint() + chord35 + chord35.adjoint();
    return unitary_exp(g, pi);
}

// Pi-hat = |1><1| + |4><4| + (|2><6| + |3><5| + h.c.) on the one-excitation space
inline Matrix single_excitation_symmetry() {
    Matrix m = Matrix::Zero(n_sites, n_sites);
    m(0, 0) = 1.0;
    m(3, 3) = 1.0;
    m(1, 5) = m(5, 1) = 1.0;
    m(2, 4) = m(4, 2) = 1.0;
    return m;
}

}  // namespace qbl
