// generator.hpp — non-secular Redfield generator: one dissipator per
// environment, a Lindblad sink on the exit site, excitation-sector block
// structure and an optional secular-filtered variant.

#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "qbl/bath.hpp"
#include "qbl/operators.hpp"

namespace qbl {

struct Environment {
    Matrix coupling;  // Hermitian, site basis
    BathSpec bath;
    std::string label;
};

struct SinkSpec {
    double rate = 0.0;  // cm^-1
    int site = 4;
};

struct GeneratorOptions {
    bool include_lamb_shift = true;  // keep Im Gamma (Lamb-shift-like) terms
    bool secular = false;            // rotating-wave comparison mode
    double secular_tol = 1e-6;       // Bohr-frequency grouping width, cm^-1
};

struct EnvChannel {
    std::string label;
    BathSpec bath;
    Matrix s_site, s_eigen;            // coupling in site / H-eigenbasis
    Matrix lambda_site, lambda_eigen;  // filtered coupling (see build_generator)
    Matrix lambda_dag_site;
    bool active = false;  // false when the coupling vanishes (e.g. chi = 0)
};

// one kept term of the secular-filtered superoperator, eigenbasis indices
struct SecularTerm {
    int ab;  // a * dim + b  (row of the superoperator)
    int cd;  // c * dim + d
    cplx coeff;
};

struct RedfieldGenerator {
    int dim = 0;
    std::vector<int> basis;  // global computational-basis indices (0..63 for the full model)
    Matrix hamiltonian;      // restricted to `basis`
    EigenSystem eig;
    std::vector<EnvChannel> channels;
    SinkSpec sink;
    bool sink_enabled = false;
    Matrix sink_lower, sink_raise, sink_number;  // site basis
    GeneratorOptions options;
    bool channels_conserve_number = true;  // every coupling commutes with N
    bool number_conserving = true;         // above and the sink is off
    RealVector ergotropy_energies;  // full-model H spectrum, carried through restrictions
    std::vector<SecularTerm> secular_terms;  // populated when options.secular
};

namespace detail {

inline Matrix number_operator_on(const std::vector<int>& basis) {
    Matrix n = Matrix::Zero(basis.size(), basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) n(k, k) = excitation_count(basis[k]);
    return n;
}

inline bool commutes_with(const Matrix& s, const Matrix& n, double rel_tol = 1e-9) {
    const double scale = std::max(s.norm() * n.norm(), 1e-300);
    return comm(s, n).norm() <= rel_tol * scale;
}

// Lambda(a,b) = S(a,b) * conj(Gamma(E_a - E_b)) in the H-eigenbasis, the
// transform of the freely-evolving coupling against the environment
// correlation <B(0)B(tau)> (the conjugate of the standard series).  Dropping
// the imaginary part of Gamma removes the Lamb-shift-like terms.
inline Matrix filtered_coupling(const Matrix& s_eigen, const RealVector& energies,
                                const CorrelationSeries& series, TailMode tail,
                                bool include_lamb_shift) {
    const Eigen::Index d = energies.size();
    std::map<long long, cplx> cache;  // Gamma memoized on the quantized Bohr frequency
    Matrix lam(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            const double w = energies(a) - energies(b);
            const long long key = std::llround(w * 1e9);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, half_fourier(w, series, tail)).first;
            cplx g = std::conj(it->second);
            if (!include_lamb_shift) g = g.real();
            lam(a, b) = s_eigen(a, b) * g;
        }
    }
    return lam;
}

inline void build_secular_terms(RedfieldGenerator& g) {
    g.secular_terms.clear();
    const int d = g.dim;
    const RealVector& e = g.eig.energies;
    for (const auto& ch : g.channels) {
        if (!ch.active) continue;
        const Matrix& s = ch.s_eigen;
        const Matrix& lam = ch.lambda_eigen;
        const Matrix lam_s = lam * s;
        const Matrix s_lamdag = s * lam.adjoint();
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                const double w_ab = e(a) - e(b);
                for (int c = 0; c < d; ++c) {
                    for (int dd = 0; dd < d; ++dd) {
                        if (std::abs((e(c) - e(dd)) - w_ab) > g.options.secular_tol) continue;
                        cplx coeff = s(a, c) * lam(dd, b) + std::conj(lam(c, a)) * s(dd, b);
                        if (a == c) coeff -= lam_s(dd, b);
                        if (b == dd) coeff -= s_lamdag(a, c);
                        if (coeff != cplx(0.0, 0.0))
                            g.secular_terms.push_back({a * d + b, c * d + dd, coeff});
                    }
                }
            }
        }
    }
}

}  // namespace detail

inline RedfieldGenerator build_generator(const Matrix& h,
                                         const std::vector<Environment>& envs,
                                         SinkSpec sink, GeneratorOptions opt = {}) {
    require_hermitian(h, "build_generator: H");
    require(sink.rate >= 0.0, "sink rate must be >= 0");
    RedfieldGenerator g;
    g.dim = static_cast<int>(h.rows());
    g.basis.resize(g.dim);
    for (int k = 0; k < g.dim; ++k) g.basis[k] = k;
    g.hamiltonian = hermitize(h);
    g.eig = eigh(g.hamiltonian);
    g.ergotropy_energies = g.eig.energies;
    g.options = opt;
    g.sink = sink;
    g.sink_enabled = sink.rate > 0.0;
    if (g.sink_enabled) {
        require(g.dim == full_dim, "sink requires the full 64-dimensional model space");
        g.sink_lower = site_ladder(sink.site, Ladder::lowering);
        g.sink_raise = site_ladder(sink.site, Ladder::raising);
        g.sink_number = site_number(sink.site);
    }
    const Matrix n_op = detail::number_operator_on(g.basis);
    for (const auto& env : envs) {
        require_hermitian(env.coupling, "build_generator: coupling " + env.label);
        require(env.coupling.rows() == g.dim, "coupling dimension mismatch: " + env.label);
        EnvChannel ch;
        ch.label = env.label;
        ch.bath = env.bath;
        ch.s_site = hermitize(env.coupling);
        ch.active = ch.s_site.norm() > 0.0;
        ch.s_eigen = g.eig.vectors.adjoint() * ch.s_site * g.eig.vectors;
        if (ch.active) {
            const CorrelationSeries series = correlation_series(env.bath);
            ch.lambda_eigen = detail::filtered_coupling(ch.s_eigen, g.eig.energies, series,
                                                        env.bath.tail, opt.include_lamb_shift);
            ch.lambda_site = g.eig.vectors * ch.lambda_eigen * g.eig.vectors.adjoint();
            ensure_finite(ch.lambda_site, "build_generator: Lambda " + env.label);
        } else {
            env.bath.validate();
            ch.lambda_eigen = Matrix::Zero(g.dim, g.dim);
            ch.lambda_site = Matrix::Zero(g.dim, g.dim);
        }
        ch.lambda_dag_site = ch.lambda_site.adjoint();
        if (ch.active && !detail::commutes_with(ch.s_site, n_op))
            g.channels_conserve_number = false;
        g.channels.push_back(std::move(ch));
    }
    g.number_conserving = g.channels_conserve_number && !g.sink_enabled;
    if (opt.secular) detail::build_secular_terms(g);
    return g;
}

// d rho / dt.  Dissipator per channel: S rho Lam - rho Lam S + Lam^+ rho S - S Lam^+ rho;
// sink: rate * (s^- rho s^+ - {s^+ s^-, rho}/2).
inline Matrix apply(const RedfieldGenerator& g, const Matrix& rho) {
    if (!g.options.secular) {
        Matrix out = cplx(0.0, -1.0) * comm(g.hamiltonian, rho);
        for (const auto& ch : g.channels) {
            if (!ch.active) continue;
            const Matrix x = rho * ch.lambda_site;
            const Matrix y = ch.lambda_dag_site * rho;
            out += ch.s_site * x - x * ch.s_site + y * ch.s_site - ch.s_site * y;
        }
        if (g.sink_enabled) {
            const Matrix z = g.sink_lower * rho;
            out += g.sink.rate *
                   (z * g.sink_raise - 0.5 * anticomm(g.sink_number, rho));
        }
        return out;
    }
    // secular comparison path: eigenbasis, Bohr-frequency-filtered terms
    const Matrix& v = g.eig.vectors;
    const Matrix rho_e = v.adjoint() * rho * v;
    Matrix out_e = Matrix::Zero(g.dim, g.dim);
    for (int a = 0; a < g.dim; ++a)
        for (int b = 0; b < g.dim; ++b)
            out_e(a, b) = cplx(0.0, -(g.eig.energies(a) - g.eig.energies(b))) * rho_e(a, b);
    const cplx* rho_flat = rho_e.data();
    // Eigen stores column-major: entry (a,b) sits at b * dim + a
    for (const auto& t : g.secular_terms) {
        const int c = t.cd / g.dim, dd = t.cd % g.dim;
        const int a = t.ab / g.dim, b = t.ab % g.dim;
        out_e(a, b) += t.coeff * rho_flat[dd * g.dim + c];
    }
    if (g.sink_enabled) {
        const Matrix sm = v.adjoint() * g.sink_lower * v;
        const Matrix nm = v.adjoint() * g.sink_number * v;
        out_e += g.sink.rate * (sm * rho_e * sm.adjoint() - 0.5 * anticomm(nm, rho_e));
    }
    return v * out_e * v.adjoint();
}

// exact restriction to a subset of the computational basis (global indices);
// valid as an invariant subspace when the channels conserve N and the subset
// is a union of sectors closed downward under the sink.
inline RedfieldGenerator restrict_to(const RedfieldGenerator& g,
                                     const std::vector<int>& global_subset) {
    std::vector<int> pos;
    pos.reserve(global_subset.size());
    for (int gidx : global_subset) {
        auto it = std::find(g.basis.begin(), g.basis.end(), gidx);
        require(it != g.basis.end(), "restrict_to: index not in generator basis");
        pos.push_back(static_cast<int>(it - g.basis.begin()));
    }
    const auto sub = [&](const Matrix& m) {
        Matrix r(pos.size(), pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i)
            for (std::size_t j = 0; j < pos.size(); ++j) r(i, j) = m(pos[i], pos[j]);
        return r;
    };
    RedfieldGenerator r;
    r.dim = static_cast<int>(pos.size());
    r.basis = global_subset;
    r.hamiltonian = sub(g.hamiltonian);
    r.eig = eigh(r.hamiltonian);
    r.options = g.options;
    r.sink = g.sink;
    r.sink_enabled = g.sink_enabled;
    if (g.sink_enabled) {
        r.sink_lower = sub(g.sink_lower);
        r.sink_raise = sub(g.sink_raise);
        r.sink_number = sub(g.sink_number);
    }
    for (const auto& ch : g.channels) {
        EnvChannel c;
        c.label = ch.label;
        c.bath = ch.bath;
        c.active = ch.active;
        c.s_site = sub(ch.s_site);
        c.lambda_site = sub(ch.lambda_site);
        c.lambda_dag_site = c.lambda_site.adjoint();
        c.s_eigen = r.eig.vectors.adjoint() * c.s_site * r.eig.vectors;
        c.lambda_eigen = r.eig.vectors.adjoint() * c.lambda_site * r.eig.vectors;
        r.channels.push_back(std::move(c));
    }
    r.channels_conserve_number = g.channels_conserve_number;
    r.number_conserving = g.number_conserving;
    r.ergotropy_energies = g.ergotropy_energies;
    if (r.options.secular) detail::build_secular_terms(r);
    return r;
}

// explicit superoperator on gen.basis, column-stacking convention
// vec(A X B) = (B^T (x) A) vec(X)
inline Matrix liouvillian_matrix(const RedfieldGenerator& g) {
    const Eigen::Index d = g.dim;
    const Matrix id = Matrix::Identity(d, d);
    const cplx mi(0.0, -1.0);
    Matrix l = mi * (Eigen::kroneckerProduct(id, g.hamiltonian) -
                     Eigen::kroneckerProduct(g.hamiltonian.transpose(), id));
    for (const auto& ch : g.channels) {
        if (!ch.active) continue;
        const Matrix& s = ch.s_site;
        const Matrix& lam = ch.lambda_site;
        l += Eigen::kroneckerProduct(lam.transpose(), s).eval();
        l -= Eigen::kroneckerProduct((lam * s).transpose(), id).eval();
        l += Eigen::kroneckerProduct(s.transpose(), lam.adjoint()).eval();
        l -= Eigen::kroneckerProduct(id, s * lam.adjoint()).eval();
    }
    if (g.sink_enabled) {
        l += g.sink.rate * Eigen::kroneckerProduct(g.sink_lower.conjugate(), g.sink_lower).eval();
        l -= 0.5 * g.sink.rate * Eigen::kroneckerProduct(id, g.sink_number).eval();
        l -= 0.5 * g.sink.rate * Eigen::kroneckerProduct(g.sink_number.transpose(), id).eval();
    }
    return l;
}

struct SectorBlock {
    int sector = 0;
    std::vector<int> indices;  // global basis indices spanning the sector
    Matrix super;              // d^2 x d^2 block generator
};

// restriction of the generator to the seven diagonal excitation-sector blocks;
// requires a number-conserving generator (sink off)
inline std::vector<SectorBlock> sector_blocks(const RedfieldGenerator& g) {
    require(!g.sink_enabled, "sector_blocks: sink breaks number conservation");
    require(g.channels_conserve_number,
            "sector_blocks: a coupling does not conserve the excitation number");
    std::vector<SectorBlock> blocks;
    for (int n = 0; n <= n_sites; ++n) {
        SectorBlock blk;
        blk.sector = n;
        for (int gidx : g.basis)
            if (excitation_count(gidx) == n) blk.indices.push_back(gidx);
        if (blk.indices.empty()) continue;
        blk.super = liouvillian_matrix(restrict_to(g, blk.indices));
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

}  // namespace qbl
