// validate.hpp — the self-validation suite behind `qbl validate`: module
// invariants plus the quadrature and propagator oracles

#pragma once

#include <chrono>
#include <functional>

#include "qbl/config.hpp"
#include "qbl/oracle.hpp"

namespace qbl {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

class CheckRunner {
  public:
    explicit CheckRunner(bool quick) : quick_(quick) {}

    // body returns a detail string; empty string means pass, otherwise failure
    void add(const std::string& name, bool quick_only_matters,
             const std::function<std::string()>& body) {
        if (quick_ && !quick_only_matters) return;
        CheckResult r;
        r.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const std::string fail = body();
            r.pass = fail.empty();
            r.detail = fail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results_.push_back(std::move(r));
    }

    std::vector<CheckResult> take() { return std::move(results_); }

  private:
    bool quick_;
    std::vector<CheckResult> results_;
};

inline std::string check_le(double value, double bound, const std::string& what) {
    if (value <= bound) return "";
    std::ostringstream os;
    os << what << " = " << value << " exceeds " << bound;
    return os.str();
}

}  // namespace detail

inline std::vector<CheckResult> run_validation(const RunConfig& cfg, bool quick) {
    detail::CheckRunner run(quick);
    const ModelParams& mp = cfg.model;
    const Matrix h = build_hamiltonian(mp);
    const Vector ds = dark_state();
    const Matrix rho_dark = ds * ds.adjoint();
    const Matrix n_tot = number_operator();

    // ---- operator algebra ----
    run.add("hilbert: ladder nilpotency and anticommutation", true, [&] {
        const Matrix sm = site_ladder(1, Ladder::lowering);
        const Matrix sp = site_ladder(1, Ladder::raising);
        std::string r = detail::check_le((sm * sm).norm(), 1e-14, "||(s1-)^2||");
        if (!r.empty()) return r;
        return detail::check_le((sp * sm + sm * sp - Matrix::Identity(full_dim, full_dim)).norm(),
                                1e-14, "anticommutator deviation");
    });
    run.add("hilbert: Tr N = 192 and on-site commutators", true, [&] {
        if (std::abs(n_tot.trace().real() - 192.0) > 1e-12) return std::string("Tr N != 192");
        for (int i = 1; i <= n_sites; ++i)
            for (int j = i + 1; j <= n_sites; ++j) {
                const std::string r = detail::check_le(
                    comm(site_number(i), site_number(j)).norm(), 1e-14, "[n_i, n_j]");
                if (!r.empty()) return r;
            }
        return std::string();
    });
    run.add("hilbert: eigh reconstruction and unitary_exp", true, [&] {
        const EigenSystem es = eigh(h);
        const Matrix rebuilt =
            es.vectors * es.energies.cast<cplx>().asDiagonal() * es.vectors.adjoint();
        std::string r = detail::check_le((rebuilt - h).norm(), 1e-10, "eigh reconstruction");
        if (!r.empty()) return r;
        const Matrix u = unitary_exp(h, 0.37);
        return detail::check_le((u.adjoint() * u - Matrix::Identity(full_dim, full_dim)).norm(),
                                1e-10, "||U+U - I||");
    });

    // ---- model ----
    run.add("model: dark state is an H-eigenstate at 140", true, [&] {
        return detail::check_le((h * ds - 140.0 * ds).norm(), 1e-10, "||H|DS> - 140|DS>||");
    });
    run.add("model: H conserves N", true, [&] {
        return detail::check_le(comm(h, n_tot).norm(), 1e-12, "||[H,N]||");
    });
    run.add("model: symmetry operator commutes with H and is unitary", true, [&] {
        const Matrix pi_op = symmetry_operator();
        std::string r = detail::check_le(comm(h, pi_op).norm(), 1e-9, "||[H,Pi]||");
        if (!r.empty()) return r;
        return detail::check_le(
            (pi_op.adjoint() * pi_op - Matrix::Identity(full_dim, full_dim)).norm(), 1e-10,
            "||Pi+Pi - I||");
    });
    run.add("model: single-excitation symmetry squares to identity, flips dark state", true,
            [&] {
                const Matrix ph = single_excitation_symmetry();
                std::string r = detail::check_le(
                    (ph * ph - Matrix::Identity(n_sites, n_sites)).norm(), 1e-14, "||Pi^2 - I||");
                if (!r.empty()) return r;
                Vector d6(n_sites);
                for (int i = 1; i <= n_sites; ++i) d6(i - 1) = ds(single_excitation_index(i));
                return detail::check_le((ph * d6 + d6).norm(), 1e-14, "||Pihat|DS> + |DS>||");
            });
    run.add("model: couplings conserve N; S1 annihilates the dark state", true, [&] {
        for (auto which : {CouplingSite::bath1, CouplingSite::bath4, CouplingSite::probe}) {
            const Matrix s = coupling_operator(which, mp);
            const std::string r = detail::check_le(comm(s, n_tot).norm(), 1e-12, "||[S,N]||");
            if (!r.empty()) return r;
        }
        return detail::check_le((coupling_operator(CouplingSite::bath1, mp) * ds).norm(),
                                1e-14, "||S1|DS>||");
    });

    // ---- bath statistics ----
    run.add("bath: detailed balance on a 100-point grid", true, [&] {
        for (const BathSpec* b : {&cfg.bath1, &cfg.probe_bath}) {
            for (int k = 1; k <= 100; ++k) {
                const double w = 20.0 * k;
                const double lhs = rate_gamma(-w, *b);
                const double rhs = std::exp(-b->beta() * w) * rate_gamma(w, *b);
                if (std::abs(lhs - rhs) > 1e-10 * std::abs(rhs))
                    return "KMS violated at w = " + std::to_string(w);
            }
        }
        return std::string();
    });
    run.add("bath: gamma(0) limit and positivity", true, [&] {
        const double g0 = rate_gamma(0.0, cfg.bath1);
        const double expected =
            2.0 * cfg.bath1.lambda * k_boltzmann_cm * cfg.bath1.temperature / cfg.bath1.cutoff;
        if (std::abs(g0 - expected) > 1e-10 * expected)
            return "gamma(0) = " + std::to_string(g0) + " != " + std::to_string(expected);
        for (int k = -100; k <= 100; ++k)
            if (rate_gamma(20.0 * k, cfg.bath1) < 0.0)
                return "negative rate at w = " + std::to_string(20.0 * k);
        return std::string();
    });
    run.add("bath: two-path consistency Re Gamma(w) = gamma(w)", true, [&] {
        for (int k = -10; k <= 9; ++k) {
            const double w = 25.0 * k + 12.5;
            const cplx g = half_fourier(w, cfg.bath1);
            const double rate = rate_gamma(w, cfg.bath1);
            if (std::abs(g.real() - rate) > 1e-8 * std::abs(rate))
                return "mismatch at w = " + std::to_string(w) + ": Re Gamma = " +
                       std::to_string(g.real()) + ", gamma = " + std::to_string(rate);
        }
        return std::string();
    });
    run.add("bath: Gamma stable under doubling matsubara_terms", true, [&] {
        BathSpec doubled = cfg.bath1;
        doubled.matsubara_terms *= 2;
        const cplx a = half_fourier(50.0, cfg.bath1);
        const cplx b = half_fourier(50.0, doubled);
        return detail::check_le(std::abs(a - b) / std::abs(a), 1e-10, "relative change");
    });
    run.add("bath: |C| non-increasing, Im C(0) = -lambda*wc", true, [&] {
        const CorrelationSeries s = correlation_series(cfg.bath1);
        const cplx c0 = correlation_function(0.0, s);
        if (std::abs(c0.imag() + cfg.bath1.lambda * cfg.bath1.cutoff) > 1e-9)
            return "Im C(0) = " + std::to_string(c0.imag());
        double prev = std::abs(c0);
        for (int k = 1; k <= 50; ++k) {
            const double tau = 10.0 / cfg.bath1.cutoff * k / 50.0;
            const double cur = std::abs(correlation_function(tau, s));
            if (cur > prev * (1.0 + 1e-12))
                return "|C| grows at tau = " + std::to_string(tau);
            prev = cur;
        }
        return std::string();
    });
    run.add("bath: truncation bound audits the dropped tail", true, [&] {
        BathSpec small = cfg.bath1;
        small.matsubara_terms = 50;
        BathSpec big = cfg.bath1;
        big.matsubara_terms = 4000;
        const CorrelationSeries ss = correlation_series(small);
        const CorrelationSeries sb = correlation_series(big);
        for (double tau : {5e-4, 1e-3, 5e-3, 1e-2}) {
            const double diff =
                std::abs(correlation_function(tau, ss) - correlation_function(tau, sb));
            if (diff > truncation_bound(tau, ss))
                return "bound violated at tau = " + std::to_string(tau);
        }
        return std::string();
    });
    run.add("bath: Matsubara resonance is rejected with guidance", true, [&] {
        BathSpec bad = cfg.bath1;
        bad.cutoff = 2.0 * pi / bad.beta();  // exactly nu_1
        try {
            bad.validate();
        } catch (const std::domain_error& e) {
            return std::string(e.what()).find("perturb") != std::string::npos
                       ? std::string()
                       : std::string("rejection lacks guidance: ") + e.what();
        }
        return std::string("resonant cutoff was not rejected");
    });

    // ---- generator ----
    const SystemSetup setup = cfg.setup();
    run.add("generator: trace annihilation, hermiticity, N conservation", true, [&] {
        const RedfieldGenerator gen =
            build_generator(h, make_environments(setup, mp.chi), SinkSpec{0.0, 4}, cfg.toggles);
        const Matrix rho = oracle::random_density_matrix(full_dim, 11);
        const Matrix d = apply(gen, rho);
        std::string r = detail::check_le(std::abs(d.trace()), 1e-10, "|Tr L[rho]|");
        if (!r.empty()) return r;
        r = detail::check_le(herm_deviation(d), 1e-10, "hermiticity deviation");
        if (!r.empty()) return r;
        return detail::check_le(std::abs((n_tot * d).trace()), 1e-9, "|Tr N L[rho]|");
    });
    run.add("generator: region-I generator annihilates the dark state", true, [&] {
        const RedfieldGenerator gen =
            build_generator(h, make_environments(setup, 0.0), SinkSpec{0.0, 4}, cfg.toggles);
        return detail::check_le(apply(gen, rho_dark).norm(), 1e-9 * h.norm(),
                                "||L_I[rho_dark]||");
    });
    run.add("generator: dephasing probe conserves energy", true, [&] {
        ModelParams deph = mp;
        deph.probe_kind = ProbeKind::dephasing;
        SystemSetup s2 = setup;
        s2.model = deph;
        const RedfieldGenerator gen =
            build_generator(h, make_environments(s2, 1.0), SinkSpec{0.0, 4}, cfg.toggles);
        // only the probe channel: compare against a generator without it
        const RedfieldGenerator base = build_generator(
            h,
            {{coupling_operator(CouplingSite::bath1, deph), s2.bath1, "bath1"},
             {coupling_operator(CouplingSite::bath4, deph), s2.bath4, "bath4"}},
            SinkSpec{0.0, 4}, cfg.toggles);
        const Matrix rho = oracle::random_density_matrix(full_dim, 12);
        const cplx probe_part = (h * (apply(gen, rho) - apply(base, rho))).trace();
        return detail::check_le(std::abs(probe_part), 1e-9, "|Tr H R_probe[rho]|");
    });
    run.add("oracle: quadrature dissipator matches the eigenbasis path", false, [&] {
        SystemSetup trunc = setup;
        for (BathSpec* b : {&trunc.bath1, &trunc.bath4, &trunc.probe_bath}) {
            b->tail = TailMode::truncated;
            b->matsubara_terms = 2000;
        }
        const RedfieldGenerator gen =
            build_generator(h, make_environments(trunc, 1.0), SinkSpec{0.0, 4}, cfg.toggles);
        for (unsigned seed : {21u, 22u, 23u}) {
            const Matrix rho = oracle::random_density_matrix(full_dim, seed);
            const Matrix fast = apply(gen, rho) - cplx(0.0, -1.0) * comm(h, rho);
            Matrix slow = Matrix::Zero(full_dim, full_dim);
            for (const auto& ch : gen.channels) {
                if (!ch.active) continue;
                slow += oracle::dissipator_quadrature(gen.eig, ch.s_site, rho,
                                                      correlation_series(ch.bath), 1e-9);
            }
            const double rel = (fast - slow).norm() / slow.norm();
            if (rel > 1e-6)
                return "relative deviation " + std::to_string(rel) + " at seed " +
                       std::to_string(seed);
        }
        return std::string();
    });
    run.add("oracle: closed-system integration matches the exact propagator", false, [&] {
        const RedfieldGenerator gen = build_generator(h, {}, SinkSpec{0.0, 4}, cfg.toggles);
        const int i1 = single_excitation_index(1);
        Matrix rho0 = Matrix::Zero(full_dim, full_dim);
        rho0(i1, i1) = 1.0;
        IntegratorOptions opts;
        const Trajectory traj = integrate(gen, rho0, 0.0, 0.2, opts, 0.01);
        // compare populations against the exact propagator at each sample
        for (const auto& s : traj.samples) {
            const Matrix exact =
                oracle::exact_propagator_state(gen.eig, rho0, s.time_internal);
            const auto pops = populations(exact);
            for (int i = 0; i < 6; ++i)
                if (std::abs(pops[i] - s.populations[i]) > 1e-8)
                    return "population mismatch at t = " + std::to_string(s.time_internal);
        }
        return std::string();
    });
    run.add("evolve: seven sector steady states with the probe on", false, [&] {
        const RedfieldGenerator gen =
            build_generator(h, make_environments(setup, 1.0), SinkSpec{0.0, 4}, cfg.toggles);
        const auto states = sector_steady_states(gen);
        if (states.size() != 7)
            return "found " + std::to_string(states.size()) + " steady states";
        for (const auto& s : states)
            if (s.gap_ratio < 1e8)
                return "sector " + std::to_string(s.sector) + " gap ratio " +
                       std::to_string(s.gap_ratio);
        return std::string();
    });
    run.add("evolve: sink-only site-4 decay is exp(-Gamma t)", false, [&] {
        ModelParams flat = mp;
        flat.hopping = 0.0;
        const Matrix h0 = build_hamiltonian(flat);
        const RedfieldGenerator gen =
            build_generator(h0, {}, SinkSpec{mp.gamma_sink, 4}, cfg.toggles);
        const int i4 = single_excitation_index(4);
        Matrix rho0 = Matrix::Zero(full_dim, full_dim);
        rho0(i4, i4) = 1.0;
        IntegratorOptions opts;
        const Trajectory traj =
            integrate(gen, rho0, 0.0, 5.0 / mp.gamma_sink, opts, 1.0 / mp.gamma_sink);
        for (const auto& s : traj.samples) {
            const double expect = std::exp(-mp.gamma_sink * s.time_internal);
            if (std::abs(s.populations[3] - expect) > 1e-8)
                return "p4 deviates at t = " + std::to_string(s.time_internal);
        }
        return std::string();
    });

    // ---- observables ----
    run.add("observables: thermal and maximally mixed states are passive", true, [&] {
        const EigenSystem es = eigh(h);
        Vector boltz(full_dim);
        const double beta = cfg.bath1.beta();
        for (int k = 0; k < full_dim; ++k) boltz(k) = std::exp(-beta * es.energies(k));
        Matrix gibbs = es.vectors * boltz.asDiagonal() * es.vectors.adjoint();
        gibbs /= gibbs.trace();
        std::string r =
            detail::check_le(ergotropy(gibbs, h).work, 1e-10, "W(Gibbs)");
        if (!r.empty()) return r;
        const Matrix mixed = Matrix::Identity(full_dim, full_dim) / full_dim;
        return detail::check_le(ergotropy(mixed, h).work, 1e-10, "W(mixed)");
    });
    run.add("observables: dark-state ergotropy equals 140 - E_min", true, [&] {
        const EigenSystem es = eigh(h);
        const double w = ergotropy(rho_dark, h).work;
        const double expected = 140.0 - es.energies(0);
        return detail::check_le(std::abs(w - expected), 1e-8, "|W - (140 - E_min)|");
    });
    run.add("observables: population sum rule and linearity", true, [&] {
        const Matrix r1 = oracle::random_density_matrix(full_dim, 31);
        const Matrix r2 = oracle::random_density_matrix(full_dim, 32);
        const Matrix mix = 0.3 * r1 + 0.7 * r2;
        const auto p = populations(mix);
        const double sum = p[0] + p[1] + p[2] + p[3] + p[4] + p[5];
        std::string r =
            detail::check_le(std::abs(sum - excitation_number(mix)), 1e-9, "sum rule");
        if (!r.empty()) return r;
        const double lin = std::abs(average_energy(mix, h) - 0.3 * average_energy(r1, h) -
                                    0.7 * average_energy(r2, h));
        return detail::check_le(lin, 1e-10 * h.norm(), "energy linearity");
    });

    // ---- config ----
    run.add("config: serialize/parse round-trip", true, [&] {
        const RunConfig back = parse_config_text(serialize_config(cfg), "<roundtrip>");
        if (back.model.eps != cfg.model.eps || back.model.hopping != cfg.model.hopping ||
            back.model.chi != cfg.model.chi || back.bath1.lambda != cfg.bath1.lambda ||
            back.probe_bath.lambda != cfg.probe_bath.lambda ||
            back.protocol.sample_interval != cfg.protocol.sample_interval)
            return std::string("round-trip changed a value");
        return std::string();
    });

    return run.take();
}

}  // namespace qbl
