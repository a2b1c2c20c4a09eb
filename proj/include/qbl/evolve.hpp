// evolve.hpp — adaptive time integration, the three-region protocol, and
// steady states by long-time propagation or per-sector null spaces

#pragma once

#include <iostream>
#include <limits>
#include <optional>

#include "qbl/generator.hpp"
#include "qbl/model.hpp"
#include "qbl/observables.hpp"

namespace qbl {

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 1e-3;
    double min_step = 1e-13;
};

namespace detail {

// elementwise RMS of the embedded error against atol + rtol * |y|
inline double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1,
                         const IntegratorOptions& o) {
    double acc = 0.0;
    const Eigen::Index n = err.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double scale =
            o.atol + o.rtol * std::max(std::abs(y0.data()[k]), std::abs(y1.data()[k]));
        const double e = std::abs(err.data()[k]) / scale;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace detail

// Dormand-Prince 5(4) with step-size control; rho is re-symmetrized after each
// accepted step; the step size h carries across calls.
inline void propagate(const RedfieldGenerator& gen, Matrix& rho, double t_begin,
                      double t_end, const IntegratorOptions& opts, double& h) {
    double t = t_begin;
    const double t_eps = 1e-14 * std::max(1.0, std::abs(t_end));
    if (t_end - t <= t_eps) return;
    if (!(h > 0.0)) h = opts.initial_step;
    Matrix k1 = qbl::apply(gen, rho);
    Matrix stage(rho.rows(), rho.cols());
    while (t < t_end - t_eps) {
        const double h_step = std::min(h, t_end - t);
        stage = rho + h_step * (0.2 * k1);
        const Matrix k2 = qbl::apply(gen, stage);
        stage = rho + h_step * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2);
        const Matrix k3 = qbl::apply(gen, stage);
        stage = rho + h_step * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3);
        const Matrix k4 = qbl::apply(gen, stage);
        stage = rho + h_step * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4);
        const Matrix k5 = qbl::apply(gen, stage);
        stage = rho + h_step * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                5103.0 / 18656.0 * k5);
        const Matrix k6 = qbl::apply(gen, stage);
        const Matrix y5 = rho + h_step * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                                          125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                                          11.0 / 84.0 * k6);
        if (!y5.allFinite()) {
            h = 0.25 * h_step;
            if (h < opts.min_step)
                throw std::runtime_error("propagate: non-finite state at t = " +
                                         std::to_string(t));
            continue;
        }
        const Matrix k7 = qbl::apply(gen, y5);
        const Matrix y4 = rho + h_step * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                          393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                          187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
        const double err = detail::error_norm(y5 - y4, rho, y5, opts);
        if (err <= 1.0) {
            t += h_step;
            rho = hermitize(y5);
            k1 = qbl::apply(gen, rho);
            h = h_step * std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.3, 5.0);
        } else {
            h = h_step * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            if (h < opts.min_step)
                throw std::runtime_error(
                    "propagate: step size underflow (stiffness) at t = " + std::to_string(t) +
                    ", err = " + std::to_string(err));
        }
    }
}

// excitation sectors carrying weight in rho (full 64-dim), optionally closed
// downward (the sink only moves weight to lower sectors)
inline std::vector<int> support_basis(const Matrix& rho, bool close_downward,
                                      double tol = 1e-14) {
    require(rho.rows() == full_dim, "support_basis: expected the 64-dim state");
    std::array<bool, n_sites + 1> present{};
    for (int i = 0; i < full_dim; ++i)
        for (int j = 0; j < full_dim; ++j)
            if (std::abs(rho(i, j)) > tol) {
                present[excitation_count(i)] = true;
                present[excitation_count(j)] = true;
            }
    if (close_downward) {
        int top = 0;
        for (int n = 0; n <= n_sites; ++n)
            if (present[n]) top = n;
        for (int n = 0; n <= top; ++n) present[n] = true;
    }
    std::vector<int> basis;
    for (int b = 0; b < full_dim; ++b)
        if (present[excitation_count(b)]) basis.push_back(b);
    return basis;
}

// embeds a restricted state back into the full computational basis
inline Matrix embed_full(const Matrix& rho, const std::vector<int>& basis) {
    Matrix full = Matrix::Zero(full_dim, full_dim);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) full(basis[i], basis[j]) = rho(i, j);
    return full;
}

struct TrajectorySample {
    double time_internal = 0.0;
    double time_ps = 0.0;
    std::string region;
    std::array<double, 6> populations{};
    double energy = 0.0;
    double ergotropy = 0.0;
    double n_expect = 0.0;
    double purity = 0.0;
    double trace_dev = 0.0;
    double min_eig = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

namespace detail {

// observables of a (possibly sector-restricted) state; ergotropy pairs the
// clamped state spectrum, padded with zeros, against the full-model spectrum
inline TrajectorySample make_sample(double t, const std::string& region, const Matrix& rho,
                                    const RedfieldGenerator& gen) {
    TrajectorySample s;
    s.time_internal = t;
    s.time_ps = t * ps_per_internal_unit;
    s.region = region;
    for (std::size_t k = 0; k < gen.basis.size(); ++k) {
        const int b = gen.basis[k];
        const double pk = rho(k, k).real();
        for (int i = 1; i <= n_sites; ++i)
            if (b & site_mask(i)) s.populations[i - 1] += pk;
        s.n_expect += excitation_count(b) * pk;
    }
    s.energy = (gen.hamiltonian * rho).trace().real();
    s.purity = (rho * rho).trace().real();
    s.trace_dev = std::abs(rho.trace() - cplx(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho));
    s.min_eig = es.eigenvalues().minCoeff();
    RealVector r = es.eigenvalues().cwiseMax(0.0);
    const double total = r.sum();
    if (total > 0.0) r /= total;
    double passive = 0.0;
    for (Eigen::Index j = 0; j < r.size(); ++j)
        passive += r(r.size() - 1 - j) * gen.ergotropy_energies(j);
    s.ergotropy = s.energy - passive;
    return s;
}

inline void warn_if_negative(const Trajectory& traj, const std::string& where) {
    double worst = 0.0;
    for (const auto& s : traj.samples) worst = std::min(worst, s.min_eig);
    if (worst < -1e-6)
        std::cerr << "warning: " << where << ": min eigenvalue of rho reached " << worst
                  << " (Redfield transient negativity; not projected)\n";
}

// a live integration, restricted to the excitation-sector support of the
// initial state whenever the generator's symmetries allow it
struct RunState {
    const RedfieldGenerator* gen = nullptr;
    RedfieldGenerator reduced;  // owns the restriction when one is made
    bool is_reduced = false;
    Matrix rho;
    double t = 0.0;
    double h = 0.0;
    IntegratorOptions opts;

    RunState(const RedfieldGenerator& g, const Matrix& rho0, double t0,
             const IntegratorOptions& o)
        : gen(&g), rho(rho0), t(t0), opts(o) {
        require(rho0.rows() == g.dim, "state dimension does not match the generator");
        if (g.dim == full_dim && g.channels_conserve_number) {
            const std::vector<int> basis = support_basis(rho0, g.sink_enabled);
            if (basis.size() < static_cast<std::size_t>(full_dim)) {
                reduced = restrict_to(g, basis);
                gen = &reduced;
                is_reduced = true;
                Matrix r(basis.size(), basis.size());
                for (std::size_t i = 0; i < basis.size(); ++i)
                    for (std::size_t j = 0; j < basis.size(); ++j)
                        r(i, j) = rho0(basis[i], basis[j]);
                rho = std::move(r);
            }
        }
    }

    void advance(double t_next) {
        propagate(*gen, rho, t, t_next, opts, h);
        t = t_next;
    }

    double residual() const { return qbl::apply(*gen, rho).norm(); }

    TrajectorySample sample(const std::string& label) const {
        return make_sample(t, label, rho, *gen);
    }

    Matrix full_state() const { return is_reduced ? embed_full(rho, gen->basis) : rho; }
};

}  // namespace detail

// integrates rho0 over [t_begin, t_end], sampling every sample_interval and at
// the final time
inline Trajectory integrate(const RedfieldGenerator& gen, const Matrix& rho0,
                            double t_begin, double t_end, const IntegratorOptions& opts,
                            double sample_interval, const std::string& region_label = "") {
    require_hermitian(rho0, "integrate: rho0", 1e-8);
    require(std::abs(rho0.trace() - cplx(1.0, 0.0)) < 1e-8,
            "integrate: rho0 must have unit trace");
    require(sample_interval > 0.0, "integrate: sample_interval must be > 0");
    detail::RunState run(gen, rho0, t_begin, opts);
    Trajectory traj;
    traj.samples.push_back(run.sample(region_label));
    const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));
    while (run.t < t_end - t_eps) {
        run.advance(std::min(run.t + sample_interval, t_end));
        traj.samples.push_back(run.sample(region_label));
    }
    detail::warn_if_negative(traj, region_label.empty() ? "integrate"
                                                        : "region " + region_label);
    return traj;
}

struct SteadyStateOptions {
    double residual_tol = 0.0;  // absolute; 0 selects 1e-10 * ||H||_F of the generator
    double max_time = 500.0;
    double check_interval = 0.5;
    IntegratorOptions integ;
};

struct SteadyStateResult {
    Matrix rho;  // on `basis`
    std::vector<int> basis;
    double residual = 0.0;
    double time = 0.0;

    Matrix full() const {
        return basis.size() == full_dim ? rho : embed_full(rho, basis);
    }
};

// long-time propagation until ||L[rho]||_F <= residual_tol
inline SteadyStateResult steady_state(const RedfieldGenerator& gen, const Matrix& rho0,
                                      SteadyStateOptions opt = {}) {
    require_hermitian(rho0, "steady_state: rho0", 1e-8);
    double tol = opt.residual_tol;
    if (tol <= 0.0) tol = 1e-10 * gen.hamiltonian.norm();
    detail::RunState run(gen, rho0, 0.0, opt.integ);
    double interval = opt.check_interval;
    double res = run.residual();
    while (res > tol) {
        if (run.t >= opt.max_time)
            throw std::runtime_error("steady_state: no convergence by t = " +
                                     std::to_string(run.t) + ", residual " +
                                     std::to_string(res) + " > " + std::to_string(tol));
        run.advance(std::min(run.t + interval, opt.max_time));
        res = run.residual();
        interval = std::min(interval * 1.5, 20.0);
    }
    return {run.rho, run.gen->basis, res, run.t};
}

struct SectorSteadyState {
    int sector = 0;
    std::vector<int> indices;
    Matrix rho;              // block form, unit trace, Hermitian
    double gap_ratio = 0.0;  // second-smallest / smallest singular value

    Matrix full() const { return embed_full(rho, indices); }
};

// null space of each diagonal sector block; errors unless every sector has a
// one-dimensional null space (singular values below gap_tol * sigma_max)
inline std::vector<SectorSteadyState> sector_steady_states(const RedfieldGenerator& gen,
                                                           double gap_tol = 1e-8) {
    const auto blocks = sector_blocks(gen);
    std::vector<SectorSteadyState> out;
    for (const auto& blk : blocks) {
        SectorSteadyState s;
        s.sector = blk.sector;
        s.indices = blk.indices;
        const int d = static_cast<int>(blk.indices.size());
        if (d == 1) {  // one-dimensional sectors are trivially stationary
            s.rho = Matrix::Ones(1, 1);
            s.gap_ratio = std::numeric_limits<double>::infinity();
            out.push_back(std::move(s));
            continue;
        }
        Eigen::BDCSVD<Matrix> svd(blk.super, Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        const Eigen::Index last = sv.size() - 1;
        int null_dim = 0;
        for (Eigen::Index k = 0; k <= last; ++k)
            if (sv(k) <= gap_tol * sv(0)) ++null_dim;
        if (null_dim != 1)
            throw std::runtime_error("sector_steady_states: sector " +
                                     std::to_string(blk.sector) + " null-space dimension " +
                                     std::to_string(null_dim) + " != 1");
        s.gap_ratio = sv(last - 1) / std::max(sv(last), 1e-300);
        Vector v = svd.matrixV().col(last);
        Matrix rho = Eigen::Map<Matrix>(v.data(), d, d);  // column-stacking
        rho /= rho.trace();                               // fixes phase and scale
        rho = hermitize(rho);
        ensure_finite(rho, "sector steady state");
        s.rho = std::move(rho);
        out.push_back(std::move(s));
    }
    return out;
}

// ------------------------- three-region protocol ---------------------------

struct RegionSpec {
    std::string label;
    double chi = 0.0;
    bool sink_on = false;
    enum class Stop { fixed_duration, residual, n_threshold } stop = Stop::fixed_duration;
    double cap = 0.5;             // duration for fixed_duration, time cap otherwise
    double residual_rel = 1e-10;  // x ||H||_F, Stop::residual
    double n_threshold = 1e-4;    // Stop::n_threshold
};

struct RegionSchedule {
    std::vector<RegionSpec> regions;
    double sample_interval = 0.05;
    IntegratorOptions integ;
};

// I: charged battery holds (chi = 0, no sink).  II: probe on, run to the
// steady state.  III: probe and sink, drain until <N> drops below threshold.
inline RegionSchedule default_schedule(double chi = 1.0) {
    RegionSchedule s;
    s.regions.push_back({"I", 0.0, false, RegionSpec::Stop::fixed_duration, 0.5, 1e-10, 1e-4});
    s.regions.push_back({"II", chi, false, RegionSpec::Stop::residual, 50.0, 1e-10, 1e-4});
    s.regions.push_back({"III", chi, true, RegionSpec::Stop::n_threshold, 500.0, 1e-10, 1e-4});
    return s;
}

struct SystemSetup {
    ModelParams model;
    BathSpec bath1;
    BathSpec bath4;
    BathSpec probe_bath;
    GeneratorOptions toggles;
};

inline SystemSetup default_setup() {
    SystemSetup s;
    s.probe_bath.lambda = 10.0;
    return s;
}

inline std::vector<Environment> make_environments(const SystemSetup& setup, double chi) {
    ModelParams p = setup.model;
    p.chi = chi;
    return {{coupling_operator(CouplingSite::bath1, p), setup.bath1, "bath1"},
            {coupling_operator(CouplingSite::bath4, p), setup.bath4, "bath4"},
            {coupling_operator(CouplingSite::probe, p), setup.probe_bath, "probe"}};
}

struct RegionResult {
    std::string label;
    double t_begin = 0.0;
    double t_end = 0.0;
    Matrix rho_begin;  // full 64-dim embeddings
    Matrix rho_end;
    bool hit_cap = false;
    double final_residual = 0.0;
};

struct ProtocolResult {
    Trajectory trajectory;
    std::vector<RegionResult> regions;
};

// executes the regions in order, rebuilding the generator at each boundary and
// carrying rho continuously; the initial state defaults to the dark state
inline ProtocolResult run_protocol(const SystemSetup& setup, const RegionSchedule& schedule,
                                   std::optional<Matrix> rho_init = std::nullopt) {
    setup.model.validate();
    require(!schedule.regions.empty(), "run_protocol: empty region schedule");
    ProtocolResult result;
    const Vector ds = dark_state();
    Matrix rho = rho_init.value_or((ds * ds.adjoint()).eval());
    require_hermitian(rho, "run_protocol: initial state", 1e-8);
    const Matrix h = build_hamiltonian(setup.model);
    const double h_norm = h.norm();
    double t = 0.0;
    bool first_region = true;
    for (const auto& region : schedule.regions) {
        const SinkSpec sink{region.sink_on ? setup.model.gamma_sink : 0.0, 4};
        const RedfieldGenerator gen =
            build_generator(h, make_environments(setup, region.chi), sink, setup.toggles);
        detail::RunState run(gen, rho, t, schedule.integ);
        RegionResult rr;
        rr.label = region.label;
        rr.t_begin = t;
        rr.rho_begin = rho;
        if (first_region) {
            result.trajectory.samples.push_back(run.sample(region.label));
            first_region = false;
        }
        const double t_cap = t + region.cap;
        const double tol_res = region.residual_rel * h_norm;
        bool done = false;
        while (!done) {
            run.advance(std::min(run.t + schedule.sample_interval, t_cap));
            const TrajectorySample s = run.sample(region.label);
            result.trajectory.samples.push_back(s);
            switch (region.stop) {
                case RegionSpec::Stop::fixed_duration:
                    done = run.t >= t_cap - 1e-12;
                    break;
                case RegionSpec::Stop::residual:
                    rr.final_residual = run.residual();
                    done = rr.final_residual <= tol_res;
                    if (!done && run.t >= t_cap - 1e-12)
                        throw std::runtime_error(
                            "run_protocol: region " + region.label +
                            " did not reach the steady-state residual " +
                            std::to_string(tol_res) + " by its cap (residual " +
                            std::to_string(rr.final_residual) + ")");
                    break;
                case RegionSpec::Stop::n_threshold:
                    done = s.n_expect < region.n_threshold;
                    if (!done && run.t >= t_cap - 1e-12) {
                        rr.hit_cap = true;
                        done = true;
                    }
                    break;
            }
        }
        rho = run.full_state();
        t = run.t;
        rr.t_end = t;
        rr.rho_end = rho;
        result.regions.push_back(std::move(rr));
    }
    detail::warn_if_negative(result.trajectory, "run_protocol");
    return result;
}

}  // namespace qbl
