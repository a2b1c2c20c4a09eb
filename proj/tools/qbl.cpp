// qbl — simulate | steady-states | validate | spectrum for the six-site ring
// battery under non-secular Redfield dynamics

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "qbl/config.hpp"
#include "qbl/validate.hpp"

namespace fs = std::filesystem;

namespace {

qbl::RunConfig load_config(const std::string& path) {
    if (path.empty()) return qbl::RunConfig{};
    return qbl::parse_config(path);
}

std::vector<std::string> parse_region_list(const std::string& arg) {
    if (arg.empty()) return {};
    std::vector<std::string> out;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok != "I" && tok != "II" && tok != "III")
            throw std::runtime_error("--regions entries must be I, II or III; got '" + tok +
                                     "'");
        out.push_back(tok);
    }
    return out;
}

fs::path prepare_output_dir(const std::string& cli_out, const qbl::RunConfig& cfg) {
    const fs::path dir = qbl::resolve_output_dir(cli_out, cfg);
    fs::create_directories(dir);
    return dir;
}

int cmd_simulate(const qbl::RunConfig& cfg, const std::string& out_flag,
                 const std::string& regions_flag) {
    const fs::path dir = prepare_output_dir(out_flag, cfg);
    qbl::RegionSchedule schedule = cfg.schedule();
    const std::vector<std::string> wanted = parse_region_list(regions_flag);
    if (!wanted.empty()) {
        std::vector<qbl::RegionSpec> filtered;
        for (const auto& r : schedule.regions)
            if (std::find(wanted.begin(), wanted.end(), r.label) != wanted.end())
                filtered.push_back(r);
        if (filtered.empty()) throw std::runtime_error("--regions selected nothing");
        schedule.regions = std::move(filtered);
    }
    const qbl::ProtocolResult result = qbl::run_protocol(cfg.setup(), schedule);
    const fs::path csv = dir / "trajectory.csv";
    qbl::write_trajectory_csv(csv.string(), result.trajectory);
    if (cfg.output.emit_plot_script)
        qbl::write_plot_script((dir / "plot_trajectory.gp").string(), "trajectory.csv");
    std::cout << "wrote " << csv.string() << " (" << result.trajectory.samples.size()
              << " samples)\n";
    for (const auto& r : result.regions) {
        std::cout << "region " << std::setw(3) << std::left << r.label << " t = ["
                  << qbl::format_g12(r.t_begin) << ", " << qbl::format_g12(r.t_end) << "]";
        if (r.hit_cap) std::cout << "  (stopped at cap)";
        std::cout << '\n';
    }
    const auto& last = result.trajectory.samples.back();
    std::cout << "final: <N> = " << qbl::format_g12(last.n_expect)
              << ", energy = " << qbl::format_g12(last.energy) << " cm^-1\n";
    return 0;
}

int cmd_steady_states(const qbl::RunConfig& cfg, const std::string& out_flag) {
    const fs::path dir = prepare_output_dir(out_flag, cfg);
    if (cfg.model.gamma_sink > 0.0)
        std::cout << "note: sink disabled for sector analysis (it breaks number conservation)\n";
    const qbl::SystemSetup setup = cfg.setup();
    const qbl::Matrix h = qbl::build_hamiltonian(setup.model);
    const qbl::RedfieldGenerator gen = qbl::build_generator(
        h, qbl::make_environments(setup, setup.model.chi), qbl::SinkSpec{0.0, cfg.sink_site},
        cfg.toggles);
    const auto states = qbl::sector_steady_states(gen);
    for (const auto& s : states) {
        const qbl::Matrix full = s.full();
        const fs::path state_path = dir / ("sector_" + std::to_string(s.sector) + "_state.txt");
        qbl::write_matrix_text(state_path.string(), full);
        qbl::write_energetics(
            (dir / ("sector_" + std::to_string(s.sector) + "_energetics.txt")).string(),
            qbl::make_report(full, h));
    }
    std::cout << states.size() << " steady states (one per excitation sector)\n";
    return 0;
}

int cmd_validate(const qbl::RunConfig& cfg, bool quick) {
    const auto results = qbl::run_validation(cfg, quick);
    std::size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.name.size());
    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(int(width) + 2)
                  << r.name << std::fixed << std::setprecision(2) << r.seconds << " s";
        if (!r.pass) {
            std::cout << "  [" << r.detail << "]";
            ++failures;
        }
        std::cout << '\n';
    }
    std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
    return failures == 0 ? 0 : 1;
}

int cmd_spectrum(const qbl::RunConfig& cfg, const std::string& out_flag) {
    const fs::path dir = prepare_output_dir(out_flag, cfg);
    const qbl::Matrix h = qbl::build_hamiltonian(cfg.model);
    const qbl::EigenSystem es = qbl::eigh(h);
    const qbl::Matrix pi_op = qbl::symmetry_operator();
    const qbl::Matrix n_tot = qbl::number_operator();
    {
        std::ofstream out(dir / "spectrum_full.csv");
        out << "index,energy_cm1,pi_parity,n_expect\n";
        for (int k = 0; k < qbl::full_dim; ++k) {
            const qbl::Vector v = es.vectors.col(k);
            const double parity = (v.adjoint() * pi_op * v)(0).real();
            const double n = (v.adjoint() * n_tot * v)(0).real();
            out << k << ',' << qbl::format_g12(es.energies(k)) << ','
                << qbl::format_g12(parity) << ',' << qbl::format_g12(n) << '\n';
        }
    }
    {
        // single-excitation block, labelled by the Eq.-style swap symmetry
        std::vector<int> idx;
        for (int i = 1; i <= qbl::n_sites; ++i) idx.push_back(qbl::single_excitation_index(i));
        qbl::Matrix h1(qbl::n_sites, qbl::n_sites);
        for (int i = 0; i < qbl::n_sites; ++i)
            for (int j = 0; j < qbl::n_sites; ++j) h1(i, j) = h(idx[i], idx[j]);
        const qbl::EigenSystem e1 = qbl::eigh(h1);
        const qbl::Matrix pihat = qbl::single_excitation_symmetry();
        std::ofstream out(dir / "spectrum_single_excitation.csv");
        out << "index,energy_cm1,pihat_parity\n";
        for (int k = 0; k < qbl::n_sites; ++k) {
            const qbl::Vector v = e1.vectors.col(k);
            const double parity = (v.adjoint() * pihat * v)(0).real();
            out << k << ',' << qbl::format_g12(e1.energies(k)) << ','
                << qbl::format_g12(parity) << '\n';
        }
    }
    std::cout << "wrote " << (dir / "spectrum_full.csv").string() << " and "
              << (dir / "spectrum_single_excitation.csv").string() << '\n';
    std::cout << "E_min = " << qbl::format_g12(es.energies(0))
              << " cm^-1, E_max = " << qbl::format_g12(es.energies(qbl::full_dim - 1))
              << " cm^-1\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"six-site ring battery: non-secular Redfield dynamics and energetics"};
    app.require_subcommand(1);

    std::string config_path, out_dir, regions;
    bool quick = false;

    auto* simulate = app.add_subcommand("simulate", "run the three-region protocol");
    simulate->add_option("--config", config_path, "configuration file");
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_option("--regions", regions, "comma-separated subset, e.g. I,II");

    auto* steady = app.add_subcommand("steady-states", "per-sector steady states (sink off)");
    steady->add_option("--config", config_path, "configuration file");
    steady->add_option("--out", out_dir, "output directory");

    auto* validate = app.add_subcommand("validate", "run the self-validation suite");
    validate->add_option("--config", config_path, "configuration file");
    validate->add_flag("--quick", quick, "sub-second checks only");

    auto* spectrum = app.add_subcommand("spectrum", "Hamiltonian eigenvalues and parities");
    spectrum->add_option("--config", config_path, "configuration file");
    spectrum->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        const qbl::RunConfig cfg = load_config(config_path);
        if (simulate->parsed()) return cmd_simulate(cfg, out_dir, regions);
        if (steady->parsed()) return cmd_steady_states(cfg, out_dir);
        if (validate->parsed()) return cmd_validate(cfg, quick);
        if (spectrum->parsed()) return cmd_spectrum(cfg, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
