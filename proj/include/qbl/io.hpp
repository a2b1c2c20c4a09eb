// io.hpp — plain-text complex matrix format, trajectory CSV and plot scripts

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbl/evolve.hpp"

namespace qbl {

// entries are written `a+bi` (or `a-bi`), whitespace separated, one row per line
inline std::string format_complex(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

inline cplx parse_complex(const std::string& tok, const std::string& where) {
    const auto fail = [&](const std::string& why) {
        throw std::runtime_error(where + ": bad complex entry '" + tok + "' (" + why + ")");
    };
    if (tok.empty()) fail("empty token");
    std::size_t split = std::string::npos;
    for (std::size_t k = 1; k < tok.size(); ++k) {
        const char c = tok[k];
        if ((c == '+' || c == '-') && tok[k - 1] != 'e' && tok[k - 1] != 'E')
            split = k;  // last sign not part of an exponent separates re and im
    }
    try {
        std::size_t used = 0;
        if (tok.back() == 'i' && split != std::string::npos) {
            const double re = std::stod(tok.substr(0, split), &used);
            if (used != split) fail("trailing characters in real part");
            const std::string imag_part = tok.substr(split, tok.size() - split - 1);
            const double im = std::stod(imag_part, &used);
            if (used != imag_part.size()) fail("trailing characters in imaginary part");
            return {re, im};
        }
        const double re = std::stod(tok, &used);
        if (used != tok.size()) fail("trailing characters");
        return {re, 0.0};
    } catch (const std::logic_error&) {
        fail("not a number");
    }
    return {};
}

inline void write_matrix_text(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_complex(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Matrix read_matrix_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<cplx>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<cplx> row;
        std::string tok;
        while (ls >> tok)
            row.push_back(parse_complex(tok, path + ":" + std::to_string(lineno)));
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": ragged row (expected " +
                                     std::to_string(rows.front().size()) + " entries)");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty matrix file");
    if (rows.size() != rows.front().size())
        throw std::runtime_error(path + ": matrix is not square (" +
                                 std::to_string(rows.size()) + " rows, " +
                                 std::to_string(rows.front().size()) + " columns)");
    Matrix m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    ensure_finite(m, path);
    return m;
}

// Hermiticity is validated on load (probe matrices, steady-state files)
inline Matrix read_hermitian_matrix(const std::string& path, int expected_dim) {
    Matrix m = read_matrix_text(path);
    if (m.rows() != expected_dim)
        throw std::runtime_error(path + ": expected a " + std::to_string(expected_dim) + "x" +
                                 std::to_string(expected_dim) + " matrix, got " +
                                 std::to_string(m.rows()));
    try {
        require_hermitian(m, path);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(e.what());
    }
    return m;
}

// ------------------------------ trajectory CSV ------------------------------

inline constexpr const char* trajectory_csv_header =
    "time_internal,time_ps,region,pop1,pop2,pop3,pop4,pop5,pop6,"
    "energy_cm1,ergotropy_cm1,n_expect,purity,trace_dev,min_eig";

inline std::string format_g12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << trajectory_csv_header << '\n';
    for (const auto& s : traj.samples) {
        out << format_g12(s.time_internal) << ',' << format_g12(s.time_ps) << ',' << s.region;
        for (double p : s.populations) out << ',' << format_g12(p);
        out << ',' << format_g12(s.energy) << ',' << format_g12(s.ergotropy) << ','
            << format_g12(s.n_expect) << ',' << format_g12(s.purity) << ','
            << format_g12(s.trace_dev) << ',' << format_g12(s.min_eig) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != trajectory_csv_header)
        throw std::runtime_error(path + ":1: unexpected trajectory header");
    Trajectory traj;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 15)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 15 columns, got " +
                                     std::to_string(cells.size()));
        const auto num = [&](int k) {
            try {
                return std::stod(cells[k]);
            } catch (const std::logic_error&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": bad number '" + cells[k] + "'");
            }
        };
        TrajectorySample s;
        s.time_internal = num(0);
        s.time_ps = num(1);
        s.region = cells[2];
        for (int i = 0; i < 6; ++i) s.populations[i] = num(3 + i);
        s.energy = num(9);
        s.ergotropy = num(10);
        s.n_expect = num(11);
        s.purity = num(12);
        s.trace_dev = num(13);
        s.min_eig = num(14);
        traj.samples.push_back(std::move(s));
    }
    return traj;
}

// gnuplot script reproducing the two-panel layout (site populations; energy)
inline void write_plot_script(const std::string& path, const std::string& csv_name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# gnuplot script; run:  gnuplot " << std::filesystem::path(path).filename().string()
        << "\n"
           "set terminal pngcairo size 1100,780\n"
           "set output 'trajectory.png'\n"
           "set datafile separator ','\n"
           "set multiplot layout 2,1\n"
           "set xlabel 'time (ps)'\n"
           "set ylabel 'site populations'\n"
           "set key outside right\n"
           "plot for [i=4:9] '"
        << csv_name
        << "' using 2:i with lines title sprintf('site %d', i-3)\n"
           "set ylabel 'energy (cm^{-1})'\n"
           "plot '"
        << csv_name
        << "' using 2:10 with lines title 'average energy', '' using 2:11 with lines title 'ergotropy'\n"
           "unset multiplot\n";
}

// ------------------------- energetics report (key = value) ------------------

inline void write_energetics(const std::string& path, const EnergeticsReport& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "energy_cm1 = " << format_g12(r.energy) << '\n'
        << "ergotropy_cm1 = " << format_g12(r.ergotropy) << '\n'
        << "passive_energy_cm1 = " << format_g12(r.passive_energy) << '\n';
    for (int i = 0; i < 6; ++i)
        out << "pop" << (i + 1) << " = " << format_g12(r.populations[i]) << '\n';
    out << "n_expect = " << format_g12(r.n_expect) << '\n'
        << "purity = " << format_g12(r.purity) << '\n';
}

inline EnergeticsReport read_energetics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    EnergeticsReport r;
    std::string key, eq;
    double val;
    while (in >> key >> eq >> val) {
        if (eq != "=") throw std::runtime_error(path + ": malformed line near '" + key + "'");
        if (key == "energy_cm1") r.energy = val;
        else if (key == "ergotropy_cm1") r.ergotropy = val;
        else if (key == "passive_energy_cm1") r.passive_energy = val;
        else if (key == "n_expect") r.n_expect = val;
        else if (key == "purity") r.purity = val;
        else if (key.rfind("pop", 0) == 0) r.populations[std::stoi(key.substr(3)) - 1] = val;
        else throw std::runtime_error(path + ": unknown key '" + key + "'");
    }
    return r;
}

}  // namespace qbl
