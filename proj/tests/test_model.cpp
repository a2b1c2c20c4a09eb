#include "test_support.hpp"

using namespace qbl;

TEST_CASE("parameter validation names the offending field") {
    ModelParams p;
    p.chi = 2.0;
    try {
        p.validate();
        FAIL("chi = 2 accepted");
    } catch (const std::invalid_argument& e) {
        REQUIRE(std::string(e.what()).find("chi") != std::string::npos);
    }
    p = ModelParams{};
    p.gamma_sink = -0.1;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("hamiltonian: defaults, on-site element, vacuum, dark-state eigenvalue") {
    const ModelParams p;
    REQUIRE(p.eps == std::array<double, 6>{250.0, 200.0, 200.0, 0.0, 200.0, 200.0});
    REQUIRE(p.hopping == -60.0);
    REQUIRE(p.gamma_sink == 0.1);

    const Matrix h = build_hamiltonian(p);
    REQUIRE(herm_deviation(h) <= 1e-14);
    const int i1 = single_excitation_index(1);
    REQUIRE(h(i1, i1).real() == 250.0);
    Vector vac = Vector::Zero(full_dim);
    vac(0) = 1.0;
    REQUIRE((h * vac).norm() == 0.0);

    const Vector ds = dark_state();
    REQUIRE(near_abs(ds.norm(), 1.0, 1e-12));
    REQUIRE((h * ds - 140.0 * ds).norm() <= 1e-10);
    REQUIRE(comm(h, number_operator()).norm() <= 1e-12);
}

TEST_CASE("dark state populations and site-1/4 vacancy") {
    const Matrix rho = dark_density();
    const auto p = populations(rho);
    REQUIRE(p[0] == 0.0);
    REQUIRE(p[3] == 0.0);
    for (int i : {1, 2, 4, 5}) REQUIRE(near_abs(p[i], 0.25, 1e-14));
}

TEST_CASE("single-excitation spectrum: 140 and 260 in the swap-odd sector, E_min golden") {
    const Matrix h = build_hamiltonian(ModelParams{});
    std::vector<int> idx;
    for (int i = 1; i <= n_sites; ++i) idx.push_back(single_excitation_index(i));
    Matrix h1(n_sites, n_sites);
    for (int i = 0; i < n_sites; ++i)
        for (int j = 0; j < n_sites; ++j) h1(i, j) = h(idx[i], idx[j]);
    const EigenSystem e1 = eigh(h1);
    bool has140 = false, has260 = false;
    for (int k = 0; k < n_sites; ++k) {
        if (near_abs(e1.energies(k), 140.0, 1e-9)) has140 = true;
        if (near_abs(e1.energies(k), 260.0, 1e-9)) has260 = true;
    }
    REQUIRE(has140);
    REQUIRE(has260);
    REQUIRE(near_abs(e1.energies.sum(), 1050.0, 1e-9));  // trace of the block
    REQUIRE(near_abs(e1.energies(0), -33.33080900428422, 1e-8));
    // the full 64-level minimum coincides with the single-excitation minimum
    const EigenSystem efull = eigh(h);
    REQUIRE(near_abs(efull.energies(0), -33.33080900428422, 1e-8));
}

TEST_CASE("coupling operators: dark-state annihilation, chi scaling, N conservation") {
    ModelParams p;
    const Vector ds = dark_state();
    REQUIRE((coupling_operator(CouplingSite::bath1, p) * ds).norm() == 0.0);
    REQUIRE((coupling_operator(CouplingSite::bath4, p) * ds).norm() == 0.0);

    p.chi = 0.0;
    REQUIRE(coupling_operator(CouplingSite::probe, p).norm() == 0.0);
    p.chi = 0.49;
    const Matrix sp = coupling_operator(CouplingSite::probe, p);
    REQUIRE(near_abs(sp.norm(), 0.7 * (site_number(2) + site_number(3)).norm(), 1e-12));

    p.chi = 1.0;
    const Matrix n = number_operator();
    for (auto w : {CouplingSite::bath1, CouplingSite::bath4, CouplingSite::probe})
        REQUIRE(comm(coupling_operator(w, p), n).norm() <= 1e-12);

    p.probe_kind = ProbeKind::custom;
    REQUIRE_THROWS_AS(coupling_operator(CouplingSite::probe, p), std::invalid_argument);

    p.probe_kind = ProbeKind::dephasing;
    const Matrix sd = coupling_operator(CouplingSite::probe, p);
    const Matrix h = build_hamiltonian(p);
    REQUIRE(comm(sd, h).norm() <= 1e-10);
    REQUIRE(comm(sd, n).norm() <= 1e-10);
}

TEST_CASE("many-body symmetry operator: unitary, commutes with H, acts as parity") {
    const Matrix pi_op = symmetry_operator();
    REQUIRE((pi_op.adjoint() * pi_op - Matrix::Identity(full_dim, full_dim)).norm() <= 1e-10);
    const Matrix h = build_hamiltonian(ModelParams{});
    REQUIRE(comm(h, pi_op).norm() <= 1e-9);

    // the exponential collapses to (-1)^N: even sectors +1, odd sectors -1
    Matrix parity = Matrix::Zero(full_dim, full_dim);
    for (int b = 0; b < full_dim; ++b)
        parity(b, b) = (excitation_count(b) % 2 == 0) ? 1.0 : -1.0;
    REQUIRE((pi_op - parity).norm() <= 1e-10);

    // hence its one-excitation restriction is -I, not the swap matrix: after
    // dividing out the largest entry's phase it is the identity
    Matrix restricted(n_sites, n_sites);
    for (int i = 1; i <= n_sites; ++i)
        for (int j = 1; j <= n_sites; ++j)
            restricted(i - 1, j - 1) =
                pi_op(single_excitation_index(i), single_excitation_index(j));
    REQUIRE((restricted + Matrix::Identity(n_sites, n_sites)).norm() <= 1e-12);
    Eigen::Index r = 0, c = 0;
    restricted.cwiseAbs().maxCoeff(&r, &c);
    const cplx phase = restricted(r, c) / std::abs(restricted(r, c));
    const Matrix normalized = restricted / phase;
    REQUIRE((normalized - Matrix::Identity(n_sites, n_sites)).norm() <= 1e-12);
    REQUIRE((normalized - single_excitation_symmetry()).norm() > 1.0);

    // symmetry survives arbitrary on-site energies (any N-conserving H)
    ModelParams skew;
    skew.eps = {313.0, 17.0, 150.0, 2.0, 99.0, 240.0};
    REQUIRE(comm(build_hamiltonian(skew), pi_op).norm() <= 1e-9);
}

TEST_CASE("single-excitation symmetry: involution, hermitian, flips the dark state") {
    const Matrix ph = single_excitation_symmetry();
    REQUIRE((ph * ph - Matrix::Identity(n_sites, n_sites)).norm() == 0.0);
    REQUIRE(herm_deviation(ph) == 0.0);
    const Vector ds = dark_state();
    Vector d6(n_sites);
    for (int i = 1; i <= n_sites; ++i) d6(i - 1) = ds(single_excitation_index(i));
    REQUIRE((ph * d6 + d6).norm() == 0.0);
}

TEST_CASE("custom probe accepts a valid Hermitian matrix and scales with chi") {
    ModelParams p;
    p.probe_kind = ProbeKind::custom;
    p.chi = 0.25;
    std::srand(9);
    Matrix s = Matrix::Random(full_dim, full_dim);
    s = (0.5 * (s + s.adjoint())).eval();
    p.custom_probe = s;
    const Matrix out = coupling_operator(CouplingSite::probe, p);
    REQUIRE((out - 0.5 * s).norm() <= 1e-12);
}
