#include "test_support.hpp"

using namespace qbl;

TEST_CASE("ladder operators: nilpotency, anticommutation, lowering action") {
    const Matrix sm = site_ladder(1, Ladder::lowering);
    const Matrix sp = site_ladder(1, Ladder::raising);
    REQUIRE((sm * sm).norm() == 0.0);
    REQUIRE((sp * sm + sm * sp - Matrix::Identity(full_dim, full_dim)).norm() == 0.0);

    Vector site1 = Vector::Zero(full_dim);
    site1(single_excitation_index(1)) = 1.0;
    const Vector lowered = sm * site1;
    REQUIRE(std::abs(lowered(0) - cplx(1.0, 0.0)) == 0.0);
    REQUIRE(lowered.norm() == 1.0);

    REQUIRE_THROWS_AS(site_ladder(0, Ladder::lowering), std::invalid_argument);
    REQUIRE_THROWS_AS(site_ladder(7, Ladder::raising), std::invalid_argument);
}

TEST_CASE("number operator: diagonal counts, trace 192") {
    const Matrix n = number_operator();
    Vector vac = Vector::Zero(full_dim);
    vac(0) = 1.0;
    REQUIRE((n * vac).norm() == 0.0);
    Vector all = Vector::Zero(full_dim);
    all(full_dim - 1) = 1.0;
    REQUIRE((n * all - 6.0 * all).norm() == 0.0);
    REQUIRE(n.trace().real() == 192.0);
}

TEST_CASE("on-site numbers commute pairwise; hopping conserves N") {
    const Matrix n = number_operator();
    for (int i = 1; i <= n_sites; ++i)
        for (int j = i + 1; j <= n_sites; ++j)
            REQUIRE(comm(site_number(i), site_number(j)).norm() == 0.0);
    for (int i = 1; i <= n_sites; ++i)
        for (int j = 1; j <= n_sites; ++j) {
            if (i == j) continue;
            const Matrix hop = site_ladder(i, Ladder::raising) * site_ladder(j, Ladder::lowering);
            REQUIRE(comm(n, hop + hop.adjoint()).norm() <= 1e-14);
        }
}

TEST_CASE("eigh: diagonal input, reconstruction, idempotence, rejection") {
    Matrix d = Matrix::Zero(4, 4);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 2.0;
    d(3, 3) = 0.5;
    const EigenSystem es = eigh(d);
    REQUIRE(es.energies(0) == -1.0);
    REQUIRE(es.energies(3) == 3.0);
    for (int k = 0; k < 4; ++k)  // permutation columns
        REQUIRE(near_abs(es.vectors.col(k).cwiseAbs().maxCoeff(), 1.0, 1e-14));

    const Matrix h = build_hamiltonian(ModelParams{});
    const EigenSystem hs = eigh(h);
    const Matrix rebuilt =
        hs.vectors * hs.energies.cast<cplx>().asDiagonal() * hs.vectors.adjoint();
    REQUIRE((rebuilt - h).norm() <= 1e-10);
    REQUIRE((hs.vectors.adjoint() * hs.vectors - Matrix::Identity(full_dim, full_dim)).norm() <=
            1e-12);
    const EigenSystem again = eigh(rebuilt);
    REQUIRE((again.energies - hs.energies).cwiseAbs().maxCoeff() <= 1e-9);

    Matrix bad = Matrix::Random(8, 8);
    bad(0, 1) += cplx(1.0, 1.0);
    REQUIRE_THROWS_AS(eigh(bad), std::invalid_argument);
}

TEST_CASE("unitary_exp: identity limits and unitarity") {
    const Matrix h = build_hamiltonian(ModelParams{});
    REQUIRE((unitary_exp(h, 0.0) - Matrix::Identity(full_dim, full_dim)).norm() <= 1e-12);

    Matrix ints = Matrix::Zero(5, 5);
    for (int k = 0; k < 5; ++k) ints(k, k) = k - 2;
    REQUIRE((unitary_exp(ints, 2.0 * pi) - Matrix::Identity(5, 5)).norm() <= 1e-12);

    std::srand(5);
    Matrix g = Matrix::Random(16, 16);
    g = (g + g.adjoint()).eval();
    const Matrix u = unitary_exp(g, 0.83);
    REQUIRE((u.adjoint() * u - Matrix::Identity(16, 16)).norm() <= 1e-10);
    REQUIRE((u * unitary_exp(g, -0.83) - Matrix::Identity(16, 16)).norm() <= 1e-10);
}

TEST_CASE("sector indices partition the space with binomial sizes") {
    const std::vector<std::size_t> expected{1, 6, 15, 20, 15, 6, 1};
    std::size_t total = 0;
    for (int n = 0; n <= n_sites; ++n) {
        const auto idx = sector_indices(n);
        REQUIRE(idx.size() == expected[n]);
        total += idx.size();
        for (int b : idx) REQUIRE(excitation_count(b) == n);
    }
    REQUIRE(total == std::size_t(full_dim));
}
