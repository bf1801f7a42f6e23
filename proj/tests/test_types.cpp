#include <doctest.h>

#include "generators.hpp"
#include "qprobe/types.hpp"

using namespace qprobe;

TEST_CASE("maximally mixed state has zero Bloch vector") {
    const DensityMatrix rho;
    CHECK(bloch_from_density(rho).vector().norm() == doctest::Approx(0.0));
}

TEST_CASE("basis and superposition projectors") {
    const auto up = DensityMatrix::pure(Vector2cd(1, 0));
    const Vector3d r = bloch_from_density(up).vector();
    CHECK(r(0) == doctest::Approx(0.0));
    CHECK(r(2) == doctest::Approx(1.0));

    // (|+> + |->)/sqrt(2) is the sigma_z-up state
    const Vector2cd psi = (pauli::plus() + pauli::minus()) / std::sqrt(2.0);
    const Vector3d s = bloch_from_density(DensityMatrix::pure(psi)).vector();
    CHECK((s - Vector3d(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("sigma_x eigenstates") {
    CHECK((pauli::x() * pauli::plus() - pauli::plus()).norm() < 1e-15);
    CHECK((pauli::x() * pauli::minus() + pauli::minus()).norm() < 1e-15);
    const Matrix2cd sz_in_x = pauli::to_sigma_x_basis(pauli::z());
    CHECK((pauli::from_sigma_x_basis(sz_in_x) - pauli::z()).norm() < 1e-15);
}

TEST_CASE("density from Bloch vector") {
    CHECK((density_from_bloch(BlochVector(0, 0, 0)).matrix() - 0.5 * pauli::identity()).norm() < 1e-15);

    const Vector2cd plus = pauli::plus();
    const Matrix2cd proj = plus * plus.adjoint();
    CHECK((density_from_bloch(BlochVector(1, 0, 0)).matrix() - proj).norm() < 1e-15);

    // eigenvalues (1 +- |r|)/2 with |r| = 0.5
    const DensityMatrix rho = density_from_bloch(BlochVector(0.3, 0.4, 0));
    Eigen::SelfAdjointEigenSolver<Matrix2cd> es(rho.matrix());
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(es.eigenvalues()(1) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(rho.min_eigenvalue() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("unphysical inputs are rejected") {
    CHECK_THROWS_AS(BlochVector(1.0, 1e-3, 0.0), InvalidArgument);
    CHECK_NOTHROW(BlochVector(1.0 + 0.5e-9, 0.0, 0.0));
    CHECK_THROWS_AS(BlochVector(std::nan(""), 0.0, 0.0), InvalidArgument);

    Matrix2cd m = Matrix2cd::Zero();
    m(0, 0) = 1.0;
    m(0, 1) = 1e-7;
    CHECK_THROWS_AS(bloch_components(m), InvalidArgument);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), InvalidArgument);

    Matrix2cd neg = Matrix2cd::Zero();
    neg(0, 0) = 1.1;
    neg(1, 1) = -0.1;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(neg), InvalidArgument);

    Matrix2cd trace = Matrix2cd::Identity() * 0.6;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(trace), InvalidArgument);
}

TEST_CASE("coupling operators") {
    const auto perp = coupling_operator(5.0, CouplingKind::PerpendicularZ);
    CHECK((perp.matrix - pauli::z()).norm() == 0.0);

    const auto parallel = coupling_operator(0.0, CouplingKind::Mixed);
    CHECK((parallel.matrix - pauli::x()).norm() == 0.0);
    CHECK(parallel.commutes_with_system());

    const auto mixed = coupling_operator(2.0, CouplingKind::Mixed);
    CHECK(mixed.matrix(0, 0) == std::complex<double>(2, 0));
    CHECK(mixed.matrix(1, 1) == std::complex<double>(-2, 0));
    CHECK(mixed.matrix(0, 1) == std::complex<double>(1, 0));
    CHECK(mixed.matrix(1, 0) == std::complex<double>(1, 0));

    CHECK_THROWS_AS(coupling_operator(INFINITY, CouplingKind::Mixed), InvalidArgument);
}

TEST_CASE("property: commutator with H_s vanishes exactly for the parallel coupling") {
    testing::Generator gen(11);
    for (int i = 0; i < 200; ++i) {
        const double delta = gen.log_uniform(0.1, 5.0);
        const double chi = i == 0 ? 0.0 : gen.uniform(-3.0, 3.0);
        for (auto kind : {CouplingKind::PerpendicularZ, CouplingKind::Mixed}) {
            const auto s = coupling_operator(chi, kind);
            const double c = commutator(s.matrix, system_hamiltonian(delta)).norm();
            CHECK((c < 1e-14) == s.commutes_with_system());
        }
    }
}

TEST_CASE("property: Bloch round trips") {
    testing::Generator gen(1);
    for (int i = 0; i < 1000; ++i) {
        const BlochVector r(gen.bloch(1.0));
        const BlochVector back = bloch_from_density(density_from_bloch(r));
        CHECK((back.vector() - r.vector()).norm() < 1e-12);

        const DensityMatrix rho = density_from_bloch(r);
        const DensityMatrix again = density_from_bloch(bloch_from_density(rho));
        CHECK((again.matrix() - rho.matrix()).norm() < 1e-12);
        CHECK(rho.min_eigenvalue() == doctest::Approx((1 - r.norm()) / 2).epsilon(1e-12));
    }
}

TEST_CASE("time grid") {
    const TimeGrid g{1.0, 0.1};
    CHECK(g.size() == 11);
    CHECK(g.at(10) == doctest::Approx(1.0));
    CHECK_THROWS_AS(TimeGrid({1.0, 0.0}).size(), InvalidArgument);
}

TEST_CASE("model validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.delta = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = ModelParams{};
    p.coupling_strength = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    CHECK(ModelParams{}.with_delta(2.5).delta == 2.5);
}

TEST_CASE("sup distance") {
    Trajectory<BlochVector> a, b;
    a.times = b.times = {0.0, 1.0};
    a.states = {BlochVector(0, 0, 1), BlochVector(0, 0.5, 0)};
    b.states = {BlochVector(0, 0, 1), BlochVector(0, 0.2, 0)};
    CHECK(sup_distance(a, b) == doctest::Approx(0.3));
    b.times.pop_back();
    b.states.pop_back();
    CHECK_THROWS_AS(sup_distance(a, b), InvalidArgument);
}
