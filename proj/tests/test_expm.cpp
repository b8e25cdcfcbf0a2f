#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mqb/errors.hpp"
#include "mqb/expm.hpp"
#include "test_support.hpp"

using namespace mqb;

namespace {

// random sparse-banded Hermitian matrix
OperatorMatrix random_hermitian(std::mt19937& rng, long n, int bandwidth) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SparseCd m(n, n);
    std::vector<Eigen::Triplet<cd>> trips;
    for (long i = 0; i < n; ++i) {
        trips.emplace_back(i, i, cd(u(rng), 0.0));
        for (int b = 1; b <= bandwidth; ++b) {
            if (i + b >= n) break;
            const cd v(u(rng), u(rng));
            trips.emplace_back(i, i + b, v);
            trips.emplace_back(i + b, i, std::conj(v));
        }
    }
    m.setFromTriplets(trips.begin(), trips.end());
    OperatorMatrix out(std::move(m));
    out.set_hermitian();
    return out;
}

VectorXcd random_state(std::mt19937& rng, long n) {
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXcd v(n);
    for (long i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
    return v / v.norm();
}

}  // namespace

TEST_CASE("zero Hamiltonian leaves the state unchanged") {
    SparseCd z(10, 10);
    OperatorMatrix h(std::move(z));
    h.set_hermitian();
    VectorXcd psi = VectorXcd::Unit(10, 3);
    VectorXcd out = matrix_exponential_apply(h, psi, 2.7);
    CHECK((out - psi).norm() == 0.0);
}

TEST_CASE("diagonal Hamiltonian multiplies amplitudes by phases") {
    const int n = 6;
    SparseCd m(n, n);
    for (int k = 0; k < n; ++k) m.insert(k, k) = 0.3 * k - 0.7;
    OperatorMatrix h(std::move(m));
    h.set_hermitian();
    std::mt19937 rng(3);
    VectorXcd psi = random_state(rng, n);
    const double t = 1.37;
    VectorXcd out = matrix_exponential_apply(h, psi, t);
    for (int k = 0; k < n; ++k) {
        const double e = 0.3 * k - 0.7;
        const cd expect = psi(k) * cd(std::cos(e * t), -std::sin(e * t));
        CHECK(std::abs(out(k) - expect) < 1e-12);
    }
}

TEST_CASE("sigma_x rotation by pi/2 maps |0> to -i|1>") {
    VectorXcd psi = VectorXcd::Unit(2, 0);
    VectorXcd out = matrix_exponential_apply(sigma_x(), psi, M_PI / 2.0);
    CHECK(std::abs(out(0)) < 1e-12);
    CHECK(std::abs(out(1) - cd(0.0, -1.0)) < 1e-12);
}

TEST_CASE("krylov path matches a dense oracle and preserves the norm") {
    std::mt19937 rng(11);
    const long n = 160;  // above the dense-storage limit: exercises Lanczos
    OperatorMatrix h = random_hermitian(rng, n, 3);
    VectorXcd psi = random_state(rng, n);

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.dense());
    for (double t : {0.3, 2.0, -7.5, 31.0}) {
        VectorXcd ref = es.eigenvectors().adjoint() * psi;
        for (long k = 0; k < n; ++k) {
            const double ph = -es.eigenvalues()(k) * t;
            ref(k) *= cd(std::cos(ph), std::sin(ph));
        }
        ref = es.eigenvectors() * ref;

        VectorXcd out = matrix_exponential_apply(h, psi, t);
        CHECK((out - ref).norm() < 1e-8);
        CHECK(std::abs(out.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("propagator dense and krylov paths agree") {
    std::mt19937 rng(5);
    const long n = 96;
    OperatorMatrix h = random_hermitian(rng, n, 2);
    VectorXcd psi = random_state(rng, n);
    Propagator prop(h);  // dense path at this size
    VectorXcd a = prop.evolve(psi, 4.2);
    VectorXcd b = matrix_exponential_apply(h, psi, 4.2);
    CHECK((a - b).norm() < 1e-9);
}

TEST_CASE("scaling equivalence: evolve(F*H, t/F) = evolve(H, t)") {
    std::mt19937 rng(17);
    const long n = 80;
    OperatorMatrix h = random_hermitian(rng, n, 2);
    VectorXcd psi = random_state(rng, n);
    const double t = 3.1;
    for (double f : {1e-9, 1e-3, 1.0}) {
        VectorXcd a = matrix_exponential_apply(h, psi, t);
        VectorXcd b = matrix_exponential_apply(f * h, psi, t / f);
        CHECK((a - b).norm() < 1e-10);
    }
}

TEST_CASE("contract violations") {
    OperatorMatrix bad = annihilation(8);  // not Hermitian
    VectorXcd psi = VectorXcd::Unit(8, 0);
    CHECK_THROWS_AS(matrix_exponential_apply(bad, psi, 1.0), std::invalid_argument);

    SparseCd m(4, 4);
    m.insert(0, 0) = std::numeric_limits<double>::quiet_NaN();
    OperatorMatrix nan_h(std::move(m));
    CHECK_THROWS_AS(matrix_exponential_apply(nan_h, VectorXcd::Unit(4, 0), 1.0), NumericError);
}

TEST_CASE("diagonal fast path in the propagator") {
    const int n = 50;
    SparseCd m(n, n);
    for (int k = 0; k < n; ++k) m.insert(k, k) = 0.11 * k;
    OperatorMatrix h(std::move(m));
    h.set_hermitian();
    Propagator prop(h);
    std::mt19937 rng(23);
    VectorXcd psi = random_state(rng, n);
    VectorXcd out = prop.evolve(psi, -2.2);  // negative t: the rewinding direction
    for (int k = 0; k < n; ++k) {
        const double ph = 0.11 * k * 2.2;  // e^{-iH(-t)} advances the phase forward
        CHECK(std::abs(out(k) - psi(k) * cd(std::cos(ph), std::sin(ph))) < 1e-14);
    }
}
