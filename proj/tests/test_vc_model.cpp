#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mqb/closed_dynamics.hpp"
#include "mqb/vc_model.hpp"
#include "test_support.hpp"

using namespace mqb;
using mqb::testing::random_lvc;

namespace {

VCModel harmonic_only(double omega) {
    VCModel m;
    m.d = 1;
    m.num_modes = 1;
    m.omega = {omega};
    m.c0 = Eigen::MatrixXd::Zero(1, 1);
    m.c1 = {Eigen::MatrixXd::Zero(1, 1)};
    return m;
}

}  // namespace

TEST_CASE("pure harmonic spectrum omega*(n + 1/2)") {
    const double omega = 0.08;
    auto layout = std::make_shared<SpaceLayout>(1, std::vector<int>{14});
    OperatorMatrix h = build_hamiltonian(harmonic_only(omega), layout);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.dense());
    for (int n = 0; n < 14; ++n)
        CHECK(std::abs(es.eigenvalues()(n) - omega * (n + 0.5)) < 1e-10);
}

TEST_CASE("two-state two-mode Hamiltonian equals the term-by-term assembly") {
    // oracle: assemble sum_j w_j(n_j + 1/2) - dE/2 sz + kappa_n |n><n| Q1 + lambda sx Q2
    // from raw factory operators (the number form agrees with (Q^2+P^2)/2 below
    // the truncation edge)
    const double w1 = 0.0739, w2 = 0.1139, de = 0.9233, k0 = -0.0964, k1 = 0.1194,
                 lam = 0.1825;
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{6, 5});

    OperatorMatrix oracle =
        w1 * embed_mode(number_operator(6) + 0.5 * identity_op(6), 0, layout) +
        w2 * embed_mode(number_operator(5) + 0.5 * identity_op(5), 1, layout) +
        (-de / 2.0) * embed_qudit(sigma_z(), layout) +
        k0 * embed_qudit(qudit_projector(0, 0, 2), layout) * embed_mode(position_q(6), 0, layout) +
        k1 * embed_qudit(qudit_projector(1, 1, 2), layout) * embed_mode(position_q(6), 0, layout) +
        lam * embed_qudit(sigma_x(), layout) * embed_mode(position_q(5), 1, layout);

    VCModel m;
    m.d = 2;
    m.num_modes = 2;
    m.omega = {w1, w2};
    m.c0 = Eigen::MatrixXd::Zero(2, 2);
    m.c0(0, 0) = -de / 2.0;
    m.c0(1, 1) = de / 2.0;
    Eigen::MatrixXd c1a = Eigen::MatrixXd::Zero(2, 2), c1b = Eigen::MatrixXd::Zero(2, 2);
    c1a(0, 0) = k0;
    c1a(1, 1) = k1;
    c1b(0, 1) = c1b(1, 0) = lam;
    m.c1 = {c1a, c1b};

    OperatorMatrix h = build_hamiltonian(m, layout);
    CHECK((h - oracle).max_abs() < 1e-14);
    CHECK(h.is_hermitian_flagged());
}

TEST_CASE("model validation") {
    VCModel m = harmonic_only(0.1);
    SUBCASE("zero frequency rejected") {
        m.omega[0] = 0.0;
        CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    }
    SUBCASE("asymmetric c1 rejected with named indices") {
        VCModel two;
        two.d = 2;
        two.num_modes = 1;
        two.omega = {0.1};
        two.c0 = Eigen::MatrixXd::Zero(2, 2);
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
        c(0, 1) = 0.5;  // c(1,0) left at zero
        two.c1 = {c};
        CHECK_THROWS_WITH_AS(two.validate(),
                             doctest::Contains("c1[0][0][1] != c1[0][1][0]"),
                             std::invalid_argument);
    }
}

TEST_CASE("pauli form") {
    std::mt19937 rng(31);

    SUBCASE("symmetric states give zero delta_kappa and delta_e") {
        VCModel m = random_lvc(rng, 2, 2);
        m.c0(1, 1) = m.c0(0, 0);
        for (auto& c : m.c1) c(1, 1) = c(0, 0);
        TwoStateLVCParams p = pauli_form(m);
        CHECK(p.delta_e == 0.0);
        for (double dk : p.delta_kappa) CHECK(dk == 0.0);
    }

    SUBCASE("lambda_j is read from the off-diagonal linear coefficient") {
        VCModel m = random_lvc(rng, 2, 3);
        TwoStateLVCParams p = pauli_form(m);
        for (int j = 0; j < 3; ++j) CHECK(p.lambda[j] == m.c1[j](0, 1));
    }

    SUBCASE("round trip reproduces the Hamiltonian up to the trace constant") {
        for (int trial = 0; trial < 5; ++trial) {
            VCModel m = random_lvc(rng, 2, 2);
            TwoStateLVCParams p = pauli_form(m);
            VCModel back = lvc_from_pauli(p, m.omega);
            auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{5, 4});
            OperatorMatrix ha = build_hamiltonian(m, layout);
            OperatorMatrix hb = build_hamiltonian(back, layout);
            const double trace_const = (m.c0(0, 0) + m.c0(1, 1)) / 2.0;
            OperatorMatrix diff = ha - hb - trace_const * identity_op(layout->dim());
            CHECK(diff.max_abs() <= 1e-12);
        }
    }

    SUBCASE("guards") {
        VCModel m = random_lvc(rng, 3, 1);
        CHECK_THROWS_AS(pauli_form(m), std::invalid_argument);  // d != 2
        VCModel q = random_lvc(rng, 2, 1);
        q.c2.assign(1, Eigen::MatrixXd::Constant(2, 2, 0.1));
        CHECK_THROWS_AS(pauli_form(q), std::invalid_argument);  // quadratic terms
    }
}

TEST_CASE("displace_model") {
    std::mt19937 rng(47);
    VCModel m = random_lvc(rng, 2, 2, 0.05);

    SUBCASE("beta = 0 leaves the model unchanged") {
        VCModel d = displace_model(m, 0, 0.0);
        CHECK((d.c0 - m.c0).cwiseAbs().maxCoeff() == 0.0);
        for (int j = 0; j < 2; ++j)
            CHECK((d.c1[j] - m.c1[j]).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("beta = kappa_bar/omega removes the identity (x) Q_k term") {
        TwoStateLVCParams p = pauli_form(m);
        const double beta = p.kappa_bar[0] / m.omega[0];
        VCModel d = displace_model(m, 0, beta);
        TwoStateLVCParams pd = pauli_form(d);
        CHECK(std::abs(pd.kappa_bar[0]) < 1e-15);
        // the paper's replacement rules
        CHECK(pd.delta_e == doctest::Approx(p.delta_e - beta * p.delta_kappa[0]).epsilon(1e-12));
        CHECK(pd.w0 == doctest::Approx(p.w0 - beta * p.lambda[0]).epsilon(1e-12));
    }

    SUBCASE("spectrum is preserved up to the dropped constants") {
        const double beta = 0.3;
        const int mode = 0;
        VCModel d = displace_model(m, mode, beta);
        auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{12, 12});
        Eigen::SelfAdjointEigenSolver<MatrixXcd> ea(build_hamiltonian(m, layout).dense());
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eb(build_hamiltonian(d, layout).dense());
        // dropped: omega*beta^2/2 (harmonic) and the trace of -beta*c1[k]
        const double shift = -m.omega[mode] * beta * beta / 2.0 +
                             beta * m.c1[mode].trace() / m.d;
        for (int k = 0; k < 8; ++k)
            CHECK(std::abs(eb.eigenvalues()(k) - (ea.eigenvalues()(k) + shift)) < 1e-8);
    }

    SUBCASE("mode index out of range") {
        CHECK_THROWS_AS(displace_model(m, 5, 0.1), std::out_of_range);
    }
}

TEST_CASE("displace_state") {
    auto layout = std::make_shared<SpaceLayout>(1, std::vector<int>{24});
    VectorXcd vac = franck_condon_state(layout, 0);

    SUBCASE("beta = 0 is the identity") {
        CHECK((displace_state(vac, 0, 0.0, layout) - vac).norm() == 0.0);
    }

    SUBCASE("displaced vacuum is a coherent state with <Q> = beta") {
        const double beta = 0.8;
        VectorXcd psi = displace_state(vac, 0, beta, layout);
        CHECK(std::abs(psi.norm() - 1.0) < 1e-9);
        OperatorMatrix q = embed_mode(position_q(24), 0, layout);
        CHECK(std::abs(std::real(psi.dot(q.apply(psi))) - beta) < 1e-6);
    }
}

TEST_CASE("displacement equivalence over a trajectory") {
    // observables of (displaced H, displaced psi0) match (H, psi0)
    std::mt19937 rng(53);
    VCModel m = random_lvc(rng, 2, 1, 0.05);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{18});
    VectorXcd psi0 = franck_condon_state(layout, 1);
    const double beta = 0.25;
    VCModel md = displace_model(m, 0, beta);
    VectorXcd psi0d = displace_state(psi0, 0, beta, layout);

    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(k * 1.0);
    Trajectory a = propagate_exact(build_hamiltonian(m, layout), psi0, grid);
    Trajectory b = propagate_exact(build_hamiltonian(md, layout), psi0d, grid);
    double dpop = 0.0, dq = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        dpop = std::max(dpop, std::abs(a.populations[1][s] - b.populations[1][s]));
        // displaced-frame positions are shifted by +beta
        dq = std::max(dq, std::abs((b.q_expect[0][s] - beta) - a.q_expect[0][s]));
    }
    CHECK(dpop <= 1e-6);
    CHECK(dq <= 1e-6);
}

TEST_CASE("franck_condon_state") {
    auto layout = std::make_shared<SpaceLayout>(3, std::vector<int>{4, 5});
    VectorXcd psi = franck_condon_state(layout, 1);
    CHECK(std::abs(psi.norm() - 1.0) == 0.0);
    int nonzero = 0;
    for (long i = 0; i < psi.size(); ++i)
        if (psi(i) != cd(0.0, 0.0)) ++nonzero;
    CHECK(nonzero == 1);
    CHECK(psi(1 * 20) == cd(1.0, 0.0));

    for (int j = 0; j < 2; ++j) {
        OperatorMatrix q = embed_mode(position_q(layout->truncation(j)), j, layout);
        OperatorMatrix p = embed_mode(momentum_p(layout->truncation(j)), j, layout);
        CHECK(std::abs(psi.dot(q.apply(psi))) == 0.0);
        CHECK(std::abs(psi.dot(p.apply(psi))) == 0.0);
    }
    CHECK_THROWS_AS(franck_condon_state(layout, 3), std::out_of_range);
}
