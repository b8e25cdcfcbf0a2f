#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mqb/closed_dynamics.hpp"
#include "mqb/constants.hpp"
#include "mqb/errors.hpp"
#include "mqb/open_dynamics.hpp"
#include "test_support.hpp"

using namespace mqb;
using mqb::testing::random_lvc;

namespace {

// random valid density matrix: mixture of a few random pure states
MatrixXcd random_density(std::mt19937& rng, long n) {
    std::normal_distribution<double> g(0.0, 1.0);
    MatrixXcd rho = MatrixXcd::Zero(n, n);
    double wsum = 0.0;
    for (int k = 0; k < 3; ++k) {
        VectorXcd v(n);
        for (long i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
        v.normalize();
        const double w = std::abs(g(rng)) + 0.1;
        rho += w * (v * v.adjoint());
        wsum += w;
    }
    return rho / wsum;
}

std::vector<double> grid_fs(double t_final, double dt) {
    std::vector<double> g;
    for (int k = 0;; ++k) {
        const double t = k * dt;
        if (t > t_final + 1e-9) break;
        g.push_back(t);
    }
    return g;
}

}  // namespace

TEST_CASE("dissipator anchor: decay of |1><1| on a two-level Fock space") {
    // H = 0, one mode, nbar = 0: rhs = gamma(|0><0| - |1><1|), from evaluating
    // D[a] on the 2-level block by hand
    auto layout = std::make_shared<SpaceLayout>(1, std::vector<int>{2});
    SparseCd hz(2, 2);
    OperatorMatrix h(std::move(hz), layout);
    h.set_hermitian();
    BathSpec bath;
    bath.gamma = {0.3};
    bath.nbar = {0.0};
    MatrixXcd rho = MatrixXcd::Zero(2, 2);
    rho(1, 1) = 1.0;
    MatrixXcd rhs = lindblad_rhs(rho, h, bath, layout);
    CHECK(std::abs(rhs(0, 0) - cd(0.3, 0.0)) < 1e-15);
    CHECK(std::abs(rhs(1, 1) - cd(-0.3, 0.0)) < 1e-15);
    CHECK(std::abs(rhs(0, 1)) < 1e-15);
    CHECK(std::abs(rhs(1, 0)) < 1e-15);
}

TEST_CASE("the right-hand side is exactly trace-free and hermiticity-preserving") {
    std::mt19937 rng(3);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{4, 3});
    VCModel m = random_lvc(rng, 2, 2);
    OperatorMatrix h = build_hamiltonian(m, layout);
    BathSpec bath;
    bath.gamma = {0.02, 0.05};
    bath.nbar = {0.3, 0.1};
    for (int trial = 0; trial < 10; ++trial) {
        MatrixXcd rho = random_density(rng, layout->dim());
        MatrixXcd rhs = lindblad_rhs(rho, h, bath, layout);
        CHECK(std::abs(rhs.trace()) < 1e-14);
        CHECK((rhs - rhs.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("gamma = 0 reduces to the von Neumann equation") {
    std::mt19937 rng(5);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{4, 4});
    VCModel m = random_lvc(rng, 2, 2);
    OperatorMatrix h = build_hamiltonian(m, layout);
    BathSpec bath;
    bath.gamma = {0.0, 0.0};
    bath.nbar = {0.0, 0.0};
    MatrixXcd rho = random_density(rng, layout->dim());
    MatrixXcd rhs = lindblad_rhs(rho, h, bath, layout);
    MatrixXcd hd = h.dense();
    MatrixXcd oracle = cd(0.0, -1.0 / hbar_ev_fs) * (hd * rho - rho * hd);
    CHECK((rhs - oracle).cwiseAbs().maxCoeff() < 1e-13 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("kernel rhs matches the dense serial reference") {
    std::mt19937 rng(7);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{5, 4});
    VCModel m = random_lvc(rng, 2, 2);
    OperatorMatrix h = build_hamiltonian(m, layout);
    BathSpec bath;
    bath.gamma = {0.04, 0.01};
    bath.nbar = {0.2, 0.6};
    LindbladGenerator gen(h, bath, layout);
    for (int trial = 0; trial < 5; ++trial) {
        MatrixXcd rho = random_density(rng, layout->dim());
        MatrixXcd fast, ref;
        gen.rhs(rho, fast);
        gen.rhs_serial_reference(rho, ref);
        CHECK((fast - ref).cwiseAbs().maxCoeff() < 1e-13 * ref.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("free mode relaxes along the analytic law to the thermal occupation") {
    // <n>(t) = nbar + (n0 - nbar) e^{-gamma t}; from vacuum, n0 = 0
    const double omega = 0.1, gamma = 0.05;
    for (double nbar : {0.01, 0.5}) {
        const int trunc = nbar > 0.2 ? 30 : 15;
        auto layout = std::make_shared<SpaceLayout>(1, std::vector<int>{trunc});
        OperatorMatrix h = omega * embed_mode(number_operator(trunc), 0, layout);
        h.set_hermitian();
        BathSpec bath;
        bath.gamma = {gamma};
        bath.nbar = {nbar};
        DensityOperator rho0 = pure_density(franck_condon_state(layout, 0), layout);
        std::vector<double> times = {0.0, 10.0, 40.0, 100.0, 10.0 / gamma};
        Trajectory traj = propagate_lindblad(rho0, h, bath, times);
        for (std::size_t s = 0; s < times.size(); ++s) {
            const double expect = nbar * (1.0 - std::exp(-gamma * times[s]));
            CHECK(std::abs(traj.n_expect[0][s] - expect) < 1e-4 * std::max(nbar, 0.1));
        }
        // at t = 10/gamma the occupation has reached nbar to 1e-3 relative
        CHECK(std::abs(traj.n_expect[0].back() - nbar) <= 1e-3 * nbar);
        CHECK(traj.trace_error.back() < 1e-7);
        CHECK_FALSE(traj.leakage_warning);
    }
}

TEST_CASE("detailed-balance fixed point") {
    // product thermal state with the bath occupations is stationary
    const double nbar = 0.4;
    const int trunc = 12;
    auto layout = std::make_shared<SpaceLayout>(1, std::vector<int>{trunc});
    OperatorMatrix h = 0.08 * embed_mode(number_operator(trunc), 0, layout);
    h.set_hermitian();
    BathSpec bath;
    bath.gamma = {0.03};
    bath.nbar = {nbar};

    MatrixXcd rho = MatrixXcd::Zero(trunc, trunc);
    const double r = nbar / (nbar + 1.0);
    double z = 0.0;
    for (int n = 0; n < trunc; ++n) z += std::pow(r, n);
    for (int n = 0; n < trunc; ++n) rho(n, n) = std::pow(r, n) / z;

    MatrixXcd rhs = lindblad_rhs(rho, h, bath, layout);
    CHECK(rhs.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("closed-system limit matches pure-state propagation") {
    std::mt19937 rng(11);
    VCModel m = random_lvc(rng, 2, 1, 0.08);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{8});
    OperatorMatrix h = build_hamiltonian(m, layout);
    VectorXcd psi0 = franck_condon_state(layout, 1);
    BathSpec bath;
    bath.gamma = {0.0};
    bath.nbar = {0.0};

    std::vector<double> times = grid_fs(40.0, 4.0);
    Trajectory open = propagate_lindblad(pure_density(psi0, layout), h, bath, times);
    Trajectory closed = propagate_exact(h, psi0, times);
    for (std::size_t s = 0; s < times.size(); ++s) {
        CHECK(std::abs(open.populations[0][s] - closed.populations[0][s]) < 1e-6);
        CHECK(std::abs(open.q_expect[0][s] - closed.q_expect[0][s]) < 1e-6);
    }
    // purity stays 1 for a closed run
    for (double p : open.purity) CHECK(p == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("purity decays from a pure state under dissipation") {
    std::mt19937 rng(13);
    VCModel m = random_lvc(rng, 2, 1, 0.08);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{8});
    OperatorMatrix h = build_hamiltonian(m, layout);
    BathSpec bath;
    bath.gamma = {0.02};
    bath.nbar = {0.1};
    // one oscillation period of the mode
    const double period = 2.0 * M_PI * hbar_ev_fs / m.omega[0];
    Trajectory traj = propagate_lindblad(pure_density(franck_condon_state(layout, 1), layout), h,
                                         bath, grid_fs(period, period / 8.0));
    for (std::size_t s = 1; s < traj.size(); ++s) CHECK(traj.purity[s] < traj.purity[s - 1] + 1e-12);
    CHECK(traj.purity.back() < 1.0);
}

TEST_CASE("trace is preserved through a long integration") {
    std::mt19937 rng(17);
    VCModel m = random_lvc(rng, 2, 2, 0.06);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{6, 6});
    OperatorMatrix h = build_hamiltonian(m, layout);
    BathSpec bath;
    bath.gamma = {0.01, 0.02};
    bath.nbar = {0.05, 0.02};
    Trajectory traj = propagate_lindblad(pure_density(franck_condon_state(layout, 1), layout), h,
                                         bath, grid_fs(120.0, 20.0));
    for (double e : traj.trace_error) CHECK(e <= 1e-7);
    for (std::size_t s = 0; s < traj.size(); ++s) {
        double total = 0.0;
        for (int n = 0; n < traj.num_states(); ++n) total += traj.populations[n][s];
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("step limit raises a diagnostic error") {
    auto layout = std::make_shared<SpaceLayout>(1, std::vector<int>{6});
    OperatorMatrix h = 0.1 * embed_mode(number_operator(6), 0, layout);
    h.set_hermitian();
    BathSpec bath;
    bath.gamma = {0.02};
    bath.nbar = {0.0};
    LindbladOptions opts;
    opts.max_steps = 3;
    MatrixXcd rho = MatrixXcd::Zero(6, 6);
    rho(1, 1) = 1.0;
    CHECK_THROWS_AS(
        propagate_lindblad(DensityOperator{rho, layout}, h, bath, grid_fs(50.0, 10.0), opts),
        NumericError);
}

TEST_CASE("density operator validation") {
    auto layout = std::make_shared<SpaceLayout>(1, std::vector<int>{3});
    MatrixXcd good = MatrixXcd::Zero(3, 3);
    good(0, 0) = 0.6;
    good(1, 1) = 0.4;
    CHECK_NOTHROW((DensityOperator{good, layout}.validate()));

    MatrixXcd off_trace = 0.9 * good;
    CHECK_THROWS_AS((DensityOperator{off_trace, layout}.validate()), std::invalid_argument);

    MatrixXcd non_herm = good;
    non_herm(0, 1) = cd(0.1, 0.0);
    CHECK_THROWS_AS((DensityOperator{non_herm, layout}.validate()), std::invalid_argument);

    MatrixXcd negative = good;
    negative(2, 2) = -0.1;
    negative(0, 0) = 0.7;
    CHECK_THROWS_AS((DensityOperator{negative, layout}.validate()), std::invalid_argument);
}

TEST_CASE("ohmic couplings") {
    CHECK(ohmic_couplings(0.0, 0.3, {0.1, 0.2}) == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(ohmic_couplings(0.1, 0.0, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(ohmic_couplings(-0.1, 0.3, {0.1}), std::invalid_argument);

    const double g0 = 0.2, wc = 0.25;
    const double at_cut = ohmic_couplings(g0, wc, {wc})[0];
    CHECK(at_cut == doctest::Approx(g0 * wc / std::exp(1.0)).epsilon(1e-14));

    SUBCASE("the profile is unimodal with its maximum at the cutoff") {
        std::vector<double> ws;
        for (int k = 1; k <= 40; ++k) ws.push_back(0.02 * k);
        std::vector<double> gs = ohmic_couplings(g0, wc, ws);
        for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
            if (ws[i + 1] <= wc) CHECK(gs[i + 1] > gs[i]);
            if (ws[i] >= wc) CHECK(gs[i + 1] < gs[i]);
        }
    }
}

TEST_CASE("broadband cooling approximation") {
    BathSpec bath;
    bath.gamma = {0.004, 0.004};
    bath.nbar = {0.0, 0.0};

    SUBCASE("already uniform and cold: unchanged") {
        BroadbandApprox approx = broadband_cooling_approx(bath);
        CHECK(approx.valid);
        CHECK(approx.bath.gamma == bath.gamma);
        CHECK(approx.bath.nbar == bath.nbar);
    }
    SUBCASE("mean rule and explicit override") {
        BathSpec warm;
        warm.gamma = {0.002, 0.006};
        warm.nbar = {0.05, 0.01};
        BroadbandApprox approx = broadband_cooling_approx(warm);
        CHECK(approx.bath.gamma[0] == doctest::Approx(0.004).epsilon(1e-14));
        CHECK(approx.bath.nbar == std::vector<double>{0.0, 0.0});
        BroadbandApprox forced = broadband_cooling_approx(warm, 0.01);
        CHECK(forced.bath.gamma[1] == 0.01);
    }
    SUBCASE("hot baths are flagged invalid") {
        BathSpec hot;
        hot.gamma = {0.004};
        hot.nbar = {1.5};
        BroadbandApprox approx = broadband_cooling_approx(hot);
        CHECK_FALSE(approx.valid);
        CHECK(approx.max_nbar == 1.5);
    }
}

TEST_CASE("damping is non-increasing with the coupling strength") {
    std::mt19937 rng(23);
    VCModel m = random_lvc(rng, 2, 1, 0.08);
    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{8});
    OperatorMatrix h = build_hamiltonian(m, layout);
    VectorXcd psi0 = franck_condon_state(layout, 1);
    std::vector<double> amplitude;
    for (double g : {0.0, 0.01, 0.05}) {
        BathSpec bath;
        bath.gamma = {g};
        bath.nbar = {0.02};
        Trajectory traj =
            propagate_lindblad(pure_density(psi0, layout), h, bath, grid_fs(80.0, 2.0));
        double lo = 1.0, hi = 0.0;
        for (std::size_t s = 0; s < traj.size(); ++s) {
            if (traj.times[s] < 30.0) continue;
            lo = std::min(lo, traj.populations[1][s]);
            hi = std::max(hi, traj.populations[1][s]);
        }
        amplitude.push_back(hi - lo);
    }
    CHECK(amplitude[1] <= amplitude[0] + 1e-12);
    CHECK(amplitude[2] <= amplitude[1] + 1e-12);
}
