// bench_kernels — serial reference vs OpenMP kernels on a pyrazine-sized problem
//
// usage: bench_kernels [truncation] [repetitions]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "mqb/closed_dynamics.hpp"
#include "mqb/kernels.hpp"
#include "mqb/open_dynamics.hpp"
#include "mqb/vc_model.hpp"

using namespace mqb;

namespace {

VCModel demo_model() {
    VCModel m;
    m.d = 2;
    m.num_modes = 2;
    m.omega = {0.0739, 0.1139};
    m.c0 = Eigen::MatrixXd::Zero(2, 2);
    m.c0(0, 0) = -0.46165;
    m.c0(1, 1) = 0.46165;
    Eigen::MatrixXd c1a = Eigen::MatrixXd::Zero(2, 2), c1b = Eigen::MatrixXd::Zero(2, 2);
    c1a(0, 0) = -0.0964;
    c1a(1, 1) = 0.1194;
    c1b(0, 1) = c1b(1, 0) = 0.1825;
    m.c1 = {c1a, c1b};
    return m;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int trunc = argc > 1 ? std::atoi(argv[1]) : 20;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 200;

    auto layout = std::make_shared<SpaceLayout>(2, std::vector<int>{trunc, trunc});
    VCModel model = demo_model();
    OperatorMatrix h = build_hamiltonian(model, layout);
    const long dim = layout->dim();
    std::printf("dim = %ld, nnz(H) = %ld, threads = %d\n", dim, h.nonzeros(),
                omp_get_max_threads());

    VectorXcd x = VectorXcd::Random(dim).normalized();
    VectorXcd y1(dim), y2(dim), y3(dim);

    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) kernels::spmv_serial(h.sparse(), x.data(), y1.data());
    const double t_scatter = seconds_since(t0) / reps;

    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) kernels::spmv_hermitian_serial(h.sparse(), x.data(), y2.data());
    const double t_gather = seconds_since(t0) / reps;

    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r)
        kernels::spmv_hermitian_parallel(h.sparse(), x.data(), y3.data());
    const double t_par = seconds_since(t0) / reps;

    const double diff = std::max((y1 - y2).cwiseAbs().maxCoeff(), (y1 - y3).cwiseAbs().maxCoeff());
    std::printf("spmv   scatter-serial %8.2f us | gather-serial %8.2f us | gather-parallel %8.2f "
                "us | speedup %.2fx | max diff %.2e\n",
                1e6 * t_scatter, 1e6 * t_gather, 1e6 * t_par, t_gather / t_par, diff);

    // Lindblad right-hand side, serial reference vs kernel path
    BathSpec bath;
    bath.gamma = {0.005, 0.007};
    bath.nbar = {0.06, 0.01};
    LindbladGenerator gen(h, bath, layout);
    MatrixXcd rho = MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0;
    MatrixXcd out1, out2;

    const int rho_reps = std::max(1, reps / 50);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < rho_reps; ++r) gen.rhs_serial_reference(rho, out1);
    const double t_ref = seconds_since(t0) / rho_reps;

    kernels::set_parallel_enabled(false);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < rho_reps; ++r) gen.rhs(rho, out2);
    const double t_rhs_serial = seconds_since(t0) / rho_reps;

    kernels::set_parallel_enabled(true);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < rho_reps; ++r) gen.rhs(rho, out2);
    const double t_rhs_par = seconds_since(t0) / rho_reps;

    std::printf("lindblad rhs dense-ref %8.2f ms | kernel-serial %8.2f ms | kernel-parallel %8.2f "
                "ms | speedup %.2fx | max diff %.2e\n",
                1e3 * t_ref, 1e3 * t_rhs_serial, 1e3 * t_rhs_par, t_rhs_serial / t_rhs_par,
                (out1 - out2).cwiseAbs().maxCoeff());
    return 0;
}
