#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <random>

#include "mqb/kernels.hpp"
#include "mqb/operator_matrix.hpp"

using namespace mqb;

namespace {

SparseCd random_sparse(std::mt19937& rng, long n, double fill, bool hermitian) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution keep(fill);
    std::vector<Eigen::Triplet<cd>> trips;
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            if (hermitian && j < i) continue;
            if (!keep(rng)) continue;
            cd v(u(rng), i == j && hermitian ? 0.0 : u(rng));
            trips.emplace_back(i, j, v);
            if (hermitian && j > i) trips.emplace_back(j, i, std::conj(v));
        }
    SparseCd m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

}  // namespace

TEST_CASE("hermitian spmv: gather kernels match the scatter reference") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const long n = 50 + 70 * trial;
        SparseCd h = random_sparse(rng, n, 0.05, true);
        VectorXcd x = VectorXcd::Random(n);
        VectorXcd y_ref(n), y_ser(n), y_par(n);
        kernels::spmv_serial(h, x.data(), y_ref.data());
        kernels::spmv_hermitian_serial(h, x.data(), y_ser.data());
        kernels::spmv_hermitian_parallel(h, x.data(), y_par.data());
        const double scale = y_ref.cwiseAbs().maxCoeff();
        CHECK((y_ser - y_ref).cwiseAbs().maxCoeff() < 1e-13 * scale);
        CHECK((y_par - y_ser).cwiseAbs().maxCoeff() == 0.0);  // same gather order
        // Eigen oracle
        VectorXcd y_eigen = h * x;
        CHECK((y_ref - y_eigen).cwiseAbs().maxCoeff() < 1e-13 * scale);
    }
}

TEST_CASE("parallel results are independent of the thread count") {
    std::mt19937 rng(1);
    const long n = 301;
    SparseCd h = random_sparse(rng, n, 0.04, true);
    VectorXcd x = VectorXcd::Random(n);
    VectorXcd y1(n), y2(n);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    kernels::spmv_hermitian_parallel(h, x.data(), y1.data());
    omp_set_num_threads(2);
    kernels::spmv_hermitian_parallel(h, x.data(), y2.data());
    omp_set_num_threads(saved);
    CHECK((y1 - y2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sparse*dense and dense*sparse against the Eigen oracle") {
    std::mt19937 rng(9);
    const long n = 120;
    SparseCd a = random_sparse(rng, n, 0.03, false);
    MatrixXcd b = MatrixXcd::Random(n, n);

    MatrixXcd left_ser, left_par, right_ser, right_par;
    kernels::spmm_left_serial(a, b, left_ser);
    kernels::spmm_left_parallel(a, b, left_par);
    kernels::spmm_right_serial(b, a, right_ser);
    kernels::spmm_right_parallel(b, a, right_par);

    MatrixXcd left_oracle = a * b;
    MatrixXcd right_oracle = b * a;
    const double ls = left_oracle.cwiseAbs().maxCoeff();
    const double rs = right_oracle.cwiseAbs().maxCoeff();
    CHECK((left_ser - left_oracle).cwiseAbs().maxCoeff() < 1e-13 * ls);
    CHECK((left_par - left_ser).cwiseAbs().maxCoeff() == 0.0);
    CHECK((right_ser - right_oracle).cwiseAbs().maxCoeff() < 1e-13 * rs);
    CHECK((right_par - right_ser).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace_product equals the dense trace") {
    std::mt19937 rng(13);
    const long n = 90;
    SparseCd a = random_sparse(rng, n, 0.05, false);
    MatrixXcd rho = MatrixXcd::Random(n, n);
    const cd oracle = (rho * MatrixXcd(a)).trace();
    const cd got = kernels::trace_product(rho, a);
    CHECK(std::abs(got - oracle) < 1e-12 * std::abs(oracle));
}

TEST_CASE("inf_norm bounds the spectral radius") {
    std::mt19937 rng(21);
    const long n = 64;
    SparseCd h = random_sparse(rng, n, 0.1, true);
    const MatrixXcd hd(h);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hd);
    const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(kernels::inf_norm(h) >= rho * (1.0 - 1e-12));
}
