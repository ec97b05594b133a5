#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "meshcrit/eigensolve.hpp"
#include "meshcrit/errors.hpp"

#include <omp.h>

#include <cmath>
#include <random>

using namespace meshcrit;

namespace {

OperatorView dense_view(const Eigen::MatrixXd& m, std::vector<double>& diag)
{
    diag.resize(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        diag[static_cast<std::size_t>(i)] = m(i, i);
    OperatorView op;
    op.dim = static_cast<std::size_t>(m.rows());
    op.apply = [&m](std::span<const double> v, std::span<double> out) {
        Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
        Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = m * vv;
    };
    op.diagonal = diag;
    return op;
}

double residual(const HamiltonianOperator& h, const EigenResult& r)
{
    const StateVector hv = h.apply(r.vector);
    double s = 0.0;
    for (std::size_t i = 0; i < hv.size(); ++i)
        s += std::pow(hv.values[i] - r.energy * r.vector.values[i], 2);
    return std::sqrt(s);
}

double norm(const StateVector& v)
{
    double s = 0.0;
    for (double x : v.values)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

TEST_CASE("dense oracle examples")
{
    CHECK(dense_lowest(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d.diagonal() << 3, -2, 5;
    CHECK(dense_lowest(d) == doctest::Approx(-2.0));

    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(50, 50);
    for (auto& x : a.reshaped())
        x = nd(rng);
    const Eigen::MatrixXd s = 0.5 * (a + a.transpose());
    const auto pair = dense_lowest_pair(s);
    const double rq = pair.vector.dot(s * pair.vector) / pair.vector.squaredNorm();
    CHECK(std::abs(rq - pair.value) <= 1e-12 * std::max(1.0, std::abs(pair.value)));
    CHECK_THROWS_AS(dense_lowest(Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST_CASE("one-point mesh")
{
    const auto h = build_hamiltonian(MeshSpec{1, 1, 1, 1, 1, 1}, 1.0);
    const auto r = lowest_eigenpair(h);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.energy == doctest::Approx(assemble_dense(h)(0, 0)).epsilon(1e-15));
}

TEST_CASE("iterative and dense lowest eigenvalues agree")
{
    for (const MeshSpec spec : {MeshSpec{6, 6, 6, 1, 1, 0.5}, MeshSpec{5, 7, 4, 0.8, 1.2, 0.6},
                                MeshSpec{8, 8, 3, 1.0, 1.0, 0.4}, MeshSpec{2, 3, 2, 1, 1, 1}})
        for (int block : {1, 3}) {
            const auto h = build_hamiltonian(spec, 1.0);
            EigenOptions o;
            o.block_size = block;
            const auto r = lowest_eigenpair(h, nullptr, o);
            INFO("mesh " << spec.nx << "x" << spec.ny << "x" << spec.nz << ", block " << block);
            CHECK(r.converged);
            CHECK(std::abs(r.energy - dense_lowest(assemble_dense(h))) <= 1e-11);
        }
}

TEST_CASE("symmetric mode converges to the symmetric ground state")
{
    const MeshSpec spec{7, 7, 5, 1.0, 1.0, 0.5};
    const auto h = build_hamiltonian(spec, 1.0, {.exchange_symmetric = true});
    const auto r = lowest_eigenpair(h);
    REQUIRE(r.converged);
    CHECK(std::abs(r.energy - dense_lowest(assemble_dense(h))) <= 1e-11);
    const StateVector pv = exchange_permute(r.vector);
    double d = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i)
        d = std::max(d, std::abs(pv.values[i] - r.vector.values[i]));
    CHECK(d <= 1e-10);
}

TEST_CASE("residual contract, unit norm and Rayleigh decrease")
{
    const MeshSpec spec{10, 10, 8, 1.0, 1.0, 0.5};
    const auto h = build_hamiltonian(spec, 1.0, {.exchange_symmetric = true});
    const EigenOptions o;
    const auto r = lowest_eigenpair(h, nullptr, o);
    REQUIRE(r.converged);
    CHECK(r.residual <= o.tol * std::max(1.0, std::abs(r.energy)));
    CHECK(residual(h, r) <= 1.5 * o.tol * std::max(1.0, std::abs(r.energy)));
    CHECK(std::abs(norm(r.vector) - 1.0) <= 1e-13);
    CHECK(r.energy <= r.initial_rayleigh);
    CHECK(r.vector.nx == 10);
    CHECK(r.vector.nz == 8);
}

TEST_CASE("warm start does not worsen the eigenvalue")
{
    const MeshSpec spec{10, 10, 8, 1.0, 1.0, 0.5};
    const auto h = build_hamiltonian(spec, 1.0, {.exchange_symmetric = true});
    const EigenOptions o;
    const auto cold = lowest_eigenpair(h, nullptr, o);
    const auto warm = lowest_eigenpair(h, &cold.vector, o);
    CHECK(warm.converged);
    CHECK(warm.iterations < cold.iterations);
    CHECK(warm.energy <= cold.energy + o.tol);

    const auto shifted = lowest_eigenpair(build_hamiltonian(spec, 1.02, {.exchange_symmetric = true}), &cold.vector, o);
    const auto shifted_cold = lowest_eigenpair(build_hamiltonian(spec, 1.02, {.exchange_symmetric = true}), nullptr, o);
    CHECK(std::abs(shifted.energy - shifted_cold.energy) <= 1e-12);
}

TEST_CASE("results are deterministic and thread-count independent")
{
    const MeshSpec spec{16, 16, 10, 1.0, 1.0, 0.5};
    const auto h = build_hamiltonian(spec, 1.0, {.exchange_symmetric = true});
    EigenOptions o;
    o.tol = 1e-10;
    omp_set_num_threads(1);
    const auto a = lowest_eigenpair(h, nullptr, o);
    const auto b = lowest_eigenpair(h, nullptr, o);
    omp_set_num_threads(3);
    const auto c = lowest_eigenpair(h, nullptr, o);
    omp_set_num_threads(1);
    CHECK(a.energy == b.energy);
    CHECK(a.iterations == b.iterations);
    CHECK(a.energy == c.energy);
    CHECK(a.vector.values == c.vector.values);
}

TEST_CASE("separable limit lambda = 0")
{
    const auto h = build_hamiltonian(MeshSpec{30, 30, 20, 1, 1, 1}, 0.0, {.exchange_symmetric = true});
    const auto r = lowest_eigenpair(h);
    CHECK(r.converged);
    CHECK(std::abs(r.energy + 1.0) <= 1e-10);
}

TEST_CASE("generic operator: discrete Laplacian")
{
    const int n = 60;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0;
        if (i + 1 < n)
            m(i, i + 1) = m(i + 1, i) = -1.0;
    }
    std::vector<double> diag;
    const auto op = dense_view(m, diag);
    std::vector<double> init(n, 1.0);
    EigenOptions o;
    o.maxiter = 20000;
    const auto r = lowest_eigenpair(op, init, o);
    CHECK(r.converged);
    const double pi = std::acos(-1.0);
    CHECK(r.energy == doctest::Approx(2.0 - 2.0 * std::cos(pi / (n + 1))).epsilon(1e-11));
}

TEST_CASE("non-convergence is reported, not thrown")
{
    const auto h = build_hamiltonian(MeshSpec{12, 12, 8, 1, 1, 0.5}, 1.0);
    EigenOptions o;
    o.maxiter = 2;
    const auto r = lowest_eigenpair(h, nullptr, o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
    CHECK(std::isfinite(r.energy));
}

TEST_CASE("invalid options and non-finite values")
{
    const auto h = build_hamiltonian(MeshSpec{3, 3, 3, 1, 1, 0.5}, 1.0);
    EigenOptions o;
    o.tol = 1e-15;
    CHECK_THROWS_AS(lowest_eigenpair(h, nullptr, o), std::invalid_argument);
    o = {};
    o.maxiter = 0;
    CHECK_THROWS_AS(lowest_eigenpair(h, nullptr, o), std::invalid_argument);
    const StateVector wrong(2, 2, 2, 1.0);
    CHECK_THROWS_AS(lowest_eigenpair(h, &wrong), std::invalid_argument);
    const StateVector zero(3, 3, 3, 0.0);
    CHECK_THROWS_AS(lowest_eigenpair(h, &zero), NumericError);

    std::vector<double> diag(4, 1.0);
    OperatorView op;
    op.dim = 4;
    op.diagonal = diag;
    op.apply = [](std::span<const double>, std::span<double> out) {
        for (auto& x : out)
            x = std::nan("");
    };
    std::vector<double> init(4, 1.0);
    CHECK_THROWS_AS(lowest_eigenpair(op, init), NumericError);
}

TEST_CASE("reproducible dot")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    std::vector<double> a(50000), b(50000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = nd(rng);
        b[i] = nd(rng);
    }
    long double ref = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        ref += static_cast<long double>(a[i]) * b[i];
    omp_set_num_threads(1);
    const double one = reproducible_dot(a, b);
    omp_set_num_threads(4);
    const double four = reproducible_dot(a, b);
    omp_set_num_threads(1);
    CHECK(one == four);
    CHECK(one == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
}
