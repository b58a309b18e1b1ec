#include <doctest.h>

#include <algorithm>
#include <random>

#include "funcreg/kernel.hpp"
#include "funcreg/sim.hpp"
#include "test_support.hpp"

using namespace funcreg;
using funcreg_test::random_curve_set;

namespace {

CurveSet constant_set(const Grid& grid, const std::vector<double>& heights) {
    Eigen::MatrixXd values(static_cast<Eigen::Index>(heights.size()), grid.size());
    for (std::size_t i = 0; i < heights.size(); ++i)
        values.row(static_cast<Eigen::Index>(i)).setConstant(heights[i]);
    return CurveSet(grid, std::move(values));
}

CurveSet brownian_set(std::uint64_t seed, const Grid& grid, int n) {
    std::vector<Curve> rows;
    for (int i = 0; i < n; ++i) {
        auto rng = substream(seed, 0, DataRole::train, i);
        rows.push_back(gen_brownian(rng, grid));
    }
    return CurveSet::from_curves(rows);
}

} // namespace

TEST_CASE("scalar kernel evaluation") {
    const ScalarKernel kern(2.0);
    CHECK(kern(0.0) == 1.0);
    CHECK(kern(2.0) == doctest::Approx(std::exp(-0.5)));
    CHECK(ScalarKernel(1.0)(1.0) == doctest::Approx(0.606531).epsilon(1e-6));
    CHECK_THROWS_AS(ScalarKernel(0.0), InvalidInput);
    CHECK_THROWS_AS(ScalarKernel(-1.0), InvalidInput);

    // Monotone decreasing in d.
    double prev = 2.0;
    for (double d : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double v = kern(d);
        CHECK(v < prev);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("covariate gram basics") {
    const Grid grid = Grid::equispaced(10);
    const OperatorKernel kern(1.5);

    const CurveSet single = constant_set(grid, {2.0});
    CHECK(covariate_gram(single, kern) == Eigen::MatrixXd::Ones(1, 1));

    const CurveSet dup = constant_set(grid, {3.0, 3.0});
    CHECK(covariate_gram(dup, kern).minCoeff() == doctest::Approx(1.0));

    const CurveSet brown = brownian_set(42, grid, 3);
    const Eigen::MatrixXd a = covariate_gram(brown, OperatorKernel(default_sigma(brown)));
    CHECK(check_positive_definite(a) > 0.0);
    CHECK(a.diagonal().isApproxToConstant(1.0));
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("grid gram") {
    const ScalarKernel kern(1.0);
    const Eigen::MatrixXd k2 = grid_gram(Grid::equispaced(2), kern);
    CHECK(k2(0, 0) == 1.0);
    CHECK(k2(1, 1) == 1.0);
    CHECK(k2(0, 1) == doctest::Approx(std::exp(-0.5)));
    CHECK(k2(1, 0) == doctest::Approx(std::exp(-0.5)));

    // Entrywise recomputation oracle.
    const Grid g5 = Grid::equispaced(5);
    const ScalarKernel half(0.5);
    const Eigen::MatrixXd k5 = grid_gram(g5, half);
    for (int l = 0; l < 5; ++l)
        for (int m = 0; m < 5; ++m) {
            const double d = g5[l] - g5[m];
            CHECK(k5(l, m) == doctest::Approx(std::exp(-d * d / 0.5)).epsilon(1e-14));
        }
}

TEST_CASE("default sigma") {
    const Grid grid = Grid::equispaced(10);
    CHECK(default_sigma(constant_set(grid, {0.0, 3.0})) == doctest::Approx(3.0));
    CHECK(default_sigma(constant_set(grid, {0.0, 1.0, 2.0})) ==
          doctest::Approx(4.0 / 3.0));
    CHECK_THROWS_AS(default_sigma(constant_set(grid, {1.0})), InvalidInput);
    CHECK_THROWS_AS(default_sigma(constant_set(grid, {2.0, 2.0})), InvalidInput);

    // Brute-force pairwise oracle on Brownian draws.
    const CurveSet brown = brownian_set(9, grid, 30);
    double sum = 0.0;
    int pairs = 0;
    for (int i = 0; i < 30; ++i)
        for (int j = i + 1; j < 30; ++j) {
            sum += l2_distance(brown.curve(i), brown.curve(j));
            ++pairs;
        }
    CHECK(default_sigma(brown) == doctest::Approx(sum / pairs).epsilon(1e-12));
    CHECK(default_sigma(brown) > 0.0);
}

TEST_CASE("default sigma prime") {
    CHECK(default_sigma_prime(Grid::equispaced(2)) == doctest::Approx(1.0));
    CHECK(default_sigma_prime(Grid::equispaced(3)) == doctest::Approx(2.0 / 3.0));
    // Closed form (T+1)/(3(T-1)) for an equispaced grid.
    const int T = 50;
    CHECK(default_sigma_prime(Grid::equispaced(T)) ==
          doctest::Approx((T + 1.0) / (3.0 * (T - 1.0))).epsilon(1e-12));
}

TEST_CASE("check_positive_definite") {
    CHECK(check_positive_definite(Eigen::MatrixXd::Identity(3, 3)) ==
          doctest::Approx(1.0));
    Eigen::MatrixXd ones(2, 2);
    ones.setOnes();
    CHECK(check_positive_definite(ones) == doctest::Approx(0.0).epsilon(1e-12));

    Eigen::MatrixXd nonsym(2, 2);
    nonsym << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(check_positive_definite(nonsym), InvalidInput);

    const CurveSet brown = brownian_set(100, Grid::equispaced(12), 10);
    const Eigen::MatrixXd gram =
        covariate_gram(brown, OperatorKernel(default_sigma(brown)));
    CHECK(check_positive_definite(gram) > 0.0);
}

TEST_CASE("Hadamard products with random PSD matrices stay PSD") {
    std::mt19937_64 rng(17);
    const Grid grid = Grid::equispaced(15);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        const CurveSet xs = random_curve_set(rng, grid, n);
        const Eigen::MatrixXd a =
            covariate_gram(xs, OperatorKernel(default_sigma(xs)));
        Eigen::MatrixXd e(n, n);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) e(i, j) = gauss(rng);
        const Eigen::MatrixXd psd = e.transpose() * e;
        const Eigen::MatrixXd had = a.cwiseProduct(psd);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(had, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >=
              -1e-10 * std::max(es.eigenvalues().maxCoeff(), 1.0));
    }
}

TEST_CASE("gram invariant under curve reordering") {
    std::mt19937_64 rng(23);
    const Grid grid = Grid::equispaced(20);
    const int n = 6;
    const CurveSet xs = random_curve_set(rng, grid, n);
    const OperatorKernel kern(1.0);
    const Eigen::MatrixXd a = covariate_gram(xs, kern);

    std::vector<int> perm{3, 0, 5, 1, 4, 2};
    Eigen::MatrixXd shuffled(n, grid.size());
    for (int i = 0; i < n; ++i) shuffled.row(i) = xs.values().row(perm[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd b = covariate_gram(CurveSet(grid, shuffled), kern);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(b(i, j) == doctest::Approx(a(perm[static_cast<std::size_t>(i)],
                                               perm[static_cast<std::size_t>(j)])));
}
