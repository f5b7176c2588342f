#include "linfsindy/dictionary.hpp"
#include "linfsindy/differentiation.hpp"
#include "linfsindy/error.hpp"
#include "linfsindy/simplex.hpp"
#include "linfsindy/sparse_regression.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace linfsindy;

namespace {

struct LorenzData {
    DictionaryMatrix dict;
    DerivativeSeries deriv;
};

const LorenzData& lorenz_data() {
    static const LorenzData data = [] {
        Vector x0(3);
        x0 << -8, 8, 27;
        const Trajectory traj = integrate(lorenz_system(), x0, 0.01, 50.0);
        return LorenzData{build_dictionary(traj.values, 2),
                          measured_derivative(lorenz_system(), traj, {0.0, 0})};
    }();
    return data;
}

// Lorenz coefficients over 1, x, y, z, x^2, xy, xz, y^2, yz, z^2.
Matrix lorenz_truth() {
    Matrix xi = Matrix::Zero(10, 3);
    xi(1, 0) = -10.0;
    xi(2, 0) = 10.0;
    xi(1, 1) = 28.0;
    xi(2, 1) = -1.0;
    xi(6, 1) = -1.0;
    xi(3, 2) = -8.0 / 3.0;
    xi(5, 2) = 1.0;
    return xi;
}

std::vector<std::size_t> true_support(const Matrix& xi, Eigen::Index k) {
    std::vector<std::size_t> s;
    for (Eigen::Index j = 0; j < xi.rows(); ++j) {
        if (xi(j, k) != 0.0) s.push_back(static_cast<std::size_t>(j));
    }
    return s;
}

Matrix random_matrix(Rng& rng, Eigen::Index n, Eigen::Index m) {
    Matrix a(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = rng.gaussian();
    return a;
}

Vector random_vector(Rng& rng, Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
    return v;
}

} // namespace

TEST_CASE("residual and norms") {
    Matrix theta(2, 1);
    theta << 1, 2;
    Vector xi(1), y(2);
    xi << 1;
    y << 3, 3;
    const Residual r = residual(theta, xi, y);
    CHECK(r.r[0] == 2.0);
    CHECK(r.r[1] == 1.0);
    CHECK(r.norm_linf() == 2.0);
    CHECK(r.norm_l2() == doctest::Approx(std::sqrt(5.0)));
    CHECK(residual(theta, Vector::Zero(1), y).r == y);
    CHECK_THROWS_AS(residual(theta, Vector::Zero(2), y), InputError);
}

TEST_CASE("least squares") {
    SUBCASE("square full rank") {
        Matrix a(3, 3);
        a << 2, 0, 0, 0, 3, 0, 0, 0, 4;
        const Vector y = Vector::Constant(3, 12.0);
        const LeastSquaresFit fit = least_squares(a, y);
        CHECK(fit.coefficients[0] == doctest::Approx(6.0));
        CHECK(fit.coefficients[1] == doctest::Approx(4.0));
        CHECK(fit.coefficients[2] == doctest::Approx(3.0));
        CHECK_FALSE(fit.rank_deficient);
    }
    SUBCASE("consistent system") {
        Rng rng(1);
        const Matrix a = random_matrix(rng, 30, 4);
        const Vector c = random_vector(rng, 4);
        const Vector y = a * c;
        const LeastSquaresFit fit = least_squares(a, y);
        CHECK((y - a * fit.coefficients).norm() < 1e-10);
    }
    SUBCASE("mean of a constant column") {
        const Matrix a = Matrix::Ones(3, 1);
        Vector y(3);
        y << 0, 1, 2;
        CHECK(least_squares(a, y).coefficients[0] == doctest::Approx(1.0));
    }
    SUBCASE("rank deficient gives the minimum-norm solution") {
        Matrix a(4, 2);
        a.col(0) << 1, 2, 3, 4;
        a.col(1) = a.col(0);
        const Vector y = 2.0 * a.col(0);
        const LeastSquaresFit fit = least_squares(a, y);
        CHECK(fit.rank_deficient);
        CHECK(fit.coefficients[0] == doctest::Approx(1.0));
        CHECK(fit.coefficients[1] == doctest::Approx(1.0));
    }
}

TEST_CASE("stlsq recovers Lorenz from exact derivatives") {
    const LorenzData& d = lorenz_data();
    const Matrix truth = lorenz_truth();
    for (Eigen::Index k = 0; k < 3; ++k) {
        const SparseCoefficients c = stlsq(d.dict.matrix, d.deriv.values.col(k), 0.1);
        CHECK(c.support == true_support(truth, k));
        CHECK((c.xi - truth.col(k)).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(c.objective_kind == ObjectiveKind::L2);
        CHECK_FALSE(c.diagnostics.zero_model);
    }
}

TEST_CASE("stlsq on synthetic sparse data") {
    Rng rng(5);
    const Matrix theta = random_matrix(rng, 60, 8);
    Vector xi = Vector::Zero(8);
    xi[1] = 2.5;
    xi[4] = -1.5;
    xi[6] = 0.8;
    const SparseCoefficients c = stlsq(theta, theta * xi, 0.1);
    CHECK(c.support == std::vector<std::size_t>{1, 4, 6});
    CHECK((c.xi - xi).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("stlsq with an oversized threshold returns the zero model") {
    Rng rng(6);
    const Matrix theta = random_matrix(rng, 20, 4);
    const Vector y = theta * Vector::Constant(4, 0.5);
    const SparseCoefficients c = stlsq(theta, y, 100.0);
    CHECK(c.support.empty());
    CHECK(c.xi.isZero());
    CHECK(c.diagnostics.zero_model);
    CHECK(c.objective_value == doctest::Approx(y.norm()));
}

TEST_CASE("stlsq invariants on random problems") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix theta = random_matrix(rng, 40, 6);
        const Vector y = random_vector(rng, 40);
        const double threshold = rng.uniform(0.05, 0.4);
        const SparseCoefficients c = stlsq(theta, y, threshold);
        for (Eigen::Index j = 0; j < c.xi.size(); ++j) {
            const bool in_support = std::find(c.support.begin(), c.support.end(), static_cast<std::size_t>(j)) != c.support.end();
            CHECK((c.xi[j] != 0.0) == in_support);
            if (c.xi[j] != 0.0) CHECK(std::abs(c.xi[j]) >= threshold);
        }
        const double recomputed = objective_value(theta, c.xi, y, ObjectiveKind::L2, threshold);
        CHECK(c.objective_value == doctest::Approx(recomputed).epsilon(1e-9));
    }
}

TEST_CASE("standard-form simplex") {
    SUBCASE("bounded optimum") {
        // max x + y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6
        Matrix A(2, 4);
        A << 1, 2, 1, 0, 3, 1, 0, 1;
        Vector b(2), c(4);
        b << 4, 6;
        c << 1, 1, 0, 0;
        const LpResult r = solve_standard_lp(A, b, c);
        REQUIRE(r.status == LpStatus::Optimal);
        CHECK(r.x[0] == doctest::Approx(1.6));
        CHECK(r.x[1] == doctest::Approx(1.2));
        CHECK(r.objective == doctest::Approx(2.8));
        // Duals satisfy strong duality.
        CHECK(b.dot(r.duals) == doctest::Approx(2.8));
    }
    SUBCASE("infeasible") {
        Matrix A(2, 2);
        A << 1, 1, 1, 1;
        Vector b(2), c(2);
        b << 1, 2;
        c << 1, 0;
        CHECK(solve_standard_lp(A, b, c).status == LpStatus::Infeasible);
    }
    SUBCASE("unbounded") {
        Matrix A(1, 2);
        A << 1, -1;
        Vector b(1), c(2);
        b << 1;
        c << 1, 0;
        CHECK(solve_standard_lp(A, b, c).status == LpStatus::Unbounded);
    }
}

TEST_CASE("Chebyshev fit examples") {
    SUBCASE("midrange of two points") {
        Vector y(2);
        y << 0, 1;
        const ChebyshevFit fit = linf_fit_fixed_support(Matrix::Ones(2, 1), y);
        CHECK(fit.coefficients[0] == doctest::Approx(0.5));
        CHECK(fit.minimax_residual == doctest::Approx(0.5));
    }
    SUBCASE("data in the column space") {
        Rng rng(11);
        const Matrix a = random_matrix(rng, 50, 3);
        Vector c(3);
        c << 1.5, -2.0, 0.25;
        const ChebyshevFit fit = linf_fit_fixed_support(a, a * c);
        CHECK(fit.minimax_residual < 1e-10);
        CHECK((fit.coefficients - c).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("line through (0,0), (1,0), (2,1)") {
        Matrix a(3, 2);
        a << 1, 0, 1, 1, 1, 2;
        Vector y(3);
        y << 0, 0, 1;
        const ChebyshevFit fit = linf_fit_fixed_support(a, y);
        CHECK(fit.minimax_residual == doctest::Approx(0.25).epsilon(1e-12));
        const Vector r = y - a * fit.coefficients;
        CHECK(r[0] == doctest::Approx(0.25));
        CHECK(r[1] == doctest::Approx(-0.25));
        CHECK(r[2] == doctest::Approx(0.25));
        const oracles::GridMinimax grid = oracles::grid_minimax_2d(a, y, 4.0);
        CHECK(std::abs(grid.value - fit.minimax_residual) < 1e-6);
    }
}

TEST_CASE("Chebyshev fit agrees with dense grid search") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = random_matrix(rng, 12, 2);
        const Vector y = random_vector(rng, 12);
        const ChebyshevFit fit = linf_fit_fixed_support(a, y);
        const double width = 2.0 * least_squares(a, y).coefficients.cwiseAbs().maxCoeff() + 2.0;
        const oracles::GridMinimax grid = oracles::grid_minimax_2d(a, y, width);
        CHECK(fit.minimax_residual <= grid.value + 1e-12);
        CHECK(grid.value - fit.minimax_residual < 1e-4);
    }
}

TEST_CASE("Chebyshev optimality properties") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto k = static_cast<Eigen::Index>(1 + trial % 4);
        const auto n = static_cast<Eigen::Index>(k + 3 + trial % 20);
        const Matrix a = random_matrix(rng, n, k);
        const Vector y = random_vector(rng, n);
        const ChebyshevFit fit = linf_fit_fixed_support(a, y);
        const double t = fit.minimax_residual;
        const Vector r = y - a * fit.coefficients;

        // Equioscillation: at least k+1 residuals attain the maximum.
        const auto active = (r.array().abs() >= t - 1e-8).count();
        CHECK(active >= k + 1);

        // Dominates the least-squares fit in the max norm.
        const Vector ls = least_squares(a, y).coefficients;
        CHECK(t <= (y - a * ls).cwiseAbs().maxCoeff() + 1e-12);

        // Positive homogeneity.
        const double scale = rng.uniform(0.1, 10.0);
        const ChebyshevFit scaled = linf_fit_fixed_support(a, scale * y);
        CHECK(scaled.minimax_residual == doctest::Approx(scale * t).epsilon(1e-9));
        CHECK((scaled.coefficients - scale * fit.coefficients).cwiseAbs().maxCoeff() <
              1e-7 * (1.0 + scale * fit.coefficients.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("Chebyshev fit handles dependent columns") {
    Matrix a(6, 2);
    a.col(0) << 1, 2, 3, 4, 5, 6;
    a.col(1) = 2.0 * a.col(0);
    Vector y(6);
    y << 1, 2, 2, 5, 4, 7;
    const ChebyshevFit fit = linf_fit_fixed_support(a, y);
    CHECK(fit.rank_deficient);
    const ChebyshevFit single = linf_fit_fixed_support(a.leftCols(1), y);
    CHECK(fit.minimax_residual == doctest::Approx(single.minimax_residual));
    CHECK_THROWS_AS(linf_fit_fixed_support(Matrix::Ones(1, 2), Vector::Ones(1)), InputError);
}

TEST_CASE("exhaustive oracle") {
    Rng rng(41);
    SUBCASE("huge lambda selects the empty support") {
        const Matrix theta = random_matrix(rng, 15, 4);
        const Vector y = random_vector(rng, 15);
        for (ObjectiveKind kind : {ObjectiveKind::L2, ObjectiveKind::Linf}) {
            const SparseCoefficients c = exhaustive_sparse_oracle(theta, y, 1e6, kind, 4);
            CHECK(c.support.empty());
            CHECK(c.objective_value == doctest::Approx(Residual{y}.norm(kind)));
        }
    }
    SUBCASE("exact multiple of one column") {
        const Matrix theta = random_matrix(rng, 15, 4);
        const Vector y = 3.0 * theta.col(2);
        for (ObjectiveKind kind : {ObjectiveKind::L2, ObjectiveKind::Linf}) {
            const SparseCoefficients c = exhaustive_sparse_oracle(theta, y, 1e-3, kind, 3);
            CHECK(c.support == std::vector<std::size_t>{2});
            CHECK(c.xi[2] == doctest::Approx(3.0));
            CHECK(c.objective_value == doctest::Approx(1e-3).epsilon(1e-6));
        }
    }
    SUBCASE("never beaten by any enumerated support") {
        const Matrix theta = random_matrix(rng, 20, 6);
        const Vector y = random_vector(rng, 20);
        const double lambda = 0.2;
        for (ObjectiveKind kind : {ObjectiveKind::L2, ObjectiveKind::Linf}) {
            const SparseCoefficients best = exhaustive_sparse_oracle(theta, y, lambda, kind, 3);
            const auto supports = oracles::all_supports(6, 3);
            CHECK(supports.size() == 41);
            CHECK(best.objective_value <= Residual{y}.norm(kind) + 1e-12);
            for (const auto& s : supports) {
                Matrix sub(20, static_cast<Eigen::Index>(s.size()));
                for (std::size_t j = 0; j < s.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = theta.col(static_cast<Eigen::Index>(s[j]));
                const Vector c = kind == ObjectiveKind::L2 ? least_squares(sub, y).coefficients
                                                           : linf_fit_fixed_support(sub, y).coefficients;
                const double value = Residual{y - sub * c}.norm(kind) + lambda * static_cast<double>(s.size());
                CHECK(best.objective_value <= value + 1e-9);
            }
        }
    }
    SUBCASE("column permutation permutes the solution") {
        const Matrix theta = random_matrix(rng, 25, 5);
        Vector xi = Vector::Zero(5);
        xi[0] = 2.0;
        xi[3] = -1.0;
        const Vector y = theta * xi + 0.05 * random_vector(rng, 25);
        std::vector<Eigen::Index> perm{3, 0, 4, 1, 2};
        Matrix permuted(25, 5);
        for (Eigen::Index j = 0; j < 5; ++j) permuted.col(j) = theta.col(perm[static_cast<std::size_t>(j)]);
        for (ObjectiveKind kind : {ObjectiveKind::L2, ObjectiveKind::Linf}) {
            const SparseCoefficients a = exhaustive_sparse_oracle(theta, y, 0.1, kind, 5);
            const SparseCoefficients b = exhaustive_sparse_oracle(permuted, y, 0.1, kind, 5);
            CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-10));
            for (Eigen::Index j = 0; j < 5; ++j) {
                CHECK(b.xi[j] == doctest::Approx(a.xi[perm[static_cast<std::size_t>(j)]]).epsilon(1e-8));
            }
        }
    }
    SUBCASE("ties go to the lower index") {
        Matrix theta(10, 3);
        theta.col(0) = random_vector(rng, 10);
        theta.col(1) = random_vector(rng, 10);
        theta.col(2) = theta.col(1);
        const Vector y = theta.col(1);
        const SparseCoefficients c = exhaustive_sparse_oracle(theta, y, 0.01, ObjectiveKind::L2, 2);
        CHECK(c.support == std::vector<std::size_t>{1});
    }
    SUBCASE("enumeration guard") {
        CHECK_THROWS_AS(exhaustive_sparse_oracle(random_matrix(rng, 60, 40), random_vector(rng, 60), 0.1,
                                                 ObjectiveKind::L2, 10),
                        SizeError);
        CHECK(support_count(6, 3) == 42);
        CHECK(support_count(40, 10) > kOracleSupportLimit);
    }
}

TEST_CASE("L-infinity sparse solve") {
    LinfSolveOptions options;
    options.pso.seed = 17;
    SUBCASE("constant fit") {
        Vector y(2);
        y << 0, 1;
        const SparseCoefficients c = linf_sparse_solve(Matrix::Ones(2, 1), y, 0.0, options);
        CHECK(c.xi[0] == doctest::Approx(0.5));
        CHECK(c.objective_value == doctest::Approx(0.5));
        CHECK(c.objective_kind == ObjectiveKind::Linf);
    }
    SUBCASE("deterministic for a fixed seed") {
        const auto inst = oracles::random_sparse_instance(3, 40, 8, 2, 0.1);
        const SparseCoefficients a = linf_sparse_solve(inst.theta, inst.y, default_linf_lambda(inst.y), options);
        const SparseCoefficients b = linf_sparse_solve(inst.theta, inst.y, default_linf_lambda(inst.y), options);
        CHECK((a.xi.array() == b.xi.array()).all());
        CHECK(a.objective_value == b.objective_value);
    }
    SUBCASE("never better than the oracle, usually equal") {
        int matches = 0;
        for (std::uint64_t seed = 100; seed < 110; ++seed) {
            const auto inst = oracles::random_sparse_instance(seed, 40, 8, 2, 0.1);
            const double lambda = default_linf_lambda(inst.y);
            options.pso.seed = seed;
            const SparseCoefficients pso = linf_sparse_solve(inst.theta, inst.y, lambda, options);
            const SparseCoefficients best = exhaustive_sparse_oracle(inst.theta, inst.y, lambda, ObjectiveKind::Linf, 8);
            CHECK(best.objective_value <= pso.objective_value + 1e-9);
            const double recomputed = objective_value(inst.theta, pso.xi, inst.y, ObjectiveKind::Linf, lambda);
            CHECK(pso.objective_value == doctest::Approx(recomputed).epsilon(1e-9));
            if (std::abs(pso.objective_value - best.objective_value) <= 1e-6 * best.objective_value) ++matches;
        }
        CHECK(matches >= 9);
    }
    SUBCASE("recovers Lorenz from exact derivatives") {
        const LorenzData& d = lorenz_data();
        const Matrix truth = lorenz_truth();
        for (Eigen::Index k = 0; k < 3; ++k) {
            const Vector y = d.deriv.values.col(k);
            const SparseCoefficients c = linf_sparse_solve(d.dict.matrix, y, default_linf_lambda(y), options);
            CHECK(c.support == true_support(truth, k));
            CHECK((c.xi - truth.col(k)).cwiseAbs().maxCoeff() < 1e-3);
        }
    }
    SUBCASE("rejects mismatched bounds") {
        options.pso.bounds = {{0.0, 1.0}};
        CHECK_THROWS_AS(linf_sparse_solve(Matrix::Ones(3, 2), Vector::Ones(3), 0.1, options), ConfigError);
    }
}
