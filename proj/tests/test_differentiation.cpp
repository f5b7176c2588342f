#include "linfsindy/differentiation.hpp"
#include "linfsindy/error.hpp"
#include "linfsindy/random.hpp"
#include "linfsindy/serialization.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

using namespace linfsindy;

namespace {

Trajectory sampled(const std::function<double(double)>& f, double dt, std::size_t n) {
    Trajectory t;
    t.dt = dt;
    t.values.resize(static_cast<Eigen::Index>(n), 1);
    for (std::size_t i = 0; i < n; ++i) {
        t.times.push_back(static_cast<double>(i) * dt);
        t.values(static_cast<Eigen::Index>(i), 0) = f(t.times.back());
    }
    return t;
}

Trajectory lorenz(double dt, double t_end) {
    Vector x0(3);
    x0 << -8, 8, 27;
    return integrate(lorenz_system(), x0, dt, t_end);
}

} // namespace

TEST_CASE("central difference is exact on quadratics") {
    const DerivativeSeries d = central_difference(sampled([](double t) { return t * t; }, 1.0, 5));
    CHECK(d.first_index == 1);
    CHECK(d.last_index == 3);
    REQUIRE(d.size() == 3);
    CHECK(d.values(0, 0) == doctest::Approx(2.0));
    CHECK(d.values(1, 0) == doctest::Approx(4.0));
    CHECK(d.values(2, 0) == doctest::Approx(6.0));
    CHECK(d.times == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("central difference of a constant is zero") {
    const DerivativeSeries d = central_difference(sampled([](double) { return 3.5; }, 0.1, 20));
    CHECK(d.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("central difference truncation error on sin") {
    const double dt = 0.01;
    const DerivativeSeries d = central_difference(sampled([](double t) { return std::sin(t); }, dt, 201));
    // t = 1 is source index 100, row 99.
    CHECK(d.times[99] == doctest::Approx(1.0));
    const double expected = std::cos(1.0) * (1.0 - dt * dt / 6.0);
    CHECK(std::abs(d.values(99, 0) - 0.540293) < 1e-5);
    CHECK(std::abs(d.values(99, 0) - expected) < 1e-9);
}

TEST_CASE("central difference converges quadratically") {
    auto max_err = [](double dt) {
        const std::size_t n = static_cast<std::size_t>(std::round(2.0 / dt)) + 1;
        const DerivativeSeries d = central_difference(sampled([](double t) { return std::sin(t); }, dt, n));
        double worst = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            worst = std::max(worst, std::abs(d.values(static_cast<Eigen::Index>(i), 0) - std::cos(d.times[i])));
        }
        return worst;
    };
    const double ratio = max_err(0.02) / max_err(0.01);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("central difference needs three samples") {
    CHECK_THROWS_AS(central_difference(sampled([](double t) { return t; }, 1.0, 2)), InsufficientDataError);
}

TEST_CASE("polynomial derivative is exact on quadratics") {
    const double dt = 0.1;
    const DerivativeSeries d =
        polynomial_derivative(sampled([](double t) { return t * t; }, dt, 30), 5, 2);
    CHECK(d.first_index == 2);
    CHECK(d.last_index == 27);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.values(static_cast<Eigen::Index>(i), 0) == doctest::Approx(2.0 * d.times[i]).epsilon(1e-10));
    }
}

TEST_CASE("polynomial derivative of a constant is zero") {
    const DerivativeSeries d = polynomial_derivative(sampled([](double) { return -2.0; }, 0.5, 15), 7, 3);
    CHECK(d.values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("polynomial derivative on sin") {
    const DerivativeSeries d =
        polynomial_derivative(sampled([](double t) { return std::sin(t); }, 0.01, 600), 7, 3);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        worst = std::max(worst, std::abs(d.values(static_cast<Eigen::Index>(i), 0) - std::cos(d.times[i])));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("polynomial derivative is exact up to its degree (random polynomials)") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t degree = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
        const std::size_t window = 2 * degree + 1 + 2 * static_cast<std::size_t>(rng.uniform() * 3.0);
        const std::size_t poly_degree = static_cast<std::size_t>(rng.uniform() * static_cast<double>(degree + 1));
        std::vector<double> coeffs(poly_degree + 1);
        for (double& c : coeffs) c = rng.uniform(-2, 2);
        auto p = [&](double t) {
            double v = 0.0;
            for (std::size_t j = coeffs.size(); j-- > 0;) v = v * t + coeffs[j];
            return v;
        };
        auto dp = [&](double t) {
            double v = 0.0;
            for (std::size_t j = coeffs.size(); j-- > 1;) v = v * t + static_cast<double>(j) * coeffs[j];
            return v;
        };
        const double dt = 0.05;
        const DerivativeSeries d = polynomial_derivative(sampled(p, dt, 40), window, degree);
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(std::abs(d.values(static_cast<Eigen::Index>(i), 0) - dp(d.times[i])) < 1e-9);
        }
    }
}

TEST_CASE("polynomial derivative configuration errors") {
    const Trajectory t = sampled([](double x) { return x; }, 1.0, 6);
    CHECK_THROWS_AS(polynomial_derivative(t, 4, 2), ConfigError);
    CHECK_THROWS_AS(polynomial_derivative(t, 7, 2), ConfigError);
    CHECK_THROWS_AS(polynomial_derivative(t, 5, 5), ConfigError);
}

TEST_CASE("measured derivative") {
    const Trajectory traj = lorenz(0.01, 2.0);
    SUBCASE("noise-free rows equal the true right-hand side") {
        const DerivativeSeries d = measured_derivative(lorenz_system(), traj, {0.0, 1});
        CHECK(d.first_index == 0);
        CHECK(d.last_index == traj.size() - 1);
        CHECK(d.values(0, 0) == doctest::Approx(160.0));
        CHECK(d.values(0, 1) == doctest::Approx(-16.0));
        CHECK(d.values(0, 2) == doctest::Approx(-136.0));
        for (Eigen::Index i = 0; i < traj.values.rows(); i += 37) {
            const Vector s = traj.values.row(i).transpose();
            CHECK((d.values.row(i).transpose().array() == lorenz_rhs(s, lorenz_default_parameters()).array()).all());
        }
    }
    SUBCASE("noise is reproducible") {
        const DerivativeSeries a = measured_derivative(lorenz_system(), traj, {0.1, 5});
        const DerivativeSeries b = measured_derivative(lorenz_system(), traj, {0.1, 5});
        CHECK((a.values.array() == b.values.array()).all());
    }
}

TEST_CASE("error_stats") {
    const Trajectory traj = lorenz(0.01, 2.0);
    const DerivativeSeries truth = measured_derivative(lorenz_system(), traj, {0.0, 0});
    SUBCASE("identical series") {
        const ApproxErrorStats s = error_stats(truth, truth);
        CHECK(s.max_abs.cwiseAbs().maxCoeff() == 0.0);
        CHECK(s.mean.cwiseAbs().maxCoeff() == 0.0);
        CHECK(s.std.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("constant offset") {
        DerivativeSeries shifted = truth;
        shifted.values.array() += 1.0;
        const ApproxErrorStats s = error_stats(shifted, truth);
        for (int k = 0; k < 3; ++k) {
            CHECK(s.mean[k] == doctest::Approx(1.0));
            CHECK(s.max_abs[k] == doctest::Approx(1.0));
            CHECK(s.std[k] < 1e-12);
        }
    }
    SUBCASE("ranges are intersected") {
        const DerivativeSeries cd = central_difference(traj);
        const ApproxErrorStats s = error_stats(cd, truth);
        CHECK(s.max_abs.minCoeff() > 0.0);
        CHECK((s.std.array() >= 0.0).all());
    }
    SUBCASE("disjoint ranges") {
        DerivativeSeries a = truth;
        a.first_index = 1000;
        a.last_index = 1000 + a.size() - 1;
        CHECK_THROWS_AS(error_stats(a, truth), InsufficientDataError);
    }
}

TEST_CASE("central difference on Lorenz converges at second order") {
    auto max_err = [](double dt) {
        const Trajectory traj = lorenz(dt, 10.0);
        const DerivativeSeries truth = measured_derivative(lorenz_system(), traj, {0.0, 0});
        return error_stats(central_difference(traj), truth).max_abs.maxCoeff();
    };
    const double ratio = max_err(0.01) / max_err(0.005);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("aligned rows follow the valid range") {
    const Trajectory traj = lorenz(0.01, 1.0);
    const DerivativeSeries d = polynomial_derivative(traj, 7, 3);
    const Matrix rows = aligned_rows(traj.values, d);
    CHECK(rows.rows() == static_cast<Eigen::Index>(d.size()));
    CHECK((rows.row(0).array() == traj.values.row(3).array()).all());
}

TEST_CASE("derivative csv header") {
    const DerivativeSeries d = central_difference(lorenz(0.01, 0.1));
    std::stringstream ss;
    write_derivative_csv(ss, d);
    CHECK(ss.str().rfind("t,dx1,dx2,dx3\n", 0) == 0);
}
