#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "phsub/errors.hpp"
#include "phsub/trimer.hpp"

using namespace phsub;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

double max_abs(const Eigen::Matrix3cd& m) { return m.cwiseAbs().maxCoeff(); }

// exp(-i M z) for the tridiagonal coupling matrix, by diagonalizing M.
Eigen::Matrix3cd propagator_from_coupling(double kappa, double z) {
    Eigen::Matrix3d m;
    m << 0, kappa, 0, kappa, 0, kappa, 0, kappa, 0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m);
    Eigen::Vector3cd phases;
    for (int k = 0; k < 3; ++k) phases(k) = std::polar(1.0, -z * eig.eigenvalues()(k));
    const Eigen::Matrix3cd v = eig.eigenvectors().cast<std::complex<double>>();
    return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace

TEST_CASE("build_unitary special points") {
    CHECK(max_abs(build_unitary({1.0, 0.0, 0.0}).entries - Eigen::Matrix3cd::Identity()) == 0.0);

    const auto swap = build_unitary({1.0, pi / sqrt2, 0.0});
    CHECK(std::abs(swap(0, 0)) < 1e-15);
    CHECK(std::abs(swap(2, 2)) < 1e-15);
    CHECK(std::abs(swap(0, 2) + 1.0) < 1e-15);
    CHECK(std::abs(swap(2, 0) + 1.0) < 1e-15);
    CHECK(std::abs(swap(1, 1) + 1.0) < 1e-15);
    CHECK(std::abs(swap(0, 1)) < 1e-15);
    CHECK(std::abs(swap(1, 2)) < 1e-15);

    // z = 0.23 / kappa; reference values from cos and sin of 0.23 sqrt(2).
    const auto u = build_unitary({2.0, 0.115, 0.0});
    CHECK(u.theta == doctest::Approx(0.3252691193458119).epsilon(1e-14));
    CHECK(u(1, 1).real() == doctest::Approx(0.9475647599273841).epsilon(1e-14));
    CHECK(std::norm(u(0, 1)) == doctest::Approx(0.05106051287187944).epsilon(1e-13));
    const Eigen::Vector3cd out = u.entries * (Eigen::Vector3cd(1, 0, 1) / sqrt2);
    CHECK(std::norm(out(1)) == doctest::Approx(0.10212102574375888).epsilon(1e-13));
}

TEST_CASE("build_unitary matches the propagator of the coupled-mode equations") {
    for (double z : {0.0, 0.1, 0.2275, 0.9, 3.3}) {
        CHECK(max_abs(build_unitary({1.3, z, 0.0}).entries - propagator_from_coupling(1.3, z)) < 1e-13);
    }
}

TEST_CASE("unitarity, symmetry and periodicity over random angles") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
    for (int k = 0; k < 100; ++k) {
        const double theta = angle(rng);
        const auto u = unitary_from_theta(theta);
        CHECK(max_abs(u.entries * u.entries.adjoint() - Eigen::Matrix3cd::Identity()) < 1e-12);
        CHECK(u(0, 0) == u(2, 2));
        CHECK(u(0, 1) == u(2, 1));
        CHECK(u(0, 2) == u(2, 0));
        CHECK(u(1, 1) == std::cos(theta));
        CHECK(std::abs(u(0, 1) - std::complex<double>(0.0, -std::sin(theta) / sqrt2)) < 1e-16);
        CHECK(max_abs(unitary_from_theta(theta + 2.0 * pi).entries - u.entries) < 1e-12);
    }
}

TEST_CASE("beta does not enter the mixing matrix") {
    CHECK(build_unitary({1.0, 0.4, 5.0}).entries == build_unitary({1.0, 0.4, 0.0}).entries);
}

TEST_CASE("coupler validation") {
    CHECK_THROWS_AS(build_unitary({0.0, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(build_unitary({1.0, -0.1, 0.0}), DomainError);
}

TEST_CASE("solve_zf") {
    const double zf = solve_zf(1.0, 10.0 / 90.0);
    CHECK(zf == doctest::Approx(0.2275119988643968).epsilon(1e-14));
    CHECK(zf >= 0.225);
    CHECK(zf <= 0.230);
    CHECK(solve_zf(4.0, 1.0 / 9.0) == doctest::Approx(0.2275119988643968 / 4.0).epsilon(1e-14));
    CHECK(solve_zf(1.0, 0.0) == 0.0);
    CHECK(solve_zf(2.0, 1.0) == doctest::Approx(pi / 4.0 / (sqrt2 * 2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(solve_zf(1.0, -0.1), DomainError);
}

TEST_CASE("intensity_ratio") {
    CHECK(intensity_ratio({1.0, 0.0, 0.0}) == 0.0);
    CHECK(intensity_ratio({1.0, solve_zf(1.0, 1.0 / 9.0), 0.0}) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
    CHECK(intensity_ratio({1.0, (pi / 3.0) / sqrt2, 0.0}) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(intensity_ratio({1.0, (pi / 2.0) / sqrt2, 0.0}), DomainError);

    for (int k = 0; k <= 100; ++k) {
        const double x = 0.1 * k;
        CHECK(std::abs(intensity_ratio({0.7, solve_zf(0.7, x), 0.0}) - x) < 1e-10);
    }
}
