#include "phsub/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "phsub/errors.hpp"

namespace phsub {

namespace {

constexpr double kNormalizationTolerance = 1e-9;
constexpr double kEigenvalueFloor = 1e-14;

double falling_factorial(int x, int k) {
    double f = 1.0;
    for (int i = 0; i < k; ++i) f *= static_cast<double>(x - i);
    return f;
}

}  // namespace

double mean_total_photons(const JointDistribution& dist) {
    const double total = dist.total();
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw ContractError("mean photon number needs a normalized distribution (sum = " + std::to_string(total) + ")");
    }
    return 2.0 * factorial_moment(dist, 0, 1);
}

double factorial_moment(const JointDistribution& dist, int u, int v) {
    if (u < 0 || v < 0) throw ContractError("moment orders must be non-negative");
    const auto& p = dist.probabilities;
    double sum = 0.0;
    for (Eigen::Index m = 0; m < p.rows(); ++m) {
        const double fm = falling_factorial(static_cast<int>(m), u);
        if (fm == 0.0) continue;
        for (Eigen::Index n = 0; n < p.cols(); ++n) {
            sum += p(m, n) * fm * falling_factorial(static_cast<int>(n), v);
        }
    }
    return sum;
}

double determinant3(const Eigen::Matrix3d& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

MomentMatrix moment_matrix(const JointDistribution& dist) {
    MomentMatrix mm;
    const double ma = factorial_moment(dist, 1, 0);
    const double mc = factorial_moment(dist, 0, 1);
    const double mac = factorial_moment(dist, 1, 1);
    mm.entries << factorial_moment(dist, 0, 0), ma, mc,
                  ma, factorial_moment(dist, 2, 0), mac,
                  mc, mac, factorial_moment(dist, 0, 2);
    mm.determinant = determinant3(mm.entries);
    mm.params = dist.params;
    return mm;
}

SchmidtSpectrum participation_ratio(const TwoModeState& state, TracedMode traced) {
    const double n2 = state.norm_squared();
    if (std::abs(n2 - 1.0) > kNormalizationTolerance) {
        throw ContractError("participation ratio needs a normalized state (norm^2 = " + std::to_string(n2) + ")");
    }
    const auto& s = state.amplitudes();
    const Eigen::MatrixXcd rho = traced == TracedMode::C ? Eigen::MatrixXcd(s * s.adjoint())
                                                         : Eigen::MatrixXcd(s.transpose() * s.conjugate());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("reduced density diagonalization failed");

    SchmidtSpectrum out;
    out.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
    double purity = 0.0;
    for (double& p : out.eigenvalues) {
        if (p < kEigenvalueFloor) p = 0.0;
        purity += p * p;
        out.coefficients.push_back(std::sqrt(p));
    }
    out.participation_ratio = 1.0 / purity;
    return out;
}

}  // namespace phsub
