#include "phsub/trimer.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "phsub/errors.hpp"

namespace phsub {

void CouplerConfig::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
    if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("z must be non-negative");
}

double CouplerConfig::theta() const { return std::numbers::sqrt2 * kappa * z; }

TrimerUnitary unitary_from_theta(double theta) {
    using namespace std::complex_literals;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const std::complex<double> corner_same = 0.5 + 0.5 * c;
    const std::complex<double> corner_cross = -0.5 + 0.5 * c;
    const std::complex<double> hop = -1i * s / std::numbers::sqrt2;

    TrimerUnitary u;
    u.theta = theta;
    u.entries << corner_same, hop, corner_cross,
                 hop, c, hop,
                 corner_cross, hop, corner_same;
    return u;
}

TrimerUnitary build_unitary(const CouplerConfig& config) {
    config.validate();
    return unitary_from_theta(config.theta());
}

double solve_zf(double kappa, double target_ratio) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    if (!(target_ratio >= 0.0) || !std::isfinite(target_ratio)) {
        throw DomainError("intensity ratio must be a finite non-negative number");
    }
    return std::atan(std::sqrt(target_ratio)) / (std::numbers::sqrt2 * kappa);
}

double intensity_ratio(const CouplerConfig& config) {
    const TrimerUnitary u = build_unitary(config);
    const Eigen::Vector3cd input = Eigen::Vector3cd(1.0, 0.0, 1.0) / std::numbers::sqrt2;
    const Eigen::Vector3cd out = u.entries * input;
    const double outer = std::norm(out(0)) + std::norm(out(2));
    const double center = std::norm(out(1));
    if (outer < 1e-24) throw DomainError("outer ports carry no intensity (Theta = pi/2 mod pi)");
    return center / outer;
}

}  // namespace phsub
