#pragma once

#include <Eigen/Dense>

namespace phsub {

/// Three identical, evenly coupled waveguides a-b-c.
///
/// `beta` is carried for completeness only. On states of fixed photon number
/// it contributes a phase exp(-i beta n z) that no number-basis observable
/// sees, so it is left out of the mode-mixing matrix.
struct CouplerConfig {
    double kappa = 1.0;
    double z = 0.0;
    double beta = 0.0;

    void validate() const;
    /// Theta = sqrt(2) * kappa * z.
    double theta() const;
};

/// Mode-mixing matrix of the trimer. Acting on the creation-operator column
/// (a^dag, b^dag, c^dag) it gives the operators at the output.
struct TrimerUnitary {
    Eigen::Matrix3cd entries;
    double theta = 0.0;

    std::complex<double> operator()(int i, int j) const { return entries(i, j); }
};

TrimerUnitary build_unitary(const CouplerConfig& config);
TrimerUnitary unitary_from_theta(double theta);

/// Smallest z >= 0 with I_center / I_outer = tan^2(sqrt(2) kappa z) = target_ratio.
double solve_zf(double kappa, double target_ratio);

/// I_center / I_outer for the symmetric input (1, 0, 1)/sqrt(2).
/// Throws DomainError when the outer ports are dark (Theta = pi/2 mod pi).
double intensity_ratio(const CouplerConfig& config);

inline constexpr double kDefaultSplitRatio = 1.0 / 9.0;

}  // namespace phsub
