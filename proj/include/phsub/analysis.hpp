#pragma once

#include <vector>

#include <Eigen/Dense>

#include "phsub/detection.hpp"
#include "phsub/fock.hpp"

namespace phsub {

/// 2 <n> with <n> = sum_{m,n} n P(m, n). Throws ContractError unless sum P = 1 within 1e-9.
double mean_total_photons(const JointDistribution& dist);

/// <: m_a^u m_c^v :> = sum P(m, n) m(m-1)...(m-u+1) n(n-1)...(n-v+1).
double factorial_moment(const JointDistribution& dist, int u, int v);

/// Second-order matrix of normally ordered moments, rows and columns (1, m_a, m_c).
/// A negative determinant witnesses nonclassical correlations.
struct MomentMatrix {
    Eigen::Matrix3d entries = Eigen::Matrix3d::Zero();
    double determinant = 0.0;
    DistributionParams params;

    bool nonclassical() const { return determinant < 0.0; }
};

MomentMatrix moment_matrix(const JointDistribution& dist);

/// Cofactor expansion along the first row.
double determinant3(const Eigen::Matrix3d& m);

enum class TracedMode { A, C };

/// Schmidt data of a bipartite pure state.
///
/// `eigenvalues` are the spectrum p_i of the reduced density matrix (sorted,
/// non-increasing, values below 1e-14 floored to zero); `coefficients` are the
/// Schmidt coefficients sqrt(p_i). The participation ratio is 1 / sum p_i^2.
struct SchmidtSpectrum {
    std::vector<double> eigenvalues;
    std::vector<double> coefficients;
    double participation_ratio = 1.0;
};

/// Throws ContractError unless the state has unit norm within 1e-9.
SchmidtSpectrum participation_ratio(const TwoModeState& state, TracedMode traced = TracedMode::C);

}  // namespace phsub
