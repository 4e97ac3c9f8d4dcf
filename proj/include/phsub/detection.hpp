#pragma once

#include <optional>
#include <vector>

#include "phsub/fock.hpp"

namespace phsub {

/// Photon-number-resolving detector that reported `subtracted` clicks.
/// Its POVM element is diagonal with weight C(j, N) eta^N (1-eta)^(j-N) on |j>.
struct PnrPovm {
    int subtracted = 0;
    double efficiency = 1.0;

    void validate() const;
    double weight(int j) const;
};

/// Weights for j = 0..j_max.
std::vector<double> povm_weights(const PnrPovm& povm, int j_max);

/// Heralded pure state of modes (a, c) for an ideal detector on b.
struct ConditionalState {
    TwoModeState unnormalized;  // slice of the output at n_b = N
    double success_probability = 0.0;
    TwoModeState state;  // normalized
};

/// Throws HeraldImpossibleError when no amplitude has n_b = N.
ConditionalState conditional_pure_state(const ThreeModeState& out, int subtracted);

/// rho_sub = Tr_b(P_b |out><out|) = sum_j w_j |slice_j><slice_j|, left unnormalized
/// so that its trace is the heralding probability.
TwoModeDensity subtracted_density(const ThreeModeState& out, const PnrPovm& povm);

/// Efficiencies of the detectors on the outer ports a and c.
struct OuterDetectors {
    double eta_a = 1.0;
    double eta_c = 1.0;

    static OuterDetectors shared(double eta) { return {eta, eta}; }
};

struct DistributionParams {
    int subtracted = 0;
    double eta_b = 1.0;
    double eta_a = 1.0;
    double eta_c = 1.0;
    std::optional<Complex> r;
    std::optional<double> theta;
};

/// Joint count statistics at the outer ports, conditioned on the herald.
struct JointDistribution {
    Eigen::MatrixXd probabilities;  // normalized P(m, n), m counts port a, n counts port c
    Eigen::MatrixXd raw;            // unnormalized P_N(m, n)
    double success_probability = 0.0;
    DistributionParams params;

    double total() const { return probabilities.sum(); }
    /// Smallest square extent K such that cells m, n < K hold >= 1 - coverage_gap of the mass.
    int reported_extent(double coverage_gap = 1e-8) const;
};

/// Raises NumericalError for any entry below -1e-12 and clips smaller negatives to 0.
JointDistribution joint_distribution(const ThreeModeState& out, const PnrPovm& povm_b, const OuterDetectors& outer);

}  // namespace phsub
