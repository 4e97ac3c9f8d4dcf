#include "phsub/detection.hpp"

#include <string>

#include "phsub/combinatorics.hpp"
#include "phsub/errors.hpp"

namespace phsub {

namespace {

void check_efficiency(double eta, const char* what) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError(std::string(what) + " efficiency must lie in (0, 1]");
}

// Rows m, columns i: probability that i incident photons register as m counts.
Eigen::MatrixXd loss_matrix(int dim, double eta) {
    Eigen::MatrixXd b(dim, dim);
    for (int m = 0; m < dim; ++m) {
        for (int i = 0; i < dim; ++i) b(m, i) = binomial_detection(i, m, eta);
    }
    return b;
}

}  // namespace

void PnrPovm::validate() const {
    if (subtracted < 0) throw DomainError("detected photon count must be non-negative");
    check_efficiency(efficiency, "detector");
}

double PnrPovm::weight(int j) const { return binomial_detection(j, subtracted, efficiency); }

std::vector<double> povm_weights(const PnrPovm& povm, int j_max) {
    povm.validate();
    if (j_max < povm.subtracted) throw ContractError("j_max must be at least the detected count");
    std::vector<double> w(static_cast<std::size_t>(j_max) + 1);
    for (int j = 0; j <= j_max; ++j) w[j] = povm.weight(j);
    return w;
}

ConditionalState conditional_pure_state(const ThreeModeState& out, int subtracted) {
    if (subtracted < 0) throw DomainError("detected photon count must be non-negative");
    TwoModeState slice = partial_trace_b(out, subtracted);
    const double p = slice.norm_squared();
    if (!(p > 0.0)) {
        throw HeraldImpossibleError("no amplitude with " + std::to_string(subtracted) + " photons in the center port");
    }
    TwoModeState normalized = slice.normalized();
    return {std::move(slice), p, std::move(normalized)};
}

TwoModeDensity subtracted_density(const ThreeModeState& out, const PnrPovm& povm) {
    povm.validate();
    std::vector<TwoModeDensity::Component> comps;
    for (int j = povm.subtracted; j <= out.cutoff(); ++j) {
        const double w = povm.weight(j);
        if (w == 0.0) continue;
        TwoModeState slice = partial_trace_b(out, j);
        if (slice.norm_squared() == 0.0) continue;
        comps.push_back({w, slice.amplitudes()});
    }
    TwoModeDensity rho(std::move(comps));
    if (!(rho.trace() > 0.0)) {
        throw HeraldImpossibleError("detection of " + std::to_string(povm.subtracted) + " photons has zero probability");
    }
    return rho;
}

int JointDistribution::reported_extent(double coverage_gap) const {
    const auto dim = static_cast<int>(probabilities.rows());
    const double target = total() - coverage_gap;
    for (int k = 1; k <= dim; ++k) {
        if (probabilities.topLeftCorner(k, k).sum() >= target) return k;
    }
    return dim;
}

JointDistribution joint_distribution(const ThreeModeState& out, const PnrPovm& povm_b, const OuterDetectors& outer) {
    check_efficiency(outer.eta_a, "port a");
    check_efficiency(outer.eta_c, "port c");
    const TwoModeDensity rho = subtracted_density(out, povm_b);

    const Eigen::MatrixXd diag = rho.number_diagonal();
    const int dim = static_cast<int>(diag.rows());
    // P_N(m, n) = sum_{i,k} B_a(m, i) <i,k|rho|i,k> B_c(n, k)
    Eigen::MatrixXd raw = loss_matrix(dim, outer.eta_a) * diag * loss_matrix(dim, outer.eta_c).transpose();
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        double& x = raw.data()[i];
        if (x < -1e-12) throw NumericalError("negative joint probability " + std::to_string(x));
        if (x < 0.0) x = 0.0;
    }
    const double success = raw.sum();
    if (!(success > 0.0)) throw HeraldImpossibleError("heralded joint distribution has zero weight");

    JointDistribution jd;
    jd.probabilities = raw / success;
    jd.raw = std::move(raw);
    jd.success_probability = success;
    jd.params.subtracted = povm_b.subtracted;
    jd.params.eta_b = povm_b.efficiency;
    jd.params.eta_a = outer.eta_a;
    jd.params.eta_c = outer.eta_c;
    return jd;
}

}  // namespace phsub
