#include "phsub/pipeline.hpp"

#include "phsub/errors.hpp"

namespace phsub {

EvolvedSource evolve_source(Complex r, const TrimerUnitary& unitary, std::optional<int> l_max_override,
                            double tail_tolerance) {
    EvolvedSource e{make_source(r, l_max_override, tail_tolerance), unitary, {}};
    e.output = evolve_multinomial(prepare_input(e.source), unitary);
    return e;
}

JointDistribution heralded_distribution(const EvolvedSource& evolved, int subtracted, double eta_b, double eta_outer) {
    JointDistribution jd =
        joint_distribution(evolved.output, PnrPovm{subtracted, eta_b}, OuterDetectors::shared(eta_outer));
    jd.params.r = evolved.source.r;
    jd.params.theta = evolved.unitary.theta;
    return jd;
}

std::string_view observable_name(Observable obs) {
    switch (obs) {
        case Observable::MeanPhoton: return "meanphoton";
        case Observable::DetM: return "detM";
        case Observable::Xi: return "xi";
    }
    return "";
}

std::optional<Observable> parse_observable(std::string_view name) {
    for (auto obs : {Observable::MeanPhoton, Observable::DetM, Observable::Xi}) {
        if (name == observable_name(obs)) return obs;
    }
    return std::nullopt;
}

double observable_value(const EvolvedSource& evolved, Observable obs, int subtracted, double eta_b, double eta_outer) {
    switch (obs) {
        case Observable::MeanPhoton:
            return mean_total_photons(heralded_distribution(evolved, subtracted, eta_b, eta_outer));
        case Observable::DetM:
            return moment_matrix(heralded_distribution(evolved, subtracted, eta_b, eta_outer)).determinant;
        case Observable::Xi:
            if (eta_b != 1.0 || eta_outer != 1.0) {
                throw ContractError("participation ratio is defined for ideal detection (eta = 1) only");
            }
            return participation_ratio(conditional_pure_state(evolved.output, subtracted).state).participation_ratio;
    }
    throw ContractError("unknown observable");
}

}  // namespace phsub
