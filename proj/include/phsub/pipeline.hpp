#pragma once

#include <optional>
#include <string_view>

#include "phsub/analysis.hpp"
#include "phsub/detection.hpp"
#include "phsub/evolution.hpp"
#include "phsub/trimer.hpp"

namespace phsub {

/// Squeezed source pushed through the trimer once; every heralded quantity
/// for this (r, Theta) is derived from `output`.
struct EvolvedSource {
    SqueezeSource source;
    TrimerUnitary unitary;
    ThreeModeState output;
};

EvolvedSource evolve_source(Complex r, const TrimerUnitary& unitary, std::optional<int> l_max_override = std::nullopt,
                            double tail_tolerance = kDefaultTailTolerance);

/// Joint distribution with a shared efficiency on both outer ports; provenance filled in.
JointDistribution heralded_distribution(const EvolvedSource& evolved, int subtracted, double eta_b, double eta_outer);

enum class Observable { MeanPhoton, DetM, Xi };

std::string_view observable_name(Observable obs);
std::optional<Observable> parse_observable(std::string_view name);

/// Value of `obs` for the heralded state. Xi is defined for ideal detection
/// only and raises ContractError when either efficiency is below 1.
double observable_value(const EvolvedSource& evolved, Observable obs, int subtracted, double eta_b, double eta_outer);

}  // namespace phsub
