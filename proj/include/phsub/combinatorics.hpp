#pragma once

#include <vector>

namespace phsub {

/// ln(n!) for n = 0..n_max, by cumulative summation of ln k.
std::vector<double> log_factorials(int n_max);

/// C(j, k) eta^k (1-eta)^(j-k): probability that a detector of efficiency
/// eta registers k of j incident photons. Zero for k > j; exactly
/// delta_{j,k} at eta = 1.
double binomial_detection(int j, int k, double eta);

}  // namespace phsub
