#include "phsub/combinatorics.hpp"

#include <cmath>

namespace phsub {

std::vector<double> log_factorials(int n_max) {
    std::vector<double> table(static_cast<std::size_t>(n_max < 0 ? 0 : n_max) + 1, 0.0);
    for (std::size_t k = 2; k < table.size(); ++k) {
        table[k] = table[k - 1] + std::log(static_cast<double>(k));
    }
    return table;
}

double binomial_detection(int j, int k, double eta) {
    if (k < 0 || j < k) return 0.0;
    if (eta == 1.0) return j == k ? 1.0 : 0.0;
    if (eta == 0.0) return k == 0 ? 1.0 : 0.0;
    const double log_c = std::lgamma(j + 1.0) - std::lgamma(k + 1.0) - std::lgamma(j - k + 1.0);
    return std::exp(log_c + k * std::log(eta) + (j - k) * std::log1p(-eta));
}

}  // namespace phsub
