#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "phsub/fock.hpp"
#include "phsub/trimer.hpp"

namespace phsub {

inline constexpr double kDefaultTailTolerance = 1e-10;

/// Two-mode squeezed vacuum sqrt(1-|r|^2) sum_l r^l |l>_a |l>_c, cut at l <= l_max.
struct SqueezeSource {
    Complex r{0.0, 0.0};
    int l_max = 0;

    void validate() const;
};

/// Probability mass dropped by truncating at l_max: (1-|r|^2) sum_{l>l_max} |r|^{2l} = |r|^{2(l_max+1)}.
double truncation_tail(double abs_r, int l_max);

/// Smallest l_max whose truncation tail is below `tail_tolerance`.
int default_lmax(double abs_r, double tail_tolerance = kDefaultTailTolerance);

/// Truncation tail weighted by (2l)^4, the growth rate of the second-order
/// factorial moments built from the heralded distribution:
/// (1-|r|^2) sum_{l>l_max} (2l)^4 |r|^{2l}.
double moment_weighted_tail(double abs_r, int l_max);

/// Upper limit for the automatic choice in observable_lmax.
inline constexpr int kMaxAutoLmax = 120;

/// Truncation used for heralded observables: at least default_lmax, and
/// raised until the moment-weighted tail is below `tail_tolerance`, but not
/// past kMaxAutoLmax.
int observable_lmax(double abs_r, double tail_tolerance = kDefaultTailTolerance);

/// Source with l_max taken from `l_max_override` or from observable_lmax.
SqueezeSource make_source(Complex r, std::optional<int> l_max_override = std::nullopt,
                          double tail_tolerance = kDefaultTailTolerance);

/// |l, 0, l> amplitudes sqrt(1-|r|^2) r^l for l <= l_max; cutoff 2 * l_max.
ThreeModeState prepare_input(const SqueezeSource& source);

/// One term of the output expansion for squeeze order l:
///
///   K = r^l / (p1! p2! p3!) * l! / ((v1-p1)! (v2-p2)! (v3-p3)!)
///       * U11^(p1+v3-p3) * U12^v2 * U13^(p3+v1-p1) * sqrt(v1! v2! v3!)
///
/// with p1+p2+p3 = l, v1+v2+v3 = 2l and v_i >= p_i. The amplitude on
/// |v1,v2,v3> is sqrt(1-|r|^2) times the sum of K over all admissible p.
struct MultinomialTerm {
    int l = 0;
    std::array<int, 3> p{};
    std::array<int, 3> v{};
    Complex coefficient{};
};

/// All admissible terms of order l, coefficients evaluated in the log domain.
std::vector<MultinomialTerm> multinomial_terms(int l, Complex r, const TrimerUnitary& u);

/// Output state for an input supported on |l,0,l> triples, via the
/// multinomial expansion. Throws ContractError for any other support.
ThreeModeState evolve_multinomial(const ThreeModeState& input, const TrimerUnitary& u);

struct OracleOptions {
    /// Largest total-photon block the oracle will diagonalize (T = 50).
    std::size_t max_block_dimension = 1326;
};

/// Generator of the trimer on the fixed-total block: kappa (a^dag b + b^dag a + b^dag c + c^dag b).
Eigen::MatrixXd coupling_generator(int total, double kappa);

/// Applies exp(-i z H) blockwise by dense symmetric eigendecomposition.
/// Works for any input state. Throws ResourceError for blocks above the limit.
ThreeModeState evolve_oracle(const ThreeModeState& input, const CouplerConfig& config,
                             const OracleOptions& options = {});

}  // namespace phsub
