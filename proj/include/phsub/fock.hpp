#pragma once

// Truncated three-mode Fock space.
//
// States of the trimer live in the span of |n_a, n_b, n_c> with a bounded
// total photon number. The linear-optical evolution conserves that total,
// so amplitudes are stored as one dense block per total T, holding every
// triple with n_a + n_b + n_c = T. Inside a block, triples are ordered by
// n_a then n_b (n_c is implied).

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace phsub {

using Complex = std::complex<double>;

inline constexpr double kPruneThreshold = 1e-16;
inline constexpr double kDefaultNormTolerance = 1e-12;

struct OccupationTriple {
    int a = 0;
    int b = 0;
    int c = 0;

    constexpr int total() const { return a + b + c; }
    friend constexpr auto operator<=>(const OccupationTriple&, const OccupationTriple&) = default;
};

/// Number of triples with a fixed total: (T+1)(T+2)/2.
std::size_t block_dimension(int total);
std::size_t block_index(int total, int n_a, int n_b);
OccupationTriple block_triple(int total, std::size_t index);

struct Block {
    int total = 0;
    std::vector<Complex> amplitudes;  // size block_dimension(total)
};

/// Immutable pure state of modes (a, b, c).
///
/// `cutoff` bounds the total photon number and therefore every single-mode
/// occupation. Blocks are kept sorted by total; totals that carry no
/// amplitude are simply absent.
class ThreeModeState {
public:
    ThreeModeState() = default;
    ThreeModeState(int cutoff, std::vector<Block> blocks,
                   double norm_tolerance = kDefaultNormTolerance);

    static ThreeModeState from_amplitudes(int cutoff, const std::map<OccupationTriple, Complex>& amplitudes,
                                          double norm_tolerance = kDefaultNormTolerance);
    static ThreeModeState vacuum();

    int cutoff() const { return cutoff_; }
    double norm_tolerance() const { return norm_tolerance_; }
    std::span<const Block> blocks() const { return blocks_; }
    const Block* block(int total) const;

    Complex amplitude(const OccupationTriple& t) const;
    double norm_squared() const;
    double block_weight(int total) const;
    int max_total() const { return blocks_.empty() ? 0 : blocks_.back().total; }

    /// Zero every amplitude with modulus below `threshold`; drop blocks left empty.
    ThreeModeState pruned(double threshold = kPruneThreshold) const;
    ThreeModeState scaled(Complex factor) const;

    template <class F>
    void for_each(F&& f) const {
        for (const auto& blk : blocks_) {
            for (std::size_t i = 0; i < blk.amplitudes.size(); ++i) {
                f(block_triple(blk.total, i), blk.amplitudes[i]);
            }
        }
    }

private:
    int cutoff_ = 0;
    double norm_tolerance_ = kDefaultNormTolerance;
    std::vector<Block> blocks_;
};

/// Rescale to unit norm, keeping relative phases. Throws ZeroStateError on a zero state.
ThreeModeState normalize(const ThreeModeState& state);

/// Copy of the per-total blocks; concatenating them reproduces the state.
std::vector<Block> block_by_total(const ThreeModeState& state);

/// Pure (possibly unnormalized) state of modes a and c; amplitudes(m, n) is <m|_a <n|_c.
class TwoModeState {
public:
    TwoModeState() = default;
    explicit TwoModeState(Eigen::MatrixXcd amplitudes) : amplitudes_(std::move(amplitudes)) {}

    const Eigen::MatrixXcd& amplitudes() const { return amplitudes_; }
    Complex amplitude(int m, int n) const;
    int dim_a() const { return static_cast<int>(amplitudes_.rows()); }
    int dim_c() const { return static_cast<int>(amplitudes_.cols()); }
    double norm_squared() const { return amplitudes_.squaredNorm(); }
    bool empty() const { return amplitudes_.size() == 0 || norm_squared() == 0.0; }
    TwoModeState normalized() const;

private:
    Eigen::MatrixXcd amplitudes_;
};

/// Amplitudes of `state` on the n_b = fixed_b slice, as an (a, c) matrix.
/// Returns an all-zero slice when fixed_b exceeds the cutoff.
TwoModeState partial_trace_b(const ThreeModeState& state, int fixed_b);

/// Density operator of modes (a, c), held as a non-negative mixture of pure
/// components: rho = sum_k w_k |s_k><s_k|.
///
/// Every operator the detection stage produces has this form, and keeping it
/// factored avoids materializing a (D^2 x D^2) matrix. Hermiticity and
/// positivity hold by construction; `to_dense` is available for small cases.
class TwoModeDensity {
public:
    struct Component {
        double weight = 0.0;
        Eigen::MatrixXcd amplitudes;
    };

    TwoModeDensity() = default;
    explicit TwoModeDensity(std::vector<Component> components);
    static TwoModeDensity from_pure(const TwoModeState& state);

    std::span<const Component> components() const { return components_; }
    int dim_a() const { return dim_a_; }
    int dim_c() const { return dim_c_; }

    Complex element(int m, int n, int m_prime, int n_prime) const;
    double trace() const;
    /// Photon-number diagonal <m,n|rho|m,n>.
    Eigen::MatrixXd number_diagonal() const;
    /// Dense matrix with composite index m * dim_c + n. Throws ResourceError above max_dim.
    Eigen::MatrixXcd to_dense(std::size_t max_dim = 4096) const;
    TwoModeDensity normalized() const;

private:
    std::vector<Component> components_;
    int dim_a_ = 0;
    int dim_c_ = 0;
};

/// rho_a = Tr_c(rho).
Eigen::MatrixXcd partial_trace_c(const TwoModeDensity& density);
/// rho_c = Tr_a(rho).
Eigen::MatrixXcd partial_trace_a(const TwoModeDensity& density);

}  // namespace phsub
