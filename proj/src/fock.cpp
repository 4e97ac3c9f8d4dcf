#include "phsub/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phsub/errors.hpp"

namespace phsub {

std::size_t block_dimension(int total) {
    const auto t = static_cast<std::size_t>(total);
    return (t + 1) * (t + 2) / 2;
}

std::size_t block_index(int total, int n_a, int n_b) {
    // Rows n_a = 0..T each hold T - n_a + 1 entries.
    const auto t = static_cast<std::size_t>(total);
    const auto a = static_cast<std::size_t>(n_a);
    return a * (t + 1) - a * (a - 1) / 2 + static_cast<std::size_t>(n_b);
}

OccupationTriple block_triple(int total, std::size_t index) {
    int n_a = 0;
    std::size_t row = static_cast<std::size_t>(total) + 1;
    while (index >= row) {
        index -= row;
        --row;
        ++n_a;
    }
    const int n_b = static_cast<int>(index);
    return {n_a, n_b, total - n_a - n_b};
}

ThreeModeState::ThreeModeState(int cutoff, std::vector<Block> blocks, double norm_tolerance)
    : cutoff_(cutoff), norm_tolerance_(norm_tolerance), blocks_(std::move(blocks)) {
    if (cutoff_ < 0) throw ContractError("negative cutoff");
    std::sort(blocks_.begin(), blocks_.end(), [](const Block& x, const Block& y) { return x.total < y.total; });
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& blk = blocks_[i];
        if (blk.total < 0 || blk.total > cutoff_) {
            throw ContractError("block total " + std::to_string(blk.total) + " outside cutoff " +
                                std::to_string(cutoff_));
        }
        if (blk.amplitudes.size() != block_dimension(blk.total)) {
            throw ContractError("block " + std::to_string(blk.total) + " has wrong dimension");
        }
        if (i > 0 && blocks_[i - 1].total == blk.total) {
            throw ContractError("duplicate block total " + std::to_string(blk.total));
        }
    }
}

ThreeModeState ThreeModeState::from_amplitudes(int cutoff, const std::map<OccupationTriple, Complex>& amplitudes,
                                               double norm_tolerance) {
    std::map<int, Block> by_total;
    for (const auto& [t, amp] : amplitudes) {
        if (t.a < 0 || t.b < 0 || t.c < 0) throw ContractError("negative occupation");
        const int total = t.total();
        if (total > cutoff) {
            throw ContractError("triple (" + std::to_string(t.a) + "," + std::to_string(t.b) + "," +
                                std::to_string(t.c) + ") exceeds cutoff " + std::to_string(cutoff));
        }
        auto [it, inserted] = by_total.try_emplace(total);
        if (inserted) {
            it->second.total = total;
            it->second.amplitudes.assign(block_dimension(total), Complex{});
        }
        it->second.amplitudes[block_index(total, t.a, t.b)] = amp;
    }
    std::vector<Block> blocks;
    blocks.reserve(by_total.size());
    for (auto& [total, blk] : by_total) blocks.push_back(std::move(blk));
    return ThreeModeState(cutoff, std::move(blocks), norm_tolerance);
}

ThreeModeState ThreeModeState::vacuum() {
    return ThreeModeState(0, {Block{0, {Complex{1.0, 0.0}}}});
}

const Block* ThreeModeState::block(int total) const {
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), total,
                               [](const Block& blk, int t) { return blk.total < t; });
    if (it == blocks_.end() || it->total != total) return nullptr;
    return &*it;
}

Complex ThreeModeState::amplitude(const OccupationTriple& t) const {
    if (t.a < 0 || t.b < 0 || t.c < 0) return {};
    const Block* blk = block(t.total());
    if (blk == nullptr) return {};
    return blk->amplitudes[block_index(blk->total, t.a, t.b)];
}

double ThreeModeState::block_weight(int total) const {
    const Block* blk = block(total);
    if (blk == nullptr) return 0.0;
    double w = 0.0;
    for (const auto& amp : blk->amplitudes) w += std::norm(amp);
    return w;
}

double ThreeModeState::norm_squared() const {
    double w = 0.0;
    for (const auto& blk : blocks_) {
        for (const auto& amp : blk.amplitudes) w += std::norm(amp);
    }
    return w;
}

ThreeModeState ThreeModeState::pruned(double threshold) const {
    std::vector<Block> kept;
    kept.reserve(blocks_.size());
    for (const auto& blk : blocks_) {
        Block copy = blk;
        bool any = false;
        for (auto& amp : copy.amplitudes) {
            if (std::abs(amp) < threshold) {
                amp = Complex{};
            } else {
                any = true;
            }
        }
        if (any) kept.push_back(std::move(copy));
    }
    return ThreeModeState(cutoff_, std::move(kept), norm_tolerance_);
}

ThreeModeState ThreeModeState::scaled(Complex factor) const {
    std::vector<Block> out = blocks_;
    for (auto& blk : out) {
        for (auto& amp : blk.amplitudes) amp *= factor;
    }
    return ThreeModeState(cutoff_, std::move(out), norm_tolerance_);
}

ThreeModeState normalize(const ThreeModeState& state) {
    const double n2 = state.norm_squared();
    if (!(n2 > 0.0)) throw ZeroStateError("cannot normalize a zero state");
    return state.scaled(Complex{1.0 / std::sqrt(n2), 0.0});
}

std::vector<Block> block_by_total(const ThreeModeState& state) {
    return {state.blocks().begin(), state.blocks().end()};
}

Complex TwoModeState::amplitude(int m, int n) const {
    if (m < 0 || n < 0 || m >= dim_a() || n >= dim_c()) return {};
    return amplitudes_(m, n);
}

TwoModeState TwoModeState::normalized() const {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw ZeroStateError("cannot normalize a zero two-mode state");
    return TwoModeState(amplitudes_ / std::sqrt(n2));
}

TwoModeState partial_trace_b(const ThreeModeState& state, int fixed_b) {
    const int dim = state.cutoff() + 1;
    Eigen::MatrixXcd slice = Eigen::MatrixXcd::Zero(dim, dim);
    if (fixed_b < 0 || fixed_b > state.cutoff()) return TwoModeState(std::move(slice));
    for (const auto& blk : state.blocks()) {
        if (blk.total < fixed_b) continue;
        for (int n_a = 0; n_a <= blk.total - fixed_b; ++n_a) {
            slice(n_a, blk.total - fixed_b - n_a) = blk.amplitudes[block_index(blk.total, n_a, fixed_b)];
        }
    }
    return TwoModeState(std::move(slice));
}

TwoModeDensity::TwoModeDensity(std::vector<Component> components) : components_(std::move(components)) {
    for (const auto& comp : components_) {
        if (comp.weight < 0.0) throw ContractError("negative mixture weight");
        if (&comp == &components_.front()) {
            dim_a_ = static_cast<int>(comp.amplitudes.rows());
            dim_c_ = static_cast<int>(comp.amplitudes.cols());
        } else if (comp.amplitudes.rows() != dim_a_ || comp.amplitudes.cols() != dim_c_) {
            throw ContractError("mixture components have mismatched dimensions");
        }
    }
}

TwoModeDensity TwoModeDensity::from_pure(const TwoModeState& state) {
    return TwoModeDensity({Component{1.0, state.amplitudes()}});
}

Complex TwoModeDensity::element(int m, int n, int m_prime, int n_prime) const {
    if (m < 0 || n < 0 || m_prime < 0 || n_prime < 0 || m >= dim_a_ || m_prime >= dim_a_ || n >= dim_c_ ||
        n_prime >= dim_c_) {
        return {};
    }
    Complex sum{};
    for (const auto& comp : components_) {
        sum += comp.weight * comp.amplitudes(m, n) * std::conj(comp.amplitudes(m_prime, n_prime));
    }
    return sum;
}

double TwoModeDensity::trace() const {
    double t = 0.0;
    for (const auto& comp : components_) t += comp.weight * comp.amplitudes.squaredNorm();
    return t;
}

Eigen::MatrixXd TwoModeDensity::number_diagonal() const {
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(dim_a_, dim_c_);
    for (const auto& comp : components_) {
        if (comp.weight == 0.0) continue;
        diag += comp.weight * comp.amplitudes.cwiseAbs2();
    }
    return diag;
}

Eigen::MatrixXcd TwoModeDensity::to_dense(std::size_t max_dim) const {
    const auto dim = static_cast<std::size_t>(dim_a_) * static_cast<std::size_t>(dim_c_);
    if (dim > max_dim) throw ResourceError("dense two-mode density of dimension " + std::to_string(dim));
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& comp : components_) {
        // Row-major flattening so that index = m * dim_c + n.
        Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = comp.amplitudes;
        Eigen::Map<const Eigen::VectorXcd> v(rm.data(), static_cast<Eigen::Index>(dim));
        rho += comp.weight * v * v.adjoint();
    }
    return rho;
}

TwoModeDensity TwoModeDensity::normalized() const {
    const double t = trace();
    if (!(t > 0.0)) throw ZeroStateError("cannot normalize a zero-trace density");
    std::vector<Component> out = components_;
    for (auto& comp : out) comp.weight /= t;
    return TwoModeDensity(std::move(out));
}

Eigen::MatrixXcd partial_trace_c(const TwoModeDensity& density) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(density.dim_a(), density.dim_a());
    for (const auto& comp : density.components()) {
        rho += comp.weight * comp.amplitudes * comp.amplitudes.adjoint();
    }
    return rho;
}

Eigen::MatrixXcd partial_trace_a(const TwoModeDensity& density) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(density.dim_c(), density.dim_c());
    for (const auto& comp : density.components()) {
        rho += comp.weight * comp.amplitudes.transpose() * comp.amplitudes.conjugate();
    }
    return rho;
}

}  // namespace phsub
