#include "phsub/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "phsub/combinatorics.hpp"
#include "phsub/errors.hpp"

namespace phsub {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Modulus and phase of a complex base, raised to integer powers 0..k_max.
// Modulus is kept as a logarithm; 0^0 is 1 and 0^k (k > 0) is -inf.
struct PowerTable {
    std::vector<double> log_abs;
    std::vector<Complex> phase;

    PowerTable(Complex base, int k_max) : log_abs(k_max + 1, 0.0), phase(k_max + 1, Complex{1.0, 0.0}) {
        const double mag = std::abs(base);
        const double lm = mag > 0.0 ? std::log(mag) : kNegInf;
        const Complex unit = mag > 0.0 ? base / mag : Complex{1.0, 0.0};
        for (int k = 1; k <= k_max; ++k) {
            log_abs[k] = lm == kNegInf ? kNegInf : k * lm;
            phase[k] = phase[k - 1] * unit;
        }
    }
};

// Compositions of l into three non-negative parts, in (p1, p2) lexicographic order.
std::vector<std::array<int, 3>> compositions(int l) {
    std::vector<std::array<int, 3>> out;
    out.reserve(static_cast<std::size_t>((l + 1) * (l + 2) / 2));
    for (int p1 = 0; p1 <= l; ++p1) {
        for (int p2 = 0; p2 <= l - p1; ++p2) out.push_back({p1, p2, l - p1 - p2});
    }
    return out;
}

// Log-modulus and phase of the factors of K that depend on one composition
// alone. For the a^dag factor (index p): U11^p1 U12^p2 U13^p3 / p!.
// For the c^dag factor (index q = v - p): U13^q1 U12^q2 U11^q3 / q!.
struct FactorTerm {
    std::array<int, 3> idx;
    double log_abs;
    Complex phase;
};

std::vector<FactorTerm> factor_terms(int l, const PowerTable& u11, const PowerTable& u12, const PowerTable& u13,
                                     const std::vector<double>& lf, bool c_side) {
    std::vector<FactorTerm> out;
    for (const auto& k : compositions(l)) {
        const PowerTable& first = c_side ? u13 : u11;
        const PowerTable& last = c_side ? u11 : u13;
        const double la = first.log_abs[k[0]] + u12.log_abs[k[1]] + last.log_abs[k[2]];
        if (la == kNegInf) continue;
        out.push_back({k, la - lf[k[0]] - lf[k[1]] - lf[k[2]], first.phase[k[0]] * u12.phase[k[1]] * last.phase[k[2]]});
    }
    return out;
}

// Builds the block of total 2l: sum over (p, q) of prefactor * l! * A_p * B_q * sqrt(v!), v = p + q.
//
// A_p and B_q are rescaled so their largest modulus is 1 and summed into S(v)
// with Kahan compensation; the v-dependent factor and the removed scales are
// restored per entry in the log domain. Terms lost to underflow in A_p * B_q
// sit at least 1e-300 below the block's largest term.
Block expand_order(int l, double log_prefactor, Complex prefactor_phase, const TrimerUnitary& u,
                   const std::vector<double>& lf) {
    const int total = 2 * l;
    const PowerTable u11(u(0, 0), total);
    const PowerTable u12(u(0, 1), total);
    const PowerTable u13(u(0, 2), total);
    const auto a_side = factor_terms(l, u11, u12, u13, lf, false);
    const auto c_side = factor_terms(l, u11, u12, u13, lf, true);

    auto scaled = [](const std::vector<FactorTerm>& terms, double& shift) {
        shift = kNegInf;
        for (const auto& t : terms) shift = std::max(shift, t.log_abs);
        std::vector<Complex> out;
        out.reserve(terms.size());
        for (const auto& t : terms) out.push_back(std::exp(t.log_abs - shift) * t.phase);
        return out;
    };
    double a_shift = 0.0;
    double c_shift = 0.0;
    const auto a_vals = scaled(a_side, a_shift);
    const auto c_vals = scaled(c_side, c_shift);

    const std::size_t dim = block_dimension(total);
    std::vector<Complex> sum(dim);
    std::vector<Complex> comp(dim);
    std::vector<std::size_t> row_offset(static_cast<std::size_t>(total) + 1);
    for (int a = 0; a <= total; ++a) row_offset[a] = block_index(total, a, 0);
    for (std::size_t i = 0; i < a_side.size(); ++i) {
        const auto& pa = a_side[i].idx;
        const Complex av = a_vals[i];
        for (std::size_t k = 0; k < c_side.size(); ++k) {
            const auto& pc = c_side[k].idx;
            const std::size_t idx = row_offset[pa[0] + pc[0]] + static_cast<std::size_t>(pa[1] + pc[1]);
            const Complex y = av * c_vals[k] - comp[idx];
            const Complex t = sum[idx] + y;
            comp[idx] = (t - sum[idx]) - y;
            sum[idx] = t;
        }
    }

    Block blk{total, std::vector<Complex>(dim)};
    if (a_side.empty() || c_side.empty()) return blk;
    const double base = log_prefactor + lf[l] + a_shift + c_shift;
    for (std::size_t idx = 0; idx < dim; ++idx) {
        const double mag = std::abs(sum[idx]);
        if (mag == 0.0) continue;
        const OccupationTriple v = block_triple(total, idx);
        const double la = base + std::log(mag) + 0.5 * (lf[v.a] + lf[v.b] + lf[v.c]);
        blk.amplitudes[idx] = std::exp(la) * (prefactor_phase * sum[idx] / mag);
    }
    return blk;
}

}  // namespace

void SqueezeSource::validate() const {
    if (!(std::abs(r) < 1.0)) throw DomainError("squeeze parameter must satisfy |r| < 1");
    if (l_max < 0) throw DomainError("l_max must be non-negative");
}

double truncation_tail(double abs_r, int l_max) {
    return std::pow(abs_r * abs_r, static_cast<double>(l_max) + 1.0);
}

int default_lmax(double abs_r, double tail_tolerance) {
    if (!(abs_r >= 0.0 && abs_r < 1.0)) throw DomainError("squeeze parameter must satisfy |r| < 1");
    if (!(tail_tolerance > 0.0)) throw DomainError("tail tolerance must be positive");
    int l_max = 0;
    while (!(truncation_tail(abs_r, l_max) < tail_tolerance)) ++l_max;
    return l_max;
}

double moment_weighted_tail(double abs_r, int l_max) {
    const double x = abs_r * abs_r;
    double sum = 0.0;
    double power = std::pow(x, static_cast<double>(l_max) + 1.0);
    for (int l = l_max + 1; power > 0.0; ++l, power *= x) {
        const double w = std::pow(2.0 * l, 4) * power;
        sum += w;
        if (w < 1e-18 * sum) break;
    }
    return (1.0 - x) * sum;
}

int observable_lmax(double abs_r, double tail_tolerance) {
    const int base = default_lmax(abs_r, tail_tolerance);
    int l_max = base;
    while (l_max < kMaxAutoLmax && !(moment_weighted_tail(abs_r, l_max) < tail_tolerance)) ++l_max;
    return std::max(base, l_max);
}

SqueezeSource make_source(Complex r, std::optional<int> l_max_override, double tail_tolerance) {
    SqueezeSource s{r, l_max_override ? *l_max_override : observable_lmax(std::abs(r), tail_tolerance)};
    s.validate();
    return s;
}

ThreeModeState prepare_input(const SqueezeSource& source) {
    source.validate();
    const double norm = std::sqrt(1.0 - std::norm(source.r));
    std::map<OccupationTriple, Complex> amps;
    Complex rl{1.0, 0.0};
    for (int l = 0; l <= source.l_max; ++l) {
        amps[{l, 0, l}] = norm * rl;
        rl *= source.r;
    }
    return ThreeModeState::from_amplitudes(2 * source.l_max, amps);
}

std::vector<MultinomialTerm> multinomial_terms(int l, Complex r, const TrimerUnitary& u) {
    if (l < 0) throw ContractError("negative squeeze order");
    const auto lf = log_factorials(2 * l);
    const PowerTable u11(u(0, 0), 2 * l);
    const PowerTable u12(u(0, 1), 2 * l);
    const PowerTable u13(u(0, 2), 2 * l);
    const PowerTable rp(r, l);

    std::vector<MultinomialTerm> out;
    for (const auto& p : compositions(l)) {
        for (const auto& q : compositions(l)) {
            const std::array<int, 3> v{p[0] + q[0], p[1] + q[1], p[2] + q[2]};
            const double la = rp.log_abs[l] - lf[p[0]] - lf[p[1]] - lf[p[2]] + lf[l] - lf[q[0]] - lf[q[1]] -
                              lf[q[2]] + u11.log_abs[p[0] + q[2]] + u12.log_abs[v[1]] + u13.log_abs[p[2] + q[0]] +
                              0.5 * (lf[v[0]] + lf[v[1]] + lf[v[2]]);
            const Complex ph = rp.phase[l] * u11.phase[p[0] + q[2]] * u12.phase[v[1]] * u13.phase[p[2] + q[0]];
            out.push_back({l, p, v, la == kNegInf ? Complex{} : std::exp(la) * ph});
        }
    }
    return out;
}

ThreeModeState evolve_multinomial(const ThreeModeState& input, const TrimerUnitary& u) {
    std::vector<std::pair<int, Complex>> orders;
    for (const auto& blk : input.blocks()) {
        for (std::size_t i = 0; i < blk.amplitudes.size(); ++i) {
            const Complex amp = blk.amplitudes[i];
            if (amp == Complex{}) continue;
            const OccupationTriple t = block_triple(blk.total, i);
            if (t.b != 0 || t.a != t.c) {
                throw ContractError("multinomial evolution needs support on |l,0,l> only; found (" +
                                    std::to_string(t.a) + "," + std::to_string(t.b) + "," + std::to_string(t.c) +
                                    "); use evolve_oracle for general inputs");
            }
            orders.emplace_back(t.a, amp);
        }
    }

    const auto lf = log_factorials(input.cutoff());
    std::vector<Block> blocks;
    blocks.reserve(orders.size());
    for (const auto& [l, amp] : orders) {
        // The input amplitude already carries sqrt(1-|r|^2) r^l.
        blocks.push_back(expand_order(l, std::log(std::abs(amp)), amp / std::abs(amp), u, lf));
    }
    return ThreeModeState(input.cutoff(), std::move(blocks), input.norm_tolerance()).pruned();
}

Eigen::MatrixXd coupling_generator(int total, double kappa) {
    const auto dim = static_cast<Eigen::Index>(block_dimension(total));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const OccupationTriple t = block_triple(total, static_cast<std::size_t>(i));
        if (t.b == 0) continue;
        // b -> a and b -> c hops; the Hermitian partners fill the transpose.
        const auto to_a = static_cast<Eigen::Index>(block_index(total, t.a + 1, t.b - 1));
        const auto to_c = static_cast<Eigen::Index>(block_index(total, t.a, t.b - 1));
        const double amp_a = kappa * std::sqrt(static_cast<double>((t.a + 1) * t.b));
        const double amp_c = kappa * std::sqrt(static_cast<double>(t.b * (t.c + 1)));
        h(to_a, i) += amp_a;
        h(i, to_a) += amp_a;
        h(to_c, i) += amp_c;
        h(i, to_c) += amp_c;
    }
    return h;
}

ThreeModeState evolve_oracle(const ThreeModeState& input, const CouplerConfig& config, const OracleOptions& options) {
    config.validate();
    std::vector<Block> blocks;
    blocks.reserve(input.blocks().size());
    for (const auto& blk : input.blocks()) {
        const std::size_t dim = blk.amplitudes.size();
        if (dim > options.max_block_dimension) {
            throw ResourceError("oracle block at total " + std::to_string(blk.total) + " has dimension " +
                                std::to_string(dim) + " > limit " + std::to_string(options.max_block_dimension));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(coupling_generator(blk.total, config.kappa));
        if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
        const Eigen::MatrixXd& vecs = eig.eigenvectors();
        Eigen::Map<const Eigen::VectorXcd> psi(blk.amplitudes.data(), static_cast<Eigen::Index>(dim));

        Eigen::VectorXcd coeffs = vecs.transpose().cast<Complex>() * psi;
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            coeffs(k) *= std::polar(1.0, -config.z * eig.eigenvalues()(k));
        }
        const Eigen::VectorXcd out = vecs.cast<Complex>() * coeffs;
        blocks.push_back({blk.total, std::vector<Complex>(out.data(), out.data() + out.size())});
    }
    return ThreeModeState(input.cutoff(), std::move(blocks), input.norm_tolerance());
}

}  // namespace phsub
