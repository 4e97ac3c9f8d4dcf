#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phsub/errors.hpp"
#include "phsub/evolution.hpp"
#include "phsub/fock.hpp"

using namespace phsub;

TEST_CASE("block indexing enumerates every triple of a total exactly once") {
    for (int total = 0; total <= 12; ++total) {
        std::size_t expected = 0;
        for (int a = 0; a <= total; ++a) {
            for (int b = 0; b <= total - a; ++b) {
                CHECK(block_index(total, a, b) == expected);
                const auto t = block_triple(total, expected);
                CHECK(t == OccupationTriple{a, b, total - a - b});
                CHECK(t.total() == total);
                ++expected;
            }
        }
        CHECK(block_dimension(total) == expected);
    }
}

TEST_CASE("normalize") {
    SUBCASE("single amplitude") {
        const auto s = normalize(ThreeModeState::from_amplitudes(0, {{{0, 0, 0}, 2.0}}));
        CHECK(s.amplitude({0, 0, 0}).real() == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("ratio preserved") {
        const auto s = normalize(ThreeModeState::from_amplitudes(2, {{{1, 0, 1}, 0.6}, {{0, 2, 0}, 0.8}}));
        CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(s.amplitude({1, 0, 1}) / s.amplitude({0, 2, 0}) - 0.75) < 1e-15);

        const auto t = normalize(ThreeModeState::from_amplitudes(2, {{{1, 0, 1}, 3.0}, {{0, 2, 0}, Complex{0.0, 4.0}}}));
        CHECK(std::abs(t.amplitude({1, 0, 1}) - 0.6) < 1e-15);
        CHECK(std::abs(t.amplitude({0, 2, 0}) - Complex{0.0, 0.8}) < 1e-15);
    }
    SUBCASE("zero state") {
        CHECK_THROWS_AS(normalize(ThreeModeState::from_amplitudes(2, {{{1, 0, 1}, 0.0}})), ZeroStateError);
        CHECK_THROWS_AS(normalize(ThreeModeState{}), ZeroStateError);
    }
    SUBCASE("truncated squeezed vacuum misses exactly the geometric tail") {
        const auto s = prepare_input(SqueezeSource{0.6, 20});
        const double missing = 1.0 - s.norm_squared();
        const double tail = testing::geometric_tail_by_summation(0.6, 20);
        CHECK(std::abs(missing - tail) < 1e-15);
        CHECK(tail == doctest::Approx(4.812298033983741e-10).epsilon(1e-9));
        CHECK(std::abs(normalize(s).norm_squared() - 1.0) < 1e-15);
    }
}

TEST_CASE("normalize is idempotent on random states") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        std::map<OccupationTriple, Complex> amps;
        for (int k = 0; k < 12; ++k) {
            std::uniform_int_distribution<int> n(0, 3);
            amps[{n(rng), n(rng), n(rng)}] = Complex{g(rng), g(rng)};
        }
        const auto once = normalize(ThreeModeState::from_amplitudes(9, amps));
        const auto twice = normalize(once);
        double worst = 0.0;
        once.for_each([&](const OccupationTriple& t, Complex a) { worst = std::max(worst, std::abs(a - twice.amplitude(t))); });
        CHECK(worst < 1e-12);
        CHECK(std::abs(once.norm_squared() - 1.0) < once.norm_tolerance());
    }
}

TEST_CASE("construction rejects triples beyond the cutoff") {
    CHECK_THROWS_AS(ThreeModeState::from_amplitudes(2, {{{2, 0, 1}, 1.0}}), ContractError);
    CHECK_THROWS_AS(ThreeModeState::from_amplitudes(2, {{{-1, 0, 1}, 1.0}}), ContractError);
    CHECK(ThreeModeState::from_amplitudes(2, {{{1, 0, 1}, 1.0}}).amplitude({5, 0, 5}) == Complex{});
}

TEST_CASE("pruning drops numerical dust") {
    const auto s = ThreeModeState::from_amplitudes(4, {{{1, 0, 1}, 1.0}, {{2, 0, 2}, 1e-17}, {{0, 1, 0}, 5e-17}});
    const auto p = s.pruned();
    CHECK(p.blocks().size() == 1);
    CHECK(p.amplitude({1, 0, 1}) == Complex{1.0});
    CHECK(p.amplitude({2, 0, 2}) == Complex{});
}

TEST_CASE("partial_trace_b") {
    const auto s = ThreeModeState::from_amplitudes(2, {{{1, 0, 1}, 1.0}});
    const auto slice0 = partial_trace_b(s, 0);
    CHECK(slice0.amplitude(1, 1) == Complex{1.0});
    CHECK(slice0.norm_squared() == 1.0);
    CHECK(partial_trace_b(s, 1).empty());
    CHECK(partial_trace_b(s, 7).empty());

    SUBCASE("slice retains amplitudes exactly") {
        const auto in = prepare_input(SqueezeSource{0.5, 4});
        const auto out = evolve_multinomial(in, unitary_from_theta(0.4));
        for (int b = 0; b <= out.cutoff(); ++b) {
            const auto slice = partial_trace_b(out, b);
            out.for_each([&](const OccupationTriple& t, Complex amp) {
                if (t.b == b) CHECK(slice.amplitude(t.a, t.c) == amp);
            });
        }
    }
}

TEST_CASE("partial_trace_c of a maximally correlated pair") {
    Eigen::MatrixXcd amps = Eigen::MatrixXcd::Zero(2, 2);
    amps(0, 0) = amps(1, 1) = 1.0 / std::sqrt(2.0);
    const auto rho = TwoModeDensity::from_pure(TwoModeState(amps));
    const Eigen::MatrixXcd rho_a = partial_trace_c(rho);
    CHECK(std::abs(rho_a(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(rho_a(1, 1) - 0.5) < 1e-15);
    CHECK(std::abs(rho_a(0, 1)) < 1e-15);
    CHECK(std::abs(rho_a.trace() - rho.trace()) < 1e-15);
    CHECK((partial_trace_a(rho) - rho_a).norm() < 1e-15);
}

TEST_CASE("two-mode densities are Hermitian, unit trace after normalization, and PSD") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::vector<TwoModeDensity::Component> comps;
    for (int k = 0; k < 3; ++k) {
        Eigen::MatrixXcd a(3, 3);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex{g(rng), g(rng)};
        comps.push_back({0.3 * (k + 1), a});
    }
    const auto rho = TwoModeDensity(comps).normalized();
    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    const Eigen::MatrixXcd dense = rho.to_dense();
    CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(dense.trace() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    CHECK(std::abs(rho.element(1, 2, 0, 1) - dense(1 * 3 + 2, 0 * 3 + 1)) < 1e-14);
    CHECK(std::abs(partial_trace_c(rho).trace() - 1.0) < 1e-10);
    CHECK_THROWS_AS(rho.to_dense(4), ResourceError);
}

TEST_CASE("block_by_total") {
    const auto vac = block_by_total(ThreeModeState::vacuum());
    REQUIRE(vac.size() == 1);
    CHECK(vac[0].total == 0);

    const auto in = prepare_input(SqueezeSource{0.6, 6});
    const auto blocks = block_by_total(in);
    CHECK(blocks.size() == 7);
    for (std::size_t i = 0; i < blocks.size(); ++i) CHECK(blocks[i].total == static_cast<int>(2 * i));

    // Reassembling the blocks gives back the state.
    const ThreeModeState again(in.cutoff(), blocks);
    in.for_each([&](const OccupationTriple& t, Complex a) { CHECK(again.amplitude(t) == a); });

    // Evolution conserves the weight of every block.
    const auto out = evolve_multinomial(in, unitary_from_theta(0.7));
    for (const auto& blk : blocks) {
        CHECK(std::abs(out.block_weight(blk.total) - in.block_weight(blk.total)) < 1e-10);
    }
}
