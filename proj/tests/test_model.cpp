#include "pulsesplit/model.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace pulsesplit;

namespace {

const FrequencyGrid kGrid{64, 0.75};

SplitState random_state(std::mt19937_64& rng, double u) {
    return SplitState{testutil::random_spectrum(kGrid, rng), testutil::random_spectrum(kGrid, rng),
                      Pwv{u}};
}

}  // namespace

TEST_CASE("velocity floor") {
    CHECK_THROWS_AS(Pwv{0.05}, std::domain_error);
    CHECK_NOTHROW(Pwv{0.1});
    CHECK_NOTHROW(Pwv(0.05, 0.01));
    CHECK_THROWS_AS(Pwv(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("geometry invariants") {
    CHECK_THROWS_AS((Geometry{{0.0}}), std::invalid_argument);
    CHECK_THROWS_AS((Geometry{{0.1, 0.2}}), std::invalid_argument);  // not anchored at 0
    CHECK_THROWS_AS((Geometry{{0.0, 0.2, 0.2}}), std::invalid_argument);
    const Geometry g{{0.0, 0.09, 0.15}};
    CHECK(g.points() == 3);
    CHECK(g.span() == 0.15);
}

TEST_CASE("phase factors") {
    const Geometry geom{{0.0, 0.09, 0.15}};
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uvel(0.5, 12.0);

    for (int trial = 0; trial < 20; ++trial) {
        const Pwv u{uvel(rng)};
        const PhaseFactors pf = phase_factors(geom, u, kGrid);
        for (int k = 0; k < geom.points(); ++k) {
            for (int j = 0; j < kGrid.samples; ++j) {
                CHECK(std::abs(std::abs(pf.e(k, j)) - 1.0) < 1e-14);
                CHECK(std::abs(std::abs(pf.et(k, j)) - 1.0) < 1e-14);
            }
        }
        // Anchoring: first point has no forward delay, last no backward one.
        for (int j = 0; j < kGrid.samples; ++j) {
            CHECK(pf.e(0, j) == Complex{1.0, 0.0});
            CHECK(pf.et(geom.points() - 1, j) == Complex{1.0, 0.0});
        }
        // Zero frequency carries no phase at all.
        for (int k = 0; k < geom.points(); ++k) CHECK(pf.e(k, 0) == Complex{1.0, 0.0});
    }

    // A half-period delay flips the sign: pick u so that omega_1 * L_2 / u = pi.
    const double u_pi = kGrid.omega(1) * 0.09 / kPi;
    const PhaseFactors pf = phase_factors(geom, Pwv{u_pi}, kGrid);
    CHECK(pf.e(1, 1).real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(pf.e(1, 1).imag()) < 1e-12);
}

TEST_CASE("forward map structure") {
    const Geometry geom{{0.0, 0.09, 0.15}};
    std::mt19937_64 rng(29);

    SUBCASE("pure forward wave is phase shifted per channel") {
        const Spectrum x1 = testutil::random_spectrum(kGrid, rng);
        SplitState state{x1, Spectrum{kGrid}, Pwv{2.0}};
        const auto channels = apply_F(state, geom);
        const PhaseFactors pf = phase_factors(geom, state.u, kGrid);
        for (int k = 0; k < geom.points(); ++k) {
            for (int j = 0; j < kGrid.samples; ++j) {
                CHECK(std::abs(channels[k][j] - pf.e(k, j) * x1[j]) < 1e-14);
            }
        }
        for (int j = 0; j < kGrid.samples; ++j) CHECK(channels[0][j] == x1[j]);
    }

    SUBCASE("zero waves map to zero") {
        SplitState state{Spectrum{kGrid}, Spectrum{kGrid}, Pwv{3.0}};
        for (const Spectrum& c : apply_F(state, geom)) {
            for (int j = 0; j < kGrid.samples; ++j) CHECK(c[j] == Complex{0.0, 0.0});
        }
    }

    SUBCASE("superposition") {
        const SplitState a = random_state(rng, 2.5);
        const SplitState b{testutil::random_spectrum(kGrid, rng),
                           testutil::random_spectrum(kGrid, rng), a.u};
        Spectrum sx1{kGrid};
        Spectrum sx2{kGrid};
        for (int j = 0; j < kGrid.samples; ++j) {
            sx1[j] = a.x1[j] + b.x1[j];
            sx2[j] = a.x2[j] + b.x2[j];
        }
        const auto fa = apply_F(a, geom);
        const auto fb = apply_F(b, geom);
        const auto fsum = apply_F(SplitState{sx1, sx2, a.u}, geom);
        for (int k = 0; k < geom.points(); ++k) {
            for (int j = 0; j < kGrid.samples; ++j) {
                CHECK(std::abs(fsum[k][j] - (fa[k][j] + fb[k][j])) < 1e-12);
            }
        }
    }

    SUBCASE("real waves stay real (odd sample count)") {
        const FrequencyGrid odd{101, 0.75};
        std::mt19937_64 orng(31);
        SplitState state{testutil::random_real_spectrum(odd, orng),
                         testutil::random_real_spectrum(odd, orng), Pwv{2.0}};
        for (const Spectrum& c : apply_F(state, geom)) CHECK(is_conjugate_symmetric(c, 1e-11));
    }

    SUBCASE("output norm bounded by sqrt(2N) times the state norm") {
        for (int trial = 0; trial < 25; ++trial) {
            const SplitState state = random_state(rng, 1.0 + trial * 0.3);
            const double lhs = channels_norm(apply_F(state, geom), 0.0);
            const double n1 = weighted_norm(state.x1, 1.0);
            const double n2 = weighted_norm(state.x2, 1.0);
            const double rhs = std::sqrt(2.0 * geom.points()) *
                               std::sqrt(n1 * n1 + n2 * n2 + state.u.value * state.u.value);
            CHECK(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("forward map agrees with the delayed time-domain superposition") {
    const auto data = testutil::synth(3, 2.0, 0.0, 1);
    const SplitState& truth = data.truth;
    const Geometry& geom = data.clean.geometry;
    const TimeGrid tgrid{truth.x1.grid.samples, truth.x1.grid.period};
    const double tau_n = geom.span() / truth.u.value;

    const auto channels = apply_F(truth, geom);
    double scale = 0.0;
    for (int j = 0; j < tgrid.samples; ++j) {
        scale = std::max(scale, std::abs(testutil::trig_eval(truth.x1, tgrid.time_at(j))));
    }
    for (int k = 0; k < geom.points(); ++k) {
        const double tau_k = geom.distances[k] / truth.u.value;
        const std::vector<double> wave = inverse_dft_real(channels[k]);
        for (int j = 0; j < tgrid.samples; ++j) {
            const double t = tgrid.time_at(j);
            const double expected = testutil::trig_eval(truth.x1, t - tau_k) +
                                    testutil::trig_eval(truth.x2, t - (tau_n - tau_k));
            CHECK(std::abs(wave[j] - expected) < 1e-8 * std::max(scale, 1.0));
        }
    }
}

TEST_CASE("splitting adjoint") {
    const Geometry geom{{0.0, 0.09, 0.15}};
    std::mt19937_64 rng(37);

    SUBCASE("identity weight when r equals s") {
        const Geometry two{{0.0, 0.15}};
        std::vector<Spectrum> y{testutil::random_spectrum(kGrid, rng), Spectrum{kGrid}};
        const auto adj = apply_Fu_adjoint(y, two, Pwv{2.0}, WeightedNormParams{1.0, 1.0});
        for (int j = 0; j < kGrid.samples; ++j) {
            CHECK(std::abs(adj.first[j] - y[0][j]) < 1e-14);  // e_1 = 1 and et contributions vanish
        }
    }

    SUBCASE("adjoint identity") {
        const WeightedNormParams params{0.0, 1.0};
        std::uniform_real_distribution<double> uvel(1.0, 10.0);
        for (int trial = 0; trial < 100; ++trial) {
            const Pwv u{uvel(rng)};
            const Spectrum x1 = testutil::random_spectrum(kGrid, rng);
            const Spectrum x2 = testutil::random_spectrum(kGrid, rng);
            std::vector<Spectrum> y;
            for (int k = 0; k < geom.points(); ++k) y.push_back(testutil::random_spectrum(kGrid, rng));

            const auto fx = apply_F(SplitState{x1, x2, u}, geom);
            const Complex lhs = channels_inner(fx, y, params.s);
            const auto adj = apply_Fu_adjoint(y, geom, u, params);
            const Complex rhs =
                weighted_inner(x1, adj.first, params.r) + weighted_inner(x2, adj.second, params.r);
            CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));
        }
    }

    SUBCASE("least-squares inversion of forward data recovers the state") {
        const Pwv u{2.3};
        const Spectrum x1 = testutil::random_spectrum(kGrid, rng);
        const Spectrum x2 = testutil::random_spectrum(kGrid, rng);
        const auto y = apply_F(SplitState{x1, x2, u}, geom);
        const PhaseFactors pf = phase_factors(geom, u, kGrid);

        for (int j = 0; j < kGrid.samples; ++j) {
            double gaa = 0.0, gbb = 0.0;
            Complex gab{0.0, 0.0}, r1{0.0, 0.0}, r2{0.0, 0.0};
            for (int k = 0; k < geom.points(); ++k) {
                gaa += std::norm(pf.e(k, j));
                gbb += std::norm(pf.et(k, j));
                gab += std::conj(pf.e(k, j)) * pf.et(k, j);
                r1 += std::conj(pf.e(k, j)) * y[k][j];
                r2 += std::conj(pf.et(k, j)) * y[k][j];
            }
            const double det = gaa * gbb - std::norm(gab);
            if (det < 1e-3) continue;  // rank-deficient bin
            const Complex z1 = (gbb * r1 - gab * r2) / det;
            const Complex z2 = (gaa * r2 - std::conj(gab) * r1) / det;
            CHECK(std::abs(z1 - x1[j]) < 1e-6 * (1.0 + std::abs(x1[j])));
            CHECK(std::abs(z2 - x2[j]) < 1e-6 * (1.0 + std::abs(x2[j])));
        }
    }
}

TEST_CASE("velocity derivative") {
    const Geometry geom{{0.0, 0.09, 0.15}};
    std::mt19937_64 rng(41);
    const SplitState state = random_state(rng, 2.0);

    SUBCASE("zero direction and zero frequency") {
        const auto zero = apply_Fx_derivative(state, geom, 0.0);
        for (const Spectrum& c : zero) {
            for (int j = 0; j < kGrid.samples; ++j) CHECK(c[j] == Complex{0.0, 0.0});
        }
        const auto d = apply_Fx_derivative(state, geom, 0.7);
        for (const Spectrum& c : d) CHECK(c[0] == Complex{0.0, 0.0});
    }

    SUBCASE("second-order Taylor remainder") {
        const WeightedNormParams params{0.0, 1.0};
        const auto f0 = apply_F(state, geom);
        const double h1 = 1e-2;
        const double h2 = 1e-3;
        auto remainder = [&](double h) {
            const SplitState moved{state.x1, state.x2, Pwv{state.u.value + h}};
            const auto fh = apply_F(moved, geom);
            const auto dh = apply_Fx_derivative(state, geom, h);
            std::vector<Spectrum> r;
            for (int k = 0; k < geom.points(); ++k) {
                Spectrum c{kGrid};
                for (int j = 0; j < kGrid.samples; ++j) c[j] = fh[k][j] - f0[k][j] - dh[k][j];
                r.push_back(std::move(c));
            }
            return channels_norm(r, params.s);
        };
        const double ratio = remainder(h1) / remainder(h2);
        CHECK(ratio > 80.0);
        CHECK(ratio < 120.0);
    }

    SUBCASE("scalar adjoint identity") {
        const WeightedNormParams params{0.0, 1.0};
        for (int trial = 0; trial < 50; ++trial) {
            const SplitState s = random_state(rng, 1.5 + 0.2 * trial);
            std::vector<Spectrum> y;
            for (int k = 0; k < geom.points(); ++k) y.push_back(testutil::random_spectrum(kGrid, rng));
            const double h = 0.37;
            const Complex lhs = channels_inner(apply_Fx_derivative(s, geom, h), y, params.s);
            const double rhs = h * apply_Fx_gradient(s, geom, y, params);
            CHECK(std::abs(lhs.real() - rhs) < 1e-10 * std::max(std::abs(lhs.real()), std::abs(rhs)));
        }
    }

    SUBCASE("gradient vanishes on zero inputs") {
        const WeightedNormParams params{0.0, 1.0};
        std::vector<Spectrum> zero_res(geom.points(), Spectrum{kGrid});
        CHECK(apply_Fx_gradient(state, geom, zero_res, params) == 0.0);
        SplitState silent{Spectrum{kGrid}, Spectrum{kGrid}, Pwv{2.0}};
        std::vector<Spectrum> y;
        for (int k = 0; k < geom.points(); ++k) {
            std::mt19937_64 r2(43);
            y.push_back(testutil::random_spectrum(kGrid, r2));
        }
        CHECK(apply_Fx_gradient(silent, geom, y, params) == 0.0);
    }
}
