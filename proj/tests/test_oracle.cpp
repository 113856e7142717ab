#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cavdet/oracle.hpp"

using namespace cavdet;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr unsigned kSeed = 20260825;

EvolutionSystem reference_system(Picture picture = Picture::interaction) {
    DetectorConfig det{4.5, SwitchingProfile::sharp(0.05), Worldline::inertial(1.1), {}};
    CavityConfig cav{2 * kPi, Boundary::dirichlet, {1, 2, 3}};
    return EvolutionSystem({det}, cav, picture);
}

IntegratorConfig tight() {
    IntegratorConfig cfg;
    cfg.rtol = 1e-12;
    cfg.atol = 1e-14;
    return cfg;
}

void check_complex(Complex got, double re, double im, double eps) {
    CHECK(got.real() == doctest::Approx(re).epsilon(eps));
    CHECK(got.imag() == doctest::Approx(im).epsilon(eps));
}

}  // namespace

TEST_CASE("ladder evolution reproduces pinned matrix entries") {
    const auto sys = reference_system();
    const auto state = evolve_ladder(sys, {0.0, 2.0}, tight());
    REQUIRE(state.c.rows() == 4);
    REQUIRE(state.d.rows() == 4);
    check_complex(state.c(0, 0), 3.6018680446461959e-05, -0.00014052612848558575, 1e-5);
    check_complex(state.c(0, 1), 0.0048110457348044611, 0.0014133459687949729, 1e-5);
    check_complex(state.d(0, 0), -0.00022830145086658461, -0.0011163454890195216, 1e-5);
    check_complex(state.d(1, 1), -0.00010146614808384715, 0.00058825909895395304, 1e-5);
    CHECK(consistency_residual(state) < 1e-12);
}

TEST_CASE("the two routes agree on the final covariance") {
    const auto sys = reference_system();
    const auto cv = cross_validate(sys, {0.0, 2.0}, tight());
    CHECK(cv.max_abs_diff < 1e-9);
    CHECK(cv.consistency < 1e-12);
    CHECK(cv.symplectic_drift < 1e-10);

    // detector excitation through the ladder route matches the pinned value
    const auto sigma_d =
        reduce_state(cv.sigma_ladder, std::vector<int>{0});
    CHECK(1.0 - ground_probability(sigma_d) ==
          doctest::Approx(0.00025438830514312727).epsilon(1e-6));
}

TEST_CASE("squeezing data is well formed") {
    const auto sys = reference_system();
    const auto state = evolve_ladder(sys, {0.0, 2.0}, tight());
    const auto sq = squeezing_from_state(state);
    REQUIRE(sq.tanh_r.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(sq.tanh_r(i) >= 0.0);
        CHECK(sq.tanh_r(i) < 1.0);
    }
    CHECK(sq.phase_unitarity < 1e-10);
    // v unitary
    CHECK((sq.v.adjoint() * sq.v - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

    // the squeezed-vacuum covariance it generates is a physical pure state
    const auto sigma = covariance_from_squeezing(sq);
    const auto nus = symplectic_eigenvalues(sigma, 1e-6);
    for (double nu : nus) CHECK(nu == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("bogoliubov transform rebuilds the symplectic matrix itself") {
    const auto sys = reference_system();
    const auto state = evolve_ladder(sys, {0.0, 2.0}, tight());
    const auto s = bogoliubov_transform(state);
    CHECK(check_symplectic(s) < 1e-9);

    const auto traj = evolve(sys, {0.0, 2.0}, tight());
    CHECK((s.mat() - traj.matrices.back().mat()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ladder equations require the rotating frame") {
    const auto sys = reference_system(Picture::full);
    CHECK_THROWS_AS(evolve_ladder(sys, {0.0, 1.0}, tight()), ConfigError);
}

TEST_CASE("consistency invariant stays flat across random systems") {
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> ugap(2.0, 6.0);
    std::uniform_real_distribution<double> ulam(0.005, 0.05);
    std::uniform_real_distribution<double> upos(0.3, 5.9);

    for (int trial = 0; trial < 10; ++trial) {
        const int m = 1 + (trial % 2);
        const int n = 2 + static_cast<int>(rng() % 3);
        std::vector<DetectorConfig> dets;
        for (int j = 0; j < m; ++j) {
            const bool smooth = (rng() % 2) == 0;
            const auto sw = smooth ? SwitchingProfile::gaussian(ulam(rng), 0.8)
                                   : SwitchingProfile::sharp(ulam(rng));
            dets.push_back({ugap(rng), sw, Worldline::inertial(upos(rng)), {}});
        }
        CavityConfig cav{2 * kPi, Boundary::dirichlet, default_modes(Boundary::dirichlet, n)};
        const EvolutionSystem sys(dets, cav, Picture::interaction);

        IntegratorConfig cfg;
        cfg.rtol = 1e-11;
        cfg.atol = 1e-13;
        const auto cv = cross_validate(sys, {-1.0, 1.5}, cfg);
        CHECK(cv.consistency < 1e-10);
        CHECK(cv.max_abs_diff < 1e-7);
        CHECK(cv.symplectic_drift < 1e-9);
    }
}

TEST_CASE("runaway squeezing fails loudly instead of returning garbage") {
    // resonant coupling two orders above the perturbative regime drives the
    // squeezing parameter toward its pole
    DetectorConfig det{0.5, SwitchingProfile::sharp(2.0), Worldline::inertial(1.1), {}};
    CavityConfig cav{2 * kPi, Boundary::dirichlet, {1, 2, 3}};
    const EvolutionSystem sys({det}, cav, Picture::interaction);
    IntegratorConfig cfg;
    cfg.rtol = 1e-9;
    cfg.atol = 1e-11;
    CHECK_THROWS_AS(evolve_ladder(sys, {0.0, 40.0}, cfg), std::runtime_error);
}
