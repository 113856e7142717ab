#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavdet/cavity.hpp"

using namespace cavdet;

namespace {

constexpr double kPi = std::numbers::pi;

CavityConfig small_dirichlet() {
    return {2 * kPi, Boundary::dirichlet, {1, 2, 3}};
}

DetectorConfig sharp_detector() {
    return {4.5, SwitchingProfile::sharp(0.05), Worldline::inertial(1.1), {}};
}

}  // namespace

TEST_CASE("mode lists and frequencies") {
    CHECK(default_modes(Boundary::dirichlet, 3) == std::vector<int>{1, 2, 3});
    CHECK(default_modes(Boundary::periodic, 2) == std::vector<int>{-2, -1, 1, 2});
    CHECK(default_modes(Boundary::periodic, 1, true) == std::vector<int>{-1, 0, 1});

    const CavityConfig d = small_dirichlet();
    CHECK(mode_frequency(d, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(mode_frequency(d, 3) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(mode_wavenumber(d, 2) == doctest::Approx(1.0).epsilon(1e-14));

    const CavityConfig p{4 * kPi, Boundary::periodic, default_modes(Boundary::periodic, 8)};
    CHECK(mode_frequency(p, 8) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(mode_frequency(p, -8) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(mode_wavenumber(p, -3) == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("mode functions: standing waves and travelling waves") {
    const CavityConfig d = small_dirichlet();
    CHECK(mode_spatial(d, 2, 0.7).real() == doctest::Approx(std::sin(0.7)).epsilon(1e-14));
    CHECK(mode_spatial(d, 2, 0.7).imag() == 0.0);
    // endpoints vanish for Dirichlet walls
    CHECK(std::abs(mode_spatial(d, 3, 0.0)) == 0.0);
    CHECK(std::abs(mode_spatial(d, 3, d.length)) < 1e-14);

    const CavityConfig p{2 * kPi, Boundary::periodic, {-1, 1}};
    const Complex v = mode_spatial(p, 1, 0.3);
    CHECK(v.real() == doctest::Approx(std::cos(0.3)).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(std::sin(0.3)).epsilon(1e-14));
    CHECK(std::abs(mode_spatial(p, -1, 0.3) - std::conj(v)) < 1e-15);

    // u_n(x, t) carries the e^{-i omega t} phase
    const Complex u = mode_function(d, 2, 0.7, 1.3);
    const Complex expect = std::polar(1.0, -1.0 * 1.3) * std::sin(0.7);
    CHECK(std::abs(u - expect) < 1e-14);

    // the normalized variant divides by sqrt(omega L)
    const Complex vn = mode_spatial(d, 2, 0.7, true);
    CHECK(vn.real() ==
          doctest::Approx(std::sin(0.7) / std::sqrt(1.0 * d.length)).epsilon(1e-13));
}

TEST_CASE("worldlines: inertial and uniformly accelerated") {
    const auto inert = Worldline::inertial(2.5);
    auto [t0, x0] = inert.eval(1.7);
    CHECK(t0 == 1.7);
    CHECK(x0 == 2.5);
    CHECK(inert.redshift(-3.0) == 1.0);

    const double a = 1.3, tau = 0.8;
    const auto accel = Worldline::uniformly_accelerated(a);
    auto [t1, x1] = accel.eval(tau);
    CHECK(t1 == doctest::Approx(std::sinh(a * tau) / a).epsilon(1e-14));
    CHECK(x1 == doctest::Approx((std::cosh(a * tau) - 1.0) / a).epsilon(1e-14));
    CHECK(accel.redshift(tau) == doctest::Approx(std::cosh(a * tau)).epsilon(1e-14));
    CHECK(accel.eval(0.0).first == 0.0);
    CHECK(accel.eval(0.0).second == 0.0);
    CHECK_THROWS_AS(Worldline::uniformly_accelerated(-1.0), std::invalid_argument);

    const auto cust = Worldline::custom([](double s) { return 2.0 * s; },
                                        [](double) { return 0.1; });
    CHECK(cust.eval(3.0).first == 6.0);
    CHECK(cust.redshift(1.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("switching profiles") {
    const auto sharp = SwitchingProfile::sharp(0.05);
    CHECK(sharp(-1e-9) == 0.0);
    CHECK(sharp(0.0) == 0.05);
    CHECK(sharp(17.0) == 0.05);

    const auto gauss = SwitchingProfile::gaussian(0.01, 2.0);
    CHECK(gauss(0.0) == 0.01);
    CHECK(gauss(2.0) == doctest::Approx(0.01 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(gauss(-2.0) == gauss(2.0));
    CHECK_THROWS_AS(SwitchingProfile::gaussian(0.01, 0.0), std::invalid_argument);
}

TEST_CASE("coupling matrices reproduce pinned reference entries") {
    // one detector (gap 4.5, coupling 0.05, x = 1.1) in a three-mode cavity
    // of length 2 pi, interaction picture, tau = 0.7
    const auto c = coupling_matrices(0.7, {sharp_detector()}, small_dirichlet(),
                                     Picture::interaction);
    REQUIRE(c.w.rows() == 4);
    CHECK(c.w(0, 1).real() == doctest::Approx(-0.024624379214033022).epsilon(1e-13));
    CHECK(c.w(0, 1).imag() == doctest::Approx(0.0087547013964798786).epsilon(1e-13));
    CHECK(std::abs(c.w(1, 0) - std::conj(c.w(0, 1))) < 1e-17);
    CHECK(c.g(0, 1).real() == doctest::Approx(-0.01223684877234028).epsilon(1e-13));
    CHECK(c.g(0, 1).imag() == doctest::Approx(-0.0045837478309109963).epsilon(1e-13));
    CHECK(c.g(0, 2).real() == doctest::Approx(-0.016919550768176913).epsilon(1e-13));
    CHECK(c.g(0, 2).imag() == doctest::Approx(-0.014496047769836432).epsilon(1e-13));
    // interaction picture has no free diagonal
    CHECK(std::abs(c.w(0, 0)) == 0.0);
    CHECK(std::abs(c.w(2, 2)) == 0.0);
}

TEST_CASE("hamiltonian quadratic form reproduces pinned reference entries") {
    const std::vector<DetectorConfig> dets{sharp_detector()};
    const CavityConfig cav = small_dirichlet();

    const auto full = f_matrix(coupling_matrices(0.7, dets, cav, Picture::full));
    CHECK(full.f_sym(0, 0) == doctest::Approx(4.5).epsilon(1e-13));
    CHECK(full.f_sym(4, 4) == doctest::Approx(4.5).epsilon(1e-13));
    CHECK(full.f_sym(1, 1) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(full.f_sym(5, 5) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(full.f_sym(0, 1) == doctest::Approx(0.052268722893065923).epsilon(1e-13));
    CHECK(full.f_sym(0, 2) == doctest::Approx(0.08912073600614355).epsilon(1e-13));
    CHECK(full.f_sym(1, 0) == doctest::Approx(0.052268722893065923).epsilon(1e-13));
    // sharp static couplings put nothing in the q-p cross blocks
    CHECK(std::abs(full.f_sym(0, 5)) < 1e-16);
    CHECK(std::abs(full.f_sym(1, 4)) < 1e-16);
    CHECK(std::abs(full.f_sym(0, 4)) < 1e-16);

    const auto inter = f_matrix(coupling_matrices(0.7, dets, cav, Picture::interaction));
    CHECK(inter.f_sym(0, 1) == doctest::Approx(-0.049098076758713582).epsilon(1e-13));
    CHECK(inter.f_sym(0, 2) == doctest::Approx(-0.068160889664169305).epsilon(1e-13));
    CHECK(inter.f_sym(0, 5) == doctest::Approx(-0.017922197058301871).epsilon(1e-13));
    CHECK(inter.f_sym(1, 4) == doctest::Approx(-0.00041279426534211391).epsilon(1e-12));
    CHECK(std::abs(inter.f_sym(0, 0)) == 0.0);
    CHECK(std::abs(inter.f_sym(4, 4)) == 0.0);

    // the symmetrized generator is symmetric by construction
    CHECK((full.f_sym - full.f_sym.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((inter.f_sym - inter.f_sym.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("structural requirements on the couplings") {
    const std::vector<DetectorConfig> dets{sharp_detector()};
    const CavityConfig cav = small_dirichlet();
    // w Hermitian, g symmetric at an arbitrary time in both pictures
    for (auto pic : {Picture::interaction, Picture::full}) {
        const auto c = coupling_matrices(1.234, dets, cav, pic);
        CHECK((c.w - c.w.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((c.g - c.g.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    }

    // before switch-on the interaction vanishes entirely
    const auto off = coupling_matrices(-0.5, dets, cav, Picture::interaction);
    CHECK(off.w.cwiseAbs().maxCoeff() == 0.0);
    CHECK(off.g.cwiseAbs().maxCoeff() == 0.0);

    // per-mode weights scale the corresponding column
    auto weighted = sharp_detector();
    weighted.mode_weights = {1.0, 0.0, 2.0};
    const auto cw = coupling_matrices(0.7, {weighted}, cav, Picture::interaction);
    const auto c0 = coupling_matrices(0.7, dets, cav, Picture::interaction);
    CHECK(std::abs(cw.w(0, 2)) == 0.0);
    CHECK(std::abs(cw.w(0, 3) - 2.0 * c0.w(0, 3)) < 1e-16);
}

TEST_CASE("assembly rejects ill-posed setups") {
    const CavityConfig cav = small_dirichlet();
    // two detectors are fine when both are inertial
    std::vector<DetectorConfig> two{sharp_detector(), sharp_detector()};
    CHECK_NOTHROW(coupling_matrices(0.3, two, cav, Picture::full));
    // but a shared proper time breaks down if one accelerates
    two[1].worldline = Worldline::uniformly_accelerated(1.0);
    CHECK_THROWS_AS(coupling_matrices(0.3, two, cav, Picture::full), std::invalid_argument);

    // the periodic zero mode has no frequency and must be rejected
    const CavityConfig zero{2 * kPi, Boundary::periodic, {-1, 0, 1}};
    CHECK_THROWS_AS(coupling_matrices(0.3, {sharp_detector()}, zero, Picture::interaction),
                    std::invalid_argument);

    // f_matrix refuses non-Hermitian w
    CouplingMatrices broken;
    broken.w = CMat::Zero(2, 2);
    broken.w(0, 1) = Complex(1.0, 0.0);
    broken.w(1, 0) = Complex(2.0, 0.0);
    broken.g = CMat::Zero(2, 2);
    CHECK_THROWS_AS(f_matrix(broken), std::invalid_argument);
}
