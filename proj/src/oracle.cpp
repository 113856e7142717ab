#include "cavdet/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "cavdet/takagi.hpp"

namespace cavdet {

namespace {

void unpack(const Vec& y, Eigen::Index k, CMat& c, CMat& d) {
    const Eigen::Index kk = k * k;
    c.real() = Eigen::Map<const Mat>(y.data(), k, k);
    c.imag() = Eigen::Map<const Mat>(y.data() + kk, k, k);
    d.real() = Eigen::Map<const Mat>(y.data() + 2 * kk, k, k);
    d.imag() = Eigen::Map<const Mat>(y.data() + 3 * kk, k, k);
}

void pack(const CMat& c, const CMat& d, Vec& y) {
    const Eigen::Index k = c.rows();
    const Eigen::Index kk = k * k;
    Eigen::Map<Mat>(y.data(), k, k) = c.real();
    Eigen::Map<Mat>(y.data() + kk, k, k) = c.imag();
    Eigen::Map<Mat>(y.data() + 2 * kk, k, k) = d.real();
    Eigen::Map<Mat>(y.data() + 3 * kk, k, k) = d.imag();
}

double largest_singular_value(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(a * a.adjoint());
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

LadderState evolve_ladder(const EvolutionSystem& system, std::pair<double, double> window,
                          const IntegratorConfig& cfg) {
    if (system.picture() != Picture::interaction)
        throw ConfigError(
            "evolve_ladder: the closed ladder equations hold in the rotating frame; "
            "build the system with Picture::interaction");
    const Eigen::Index k = system.mode_count();

    CMat cbuf(k, k), dbuf(k, k);
    const CMat eye = CMat::Identity(k, k);
    const Complex mi(0.0, -1.0);
    const OdeRhs rhs = [&](double tau, const Vec& y, Vec& dy) {
        unpack(y, k, cbuf, dbuf);
        const CouplingMatrices wg = system.couplings(tau);
        const CMat cs = (cbuf + cbuf.transpose()) / 2.0;
        const CMat gh = wg.g.adjoint();
        const CMat cs_gh = cs * gh;
        const CMat cdot = mi * (4.0 * (cs_gh * cs) + 2.0 * (wg.w * cs) + wg.g);
        const CMat ddot = mi * ((4.0 * cs_gh + wg.w) * (dbuf + eye));
        pack(cdot, ddot, dy);
    };

    // squeezing blows up as tanh r -> 1; refuse to integrate past it
    const StepCallback monitor = [&](double tau, Vec& y) -> bool {
        unpack(y, k, cbuf, dbuf);
        const CMat two_cs = cbuf + cbuf.transpose();
        if (largest_singular_value(two_cs) >= 1.0)
            throw UnphysicalStateError(
                "evolve_ladder: squeezing parameter diverged at tau=" + std::to_string(tau));
        return false;
    };

    IntegratorConfig local = cfg;
    if (local.dt_max <= 0.0) {
        const double wmax = system.max_frequency();
        local.dt_max = wmax > 0.0 ? 0.05 * 2.0 * std::numbers::pi / wmax
                                  : (window.second - window.first) / 100.0;
    }

    Vec y = Vec::Zero(4 * k * k);
    LadderState out;
    if (system.has_sharp_switching() && window.first < 0.0 && window.second > 0.0) {
        out.stats = integrate_ode(rhs, window.first, 0.0, y, local, {}, {}, monitor);
        StepperStats st = integrate_ode(rhs, 0.0, window.second, y, local, {}, {}, monitor);
        out.stats.steps_accepted += st.steps_accepted;
        out.stats.steps_rejected += st.steps_rejected;
        out.stats.rhs_evaluations += st.rhs_evaluations;
        out.stats.min_step = std::min(out.stats.min_step, st.min_step);
    } else {
        out.stats = integrate_ode(rhs, window.first, window.second, y, local, {}, {}, monitor);
    }
    out.c.resize(k, k);
    out.d.resize(k, k);
    unpack(y, k, out.c, out.d);
    return out;
}

double consistency_residual(const LadderState& state) {
    const Eigen::Index k = state.c.rows();
    const CMat cs = (state.c + state.c.transpose()) / 2.0;
    const CMat dp1 = state.d + CMat::Identity(k, k);
    const CMat lhs = CMat::Identity(k, k) - 4.0 * (cs * cs.conjugate());
    const CMat rhs = dp1 * dp1.adjoint();
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

SqueezingData squeezing_from_state(const LadderState& state) {
    const Eigen::Index k = state.c.rows();
    const CMat two_cs = state.c + state.c.transpose();
    TakagiFactorization tf = takagi(two_cs);
    for (Eigen::Index i = 0; i < k; ++i)
        if (tf.values(i) >= 1.0)
            throw UnphysicalStateError("squeezing_from_state: tanh r = " +
                                       std::to_string(tf.values(i)) + " is out of range");
    SqueezingData sq;
    sq.v = std::move(tf.v);
    sq.tanh_r = std::move(tf.values);
    const Vec sech = (1.0 - sq.tanh_r.array().square()).rsqrt().matrix();
    const CMat cosh_r = sq.v * sech.asDiagonal() * sq.v.adjoint();
    sq.phase = cosh_r * (state.d + CMat::Identity(k, k));
    sq.phase_unitarity =
        (sq.phase.adjoint() * sq.phase - CMat::Identity(k, k)).cwiseAbs().maxCoeff();
    return sq;
}

CovarianceMatrix covariance_from_squeezing(const SqueezingData& sq) {
    const Eigen::Index k = sq.tanh_r.size();
    const Eigen::ArrayXd t = sq.tanh_r.array();
    const Eigen::ArrayXd denom = 1.0 - t.square();
    const Vec c2 = ((1.0 + t.square()) / denom).matrix();  // cosh(2r)
    const Vec s2 = (2.0 * t / denom).matrix();             // sinh(2r)
    const CMat big_c = sq.v * c2.asDiagonal() * sq.v.adjoint();
    const CMat big_m = sq.v * s2.asDiagonal() * sq.v.transpose();
    Mat sigma(2 * k, 2 * k);
    sigma.topLeftCorner(k, k) = (big_c + big_m).real();
    sigma.bottomRightCorner(k, k) = (big_c - big_m).real();
    sigma.topRightCorner(k, k) = (big_m - big_c).imag();
    sigma.bottomLeftCorner(k, k) = sigma.topRightCorner(k, k).transpose();
    return CovarianceMatrix(sigma);
}

CovarianceMatrix ladder_covariance(const LadderState& state) {
    return covariance_from_squeezing(squeezing_from_state(state));
}

SymplecticMatrix bogoliubov_transform(const LadderState& state) {
    const Eigen::Index k = state.c.rows();
    const SqueezingData sq = squeezing_from_state(state);
    const Eigen::ArrayXd t = sq.tanh_r.array();
    const Vec sech = (1.0 - t.square()).rsqrt().matrix();
    const Vec tsech = (t / (1.0 - t.square()).sqrt()).matrix();
    const CMat cosh_r = sq.v * sech.asDiagonal() * sq.v.adjoint();
    const CMat sinh_eitheta = sq.v * tsech.asDiagonal() * sq.v.transpose();
    const CMat e = cosh_r * sq.phase;
    const CMat f = sinh_eitheta * sq.phase.conjugate();

    CMat b(2 * k, 2 * k);
    b.topLeftCorner(k, k) = e;
    b.topRightCorner(k, k) = f;
    b.bottomLeftCorner(k, k) = f.conjugate();
    b.bottomRightCorner(k, k) = e.conjugate();

    // quadrature change of basis q = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2)
    CMat tq(2 * k, 2 * k);
    const double rt = 1.0 / std::sqrt(2.0);
    tq.setZero();
    tq.topLeftCorner(k, k) = rt * CMat::Identity(k, k);
    tq.topRightCorner(k, k) = rt * CMat::Identity(k, k);
    tq.bottomLeftCorner(k, k) = Complex(0.0, -rt) * CMat::Identity(k, k);
    tq.bottomRightCorner(k, k) = Complex(0.0, rt) * CMat::Identity(k, k);

    const CMat s = tq * b * tq.adjoint();
    const double imag_leak = s.imag().cwiseAbs().maxCoeff();
    if (imag_leak > 1e-8)
        throw UnphysicalStateError("bogoliubov_transform: non-real transform, leak " +
                                   std::to_string(imag_leak));
    return SymplecticMatrix(s.real());
}

CrossValidation cross_validate(const EvolutionSystem& system, std::pair<double, double> window,
                               const IntegratorConfig& cfg, RhsKernel kernel) {
    EvolutionTrajectory traj = evolve(system, window, cfg, {}, kernel);
    const SymplecticMatrix& s = traj.matrices.back();
    LadderState state = evolve_ladder(system, window, cfg);

    CrossValidation cv{
        evolve_covariance(s, CovarianceMatrix::vacuum(system.mode_count())),
        ladder_covariance(state), 0.0, consistency_residual(state), traj.max_drift};
    cv.max_abs_diff =
        (cv.sigma_symplectic.mat() - cv.sigma_ladder.mat()).cwiseAbs().maxCoeff();
    return cv;
}

}  // namespace cavdet
