#include "cavdet/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavdet {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// difference between 5th and embedded 4th order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct SamplePlan {
    std::vector<double> stops;  // strictly increasing interior stops plus t1
    size_t next = 0;
};

SamplePlan make_plan(double t0, double t1, const std::vector<double>& samples) {
    SamplePlan plan;
    double prev = t0;
    for (double s : samples) {
        if (s < t0 - 1e-14 || s > t1 + 1e-14)
            throw std::invalid_argument("integrate_ode: sample time outside the window");
        if (s <= prev + 1e-15 * std::max(1.0, std::abs(prev))) {
            if (s < prev) throw std::invalid_argument("integrate_ode: sample times must increase");
            continue;  // duplicate of the previous stop; callback still fires via stops dedupe
        }
        plan.stops.push_back(s);
        prev = s;
    }
    if (plan.stops.empty() || plan.stops.back() < t1 - 1e-14 * std::max(1.0, std::abs(t1)))
        plan.stops.push_back(t1);
    return plan;
}

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
    double acc = 0.0;
    const auto n = err.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double q = err(i) / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace

StepperStats integrate_ode(const OdeRhs& rhs, double t0, double t1, Vec& y,
                           const IntegratorConfig& cfg, const std::vector<double>& sample_times,
                           const SampleCallback& on_sample, const StepCallback& on_step) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate_ode: need t1 > t0");
    StepperStats stats;
    stats.min_step = std::numeric_limits<double>::infinity();
    SamplePlan plan = make_plan(t0, t1, sample_times);

    const double span = t1 - t0;
    const double hmin = 1e-14 * std::max(1.0, std::abs(t1) + std::abs(t0));

    auto fire = [&](double t) {
        if (on_sample) on_sample(t, y);
    };

    if (cfg.method == StepperMethod::rk4_fixed) {
        double h_nominal = cfg.dt > 0.0 ? cfg.dt : cfg.dt_max;
        if (h_nominal <= 0.0)
            throw std::invalid_argument("integrate_ode: fixed-step method needs dt or dt_max");
        Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
        double t = t0;
        while (plan.next < plan.stops.size()) {
            const double target = plan.stops[plan.next];
            while (t < target - hmin) {
                const double h = std::min(h_nominal, target - t);
                rhs(t, y, k1);
                tmp = y + 0.5 * h * k1;
                rhs(t + 0.5 * h, tmp, k2);
                tmp = y + 0.5 * h * k2;
                rhs(t + 0.5 * h, tmp, k3);
                tmp = y + h * k3;
                rhs(t + h, tmp, k4);
                y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
                stats.steps_accepted++;
                stats.rhs_evaluations += 4;
                stats.min_step = std::min(stats.min_step, h);
                if (on_step) on_step(t, y);
            }
            t = target;
            fire(t);
            plan.next++;
        }
        return stats;
    }

    // adaptive Dormand-Prince with FSAL
    const double rtol = cfg.rtol, atol = cfg.atol;
    const double hmax = cfg.dt_max > 0.0 ? cfg.dt_max : span;
    Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()), k6(y.size()),
        k7(y.size()), ytmp(y.size()), ynew(y.size()), err(y.size());

    double t = t0;
    rhs(t, y, k1);  // stays current: FSAL after accepts, untouched on rejects
    stats.rhs_evaluations++;
    double h = std::min({hmax, span / 10.0});

    while (plan.next < plan.stops.size()) {
        const double target = plan.stops[plan.next];
        while (t < target - hmin) {
            h = std::min(h, target - t);
            if (h < hmin)
                throw IntegrationError("integrate_ode: step size underflow at t=" +
                                       std::to_string(t));
            ytmp = y + h * (a21 * k1);
            rhs(t + c2 * h, ytmp, k2);
            ytmp = y + h * (a31 * k1 + a32 * k2);
            rhs(t + c3 * h, ytmp, k3);
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * h, ytmp, k4);
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * h, ytmp, k5);
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + h, ytmp, k6);
            ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + h, ynew, k7);
            stats.rhs_evaluations += 6;

            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double enorm = error_norm(err, y, ynew, rtol, atol);
            if (enorm <= 1.0) {
                t += h;
                y.swap(ynew);
                k1.swap(k7);  // FSAL
                stats.steps_accepted++;
                stats.min_step = std::min(stats.min_step, h);
                if (on_step && on_step(t, y)) {
                    rhs(t, y, k1);  // y was adjusted; refresh FSAL derivative
                    stats.rhs_evaluations++;
                }
            } else {
                stats.steps_rejected++;
            }
            // non-finite enorm (overflowing RHS) must shrink the step, not
            // fall through to the error-free growth branch
            double factor = 5.0;
            if (!std::isfinite(enorm)) factor = 0.2;
            else if (enorm > 0.0) factor = 0.9 * std::pow(enorm, -0.2);
            h *= std::clamp(factor, 0.2, 5.0);
            h = std::min(h, hmax);
        }
        t = target;
        fire(t);
        plan.next++;
    }
    return stats;
}

}  // namespace cavdet
