#pragma once

#include <functional>
#include <vector>

#include "cavdet/types.hpp"

namespace cavdet {

enum class StepperMethod { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
    StepperMethod method = StepperMethod::rk45_adaptive;
    double rtol = 1e-10;
    double atol = 1e-12;
    double dt = 0.0;        // fixed-step size; 0 picks dt_max
    double dt_max = 0.0;    // step ceiling; 0 means no ceiling
    double drift_ceiling = 1e-6;  // evolve() aborts beyond this symplectic defect
    int resymplectify_every = 0;  // 0 disables projection during evolve()
};

using OdeRhs = std::function<void(double t, const Vec& y, Vec& dy)>;

// Called at every requested sample time (and at the window end).
using SampleCallback = std::function<void(double t, const Vec& y)>;

// Called after every accepted step; may modify y in place (used for
// periodic reprojection onto the symplectic group). Return true when y
// was changed so the stepper can refresh its cached derivative.
using StepCallback = std::function<bool(double t, Vec& y)>;

struct StepperStats {
    long steps_accepted = 0;
    long steps_rejected = 0;
    long rhs_evaluations = 0;
    double min_step = 0.0;
};

// Integrate y' = rhs(t, y) from t0 to t1, landing exactly on each sample
// time (strictly increasing, inside [t0, t1]). Sampling by clipping the
// step keeps reported states free of interpolation error.
StepperStats integrate_ode(const OdeRhs& rhs, double t0, double t1, Vec& y,
                           const IntegratorConfig& cfg,
                           const std::vector<double>& sample_times = {},
                           const SampleCallback& on_sample = {},
                           const StepCallback& on_step = {});

}  // namespace cavdet
