#pragma once

#include <utility>

#include "cavdet/evolver.hpp"
#include "cavdet/gaussian.hpp"
#include "cavdet/integrate.hpp"

namespace cavdet {

// Independent reference route for vacuum evolution, kept deliberately
// separate from the symplectic evolver so the two can cross-check each
// other. The state here lives in ladder-operator language: two complex
// K x K matrices (c, d) that close under the interaction-picture equations
//   i dc/dtau = 4 c_s g^H c_s + 2 w c_s + g
//   i dd/dtau = (4 c_s g^H + w) (d + 1)
// with c_s = (c + c^T)/2 and (w, g) the quadratic-form couplings. Both
// start at zero for a global vacuum.
struct LadderState {
    CMat c;
    CMat d;
    StepperStats stats;
};

// Integrate the ladder equations across the window. The closed-form
// equations above hold in the rotating frame only, so the system must be
// built with Picture::interaction. The largest singular value of 2 c_s is
// tanh of the strongest squeezing parameter; it is monitored after every
// accepted step and an UnphysicalStateError is raised if it reaches 1.
LadderState evolve_ladder(const EvolutionSystem& system, std::pair<double, double> window,
                          const IntegratorConfig& cfg);

// max abs entry of  [1 - 4 c_s conj(c_s)] - (d + 1)(d + 1)^H,
// an exact invariant of the ladder equations; growth signals integrator
// trouble rather than physics.
double consistency_residual(const LadderState& state);

// Multimode squeezing data extracted from c via Takagi factorization of
// 2 c_s = V diag(tanh r) V^T. `phase` is the unitary cosh(r) (d + 1), which
// fixes the free rotation of the transform.
struct SqueezingData {
    CMat v;
    Vec tanh_r;
    CMat phase;
    double phase_unitarity = 0.0;  // max abs entry of phase^H phase - 1
};

SqueezingData squeezing_from_state(const LadderState& state);

// Covariance of the squeezed vacuum: depends only on (v, tanh_r).
CovarianceMatrix covariance_from_squeezing(const SqueezingData& sq);

// Convenience composition of the two steps above.
CovarianceMatrix ladder_covariance(const LadderState& state);

// Rebuild the full quadrature transform S from the Bogoliubov blocks
//   E = cosh(r) e^{i phi},  F = sinh(r) e^{i theta} conj(e^{i phi}),
// giving a second, stricter comparison point: S itself rather than just
// the covariance it produces.
SymplecticMatrix bogoliubov_transform(const LadderState& state);

struct CrossValidation {
    CovarianceMatrix sigma_symplectic;
    CovarianceMatrix sigma_ladder;
    double max_abs_diff = 0.0;   // entrywise gap between the two covariances
    double consistency = 0.0;    // ladder invariant residual at the endpoint
    double symplectic_drift = 0.0;
};

// Run both routes from vacuum over the same window and report how far
// apart they land.
CrossValidation cross_validate(const EvolutionSystem& system, std::pair<double, double> window,
                               const IntegratorConfig& cfg,
                               RhsKernel kernel = RhsKernel::structured_serial);

}  // namespace cavdet
