#pragma once

#include <vector>

#include "cavdet/cavity.hpp"
#include "cavdet/gaussian.hpp"
#include "cavdet/integrate.hpp"

namespace cavdet {

// How the right-hand side Omega F_sym S is evaluated. The dense path
// assembles F_sym and multiplies; the structured path exploits the fact
// that couplings only live in detector rows/columns (plus the free-term
// diagonal), which turns the K^3 product into a K^2 one. The structured
// kernel optionally splits its column loop across OpenMP threads.
enum class RhsKernel { dense_serial, structured_serial, structured_openmp };

// A detector-cavity system prepared for evolution: fixes the mode layout
// (detectors first), caches per-mode data and exposes the ODE generator.
class EvolutionSystem {
public:
    EvolutionSystem(std::vector<DetectorConfig> detectors, CavityConfig cavity, Picture picture,
                    bool normalized_modes = false);

    int detector_count() const { return static_cast<int>(detectors_.size()); }
    int mode_count() const;  // detectors + field modes
    Picture picture() const { return picture_; }
    bool normalized_modes() const { return normalized_; }
    const std::vector<DetectorConfig>& detectors() const { return detectors_; }
    const CavityConfig& cavity() const { return cavity_; }

    CouplingMatrices couplings(double tau) const;
    Mat f_sym(double tau) const;

    // out = Omega F_sym(tau) S
    void apply_generator(double tau, Eigen::Ref<const Mat> s, Eigen::Ref<Mat> out,
                         RhsKernel kernel) const;

    // largest bare frequency in the generator, used for the step ceiling
    double max_frequency() const;

    // true when any detector switches sharply (interaction window must be
    // split at tau = 0)
    bool has_sharp_switching() const;

private:
    std::vector<DetectorConfig> detectors_;
    CavityConfig cavity_;
    Picture picture_;
    bool normalized_;
    std::vector<double> omegas_;  // per field mode
};

struct EvolutionTrajectory {
    std::vector<double> times;
    std::vector<SymplecticMatrix> matrices;
    std::vector<double> drifts;  // symplectic defect at each sample
    StepperStats stats;
    double max_drift = 0.0;
};

// Integrate dS/dtau = Omega F_sym(tau) S from window.first to window.second
// starting at the identity. Samples land exactly on sample_times (plus the
// window end). Sharp switching splits the window at tau = 0. The default
// step ceiling is 0.05 * 2 pi / max_frequency when cfg.dt_max is 0.
EvolutionTrajectory evolve(const EvolutionSystem& system, std::pair<double, double> window,
                           const IntegratorConfig& cfg,
                           const std::vector<double>& sample_times = {},
                           RhsKernel kernel = RhsKernel::structured_serial);

// Closed form for a constant generator: S = exp(Omega F_sym * duration).
// Only valid when F_sym is constant over the window (stationary detectors,
// sharp switching, full picture).
SymplecticMatrix evolve_static(const Mat& f_sym, double duration);

// Nearest-symplectic correction via the Newton iteration
// S <- (S - Omega S^-T Omega) / 2; converges quadratically near the
// symplectic group. Throws if the input is too degenerate to project.
SymplecticMatrix resymplectify(const SymplecticMatrix& s, double target_defect = 1e-12,
                               int max_iterations = 12);

}  // namespace cavdet
