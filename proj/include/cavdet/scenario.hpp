#pragma once

#include <map>
#include <string>
#include <vector>

#include "cavdet/config.hpp"
#include "cavdet/evolver.hpp"
#include "cavdet/parallel.hpp"

namespace cavdet {

// =====================================================================
// Canned experiments: switching noise, causal signaling, accelerated
// detector temperature, vacuum entanglement harvesting. Each runner
// loads its parameters from a ConfigMap (see configs/) and returns one
// result per emitted data series group.
// =====================================================================

struct Series {
    std::string name;
    std::vector<double> values;
};

struct ScenarioResult {
    std::string id;         // e.g. "causality_n16"; becomes the CSV file name
    std::string axis_name;  // first CSV column
    std::vector<double> axis;
    std::vector<Series> series;

    int mode_count = 0;   // field modes used for this series group
    int n_required = 0;   // mode count at which convergence was declared
    bool converged = true;
    double max_drift = 0.0;     // worst symplectic defect seen in this run
    double wall_seconds = 0.0;
    std::map<std::string, double> numbers;  // fits, onsets, diagnostics

    void validate() const;  // every series must match the axis length
};

// Mode-count convergence: walk an increasing schedule until the chosen
// observable moves by less than `tolerance` (absolute) between successive
// counts. Exhausting the schedule is reported, never silently accepted.
struct ConvergencePolicy {
    std::string observable;      // scenario-specific selector, see runners
    double tolerance = 0.0;
    std::vector<int> schedule;   // strictly increasing
};

struct ConvergenceReport {
    int n_required = 0;       // first N whose successor confirms it
    bool converged = false;
    std::vector<int> schedule;    // counts actually evaluated
    std::vector<double> history;  // observable at each evaluated count
};

ConvergenceReport mode_convergence(const std::string& scenario, const ConfigMap& cfg,
                                   const ConvergencePolicy& policy,
                                   ExecPolicy exec = ExecPolicy::serial);

// Inertial detector, Dirichlet cavity. Two result groups: the transient
// excitation after an abrupt switch-on (axis tau) and the residual
// excitation after a Gaussian switching window of width delta (axis
// delta, integrated over [-factor*delta, factor*delta]).
std::vector<ScenarioResult> run_switching_noise(const ConfigMap& cfg,
                                                ExecPolicy exec = ExecPolicy::serial);

// Two stationary detectors; detector B starts momentum-squeezed. Tracks
// detector A's excitation with B squeezed vs. B in vacuum; the curves may
// only separate once a signal can cross the cavity, and the onset sharpens
// as modes are added. One result group per mode count plus an onset summary.
std::vector<ScenarioResult> run_causality(const ConfigMap& cfg,
                                          ExecPolicy exec = ExecPolicy::serial);

// Uniformly accelerated detector in a periodic cavity with Gaussian
// switching: temperature versus acceleration, with a per-point check that
// the detector lands on a thermal state (delta_p0 small next to p1).
std::vector<ScenarioResult> run_unruh(const ConfigMap& cfg,
                                      ExecPolicy exec = ExecPolicy::serial);

// Two stationary detectors in vacuum, sharp switching: two-detector
// logarithmic negativity versus time, one curve per mode count in the
// convergence schedule.
std::vector<ScenarioResult> run_harvesting(const ConfigMap& cfg,
                                           ExecPolicy exec = ExecPolicy::serial);

// Dispatch by scenario name ("switching_noise", "causality", "unruh",
// "harvesting"). Throws ConfigError for unknown names.
std::vector<ScenarioResult> run_scenario(const std::string& name, const ConfigMap& cfg,
                                         ExecPolicy exec = ExecPolicy::serial);

}  // namespace cavdet
