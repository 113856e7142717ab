#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "cavdet/scenario.hpp"

using namespace cavdet;

namespace {

ConfigMap switching_config() {
    ConfigMap cfg;
    cfg.set("cavity.length", "6.2831853071795865");
    cfg.set("cavity.boundary", "dirichlet");
    cfg.set("detector.gap", "4.5");
    cfg.set("detector.coupling", "0.01");
    cfg.set("detector.position", "3.1415926535897931");
    cfg.set("sharp.duration", "2.0");
    cfg.set("sharp.samples", "9");
    cfg.set("sharp.tail_fraction", "0.4");
    cfg.set("gaussian.mode_count", "15");
    cfg.set("gaussian.width_min", "0.45");
    cfg.set("gaussian.width_max", "1.0");
    cfg.set("gaussian.width_count", "2");
    cfg.set("gaussian.window_factor", "4.0");
    cfg.set("convergence.observable", "sharp_tail_excitation");
    cfg.set("convergence.tolerance", "1.0");
    cfg.set("convergence.schedule", "6, 9");
    cfg.set("integrator.rtol", "1e-12");
    cfg.set("integrator.atol", "1e-14");
    return cfg;
}

ConfigMap causality_config() {
    ConfigMap cfg;
    cfg.set("cavity.length", "6.2831853071795865");
    cfg.set("cavity.boundary", "dirichlet");
    cfg.set("cavity.mode_counts", "10");
    cfg.set("detectors.gap", "4.5");
    cfg.set("detectors.coupling", "0.01");
    cfg.set("detectors.position_a", "1.5707963267948966");
    cfg.set("detectors.position_b", "4.7123889803846899");
    cfg.set("detectors.squeeze", "5.0");
    cfg.set("grid.tau_max_over_tauc", "1.2");
    cfg.set("grid.points", "7");
    cfg.set("onset.eta", "0.01");
    return cfg;
}

ConfigMap harvesting_config() {
    ConfigMap cfg;
    cfg.set("cavity.length", "6.2831853071795865");
    cfg.set("cavity.boundary", "dirichlet");
    cfg.set("detectors.gap", "9.0");
    cfg.set("detectors.coupling", "0.01");
    cfg.set("detectors.position_a", "1.5707963267948966");
    cfg.set("detectors.position_b", "4.7123889803846899");
    cfg.set("grid.tau_max_over_tauc", "1.2");
    cfg.set("grid.points", "13");
    cfg.set("onset.threshold", "1e-6");
    cfg.set("convergence.observable", "final_log_negativity");
    cfg.set("convergence.tolerance", "1.0");
    cfg.set("convergence.schedule", "14, 20");
    cfg.set("convergence.check_zero_coupling", "true");
    return cfg;
}

const Series& find_series(const ScenarioResult& res, const std::string& name) {
    for (const auto& s : res.series)
        if (s.name == name) return s;
    REQUIRE_MESSAGE(false, ("missing series " + name).c_str());
    return res.series.front();  // unreachable
}

}  // namespace

TEST_CASE("switching noise: structure and pinned gaussian residuals") {
    const auto results = run_switching_noise(switching_config());
    REQUIRE(results.size() == 2);

    const auto& sharp = results[0];
    CHECK(sharp.id == "switching_noise_sharp");
    CHECK(sharp.axis_name == "tau");
    REQUIRE(sharp.axis.size() == 9);
    CHECK(sharp.axis.front() == 0.0);
    CHECK(sharp.axis.back() == 2.0);
    CHECK(sharp.converged);
    CHECK(sharp.n_required == 6);
    CHECK(sharp.mode_count == 9);
    CHECK(sharp.numbers.count("tail_mean_excitation") == 1);
    CHECK(sharp.numbers.count("tail_mean_n6") == 1);
    CHECK(sharp.numbers.count("tail_mean_n9") == 1);
    const auto& exc = find_series(sharp, "excitation_probability");
    CHECK(exc.values.front() == 0.0);  // switch-on instant, still vacuum
    CHECK(exc.values.back() > 0.0);
    CHECK(sharp.max_drift < 1e-10);
    CHECK(std::abs(sharp.numbers.at("final_log_det_sigma")) < 1e-9);

    // residual excitation after a smooth window, against reference values
    // from an independent integrator
    const auto& gauss = results[1];
    CHECK(gauss.id == "switching_noise_gaussian");
    CHECK(gauss.axis_name == "delta");
    REQUIRE(gauss.axis.size() == 2);
    CHECK(gauss.axis[0] == 0.45);
    CHECK(gauss.axis[1] == 1.0);
    const auto& res_exc = find_series(gauss, "excitation_probability");
    CHECK(res_exc.values[0] == doctest::Approx(9.0033000177403011e-07).epsilon(1e-4));
    CHECK(res_exc.values[1] == doctest::Approx(2.3521184999708566e-12).epsilon(0.05));
    CHECK(gauss.numbers.at("peak_delta") == 0.45);
    CHECK(gauss.numbers.at("final_excitation") == res_exc.values.back());
}

TEST_CASE("causality: pinned excitation histories for ten modes") {
    const auto results = run_causality(causality_config());
    REQUIRE(results.size() == 2);  // one curve plus the onset summary

    const auto& curve = results[0];
    CHECK(curve.id == "causality_n10");
    CHECK(curve.axis_name == "tau_over_tauc");
    REQUIRE(curve.axis.size() == 7);
    CHECK(curve.axis[4] == doctest::Approx(0.8).epsilon(1e-12));
    const auto& pg = find_series(curve, "p_ground_neighbor");
    const auto& ps = find_series(curve, "p_squeezed_neighbor");
    CHECK(pg.values[0] == 0.0);
    CHECK(ps.values[0] == 0.0);
    CHECK(pg.values[4] == doctest::Approx(1.5830019037266219e-05).epsilon(1e-6));
    CHECK(ps.values[4] == doctest::Approx(0.00016635394230812839).epsilon(1e-6));
    CHECK(pg.values[6] == doctest::Approx(2.838538118210554e-05).epsilon(1e-6));
    CHECK(ps.values[6] == doctest::Approx(0.0012630640738043875).epsilon(1e-6));
    CHECK(curve.numbers.at("tau_star_over_tauc") > 0.0);
    CHECK(curve.numbers.at("final_divergence") ==
          doctest::Approx(0.0012346786926222819).epsilon(1e-6));

    const auto& summary = results[1];
    CHECK(summary.id == "causality_onsets");
    CHECK(summary.axis == std::vector<double>{10.0});
}

TEST_CASE("causality refuses a mode cutoff below the resonance") {
    auto cfg = causality_config();
    cfg.replace("cavity.mode_counts", "5, 10");  // resonant mode is n = 9
    CHECK_THROWS_AS(run_causality(cfg), ConfigError);
}

TEST_CASE("harvesting: entanglement stays zero before light can connect") {
    const auto results = run_harvesting(harvesting_config());
    REQUIRE(results.size() == 3);  // two mode counts plus the onset summary

    const auto& n20 = results[1];
    CHECK(n20.id == "harvesting_n20");
    REQUIRE(n20.axis.size() == 13);
    const auto& en = find_series(n20, "log_negativity");
    // before tau = separation / c the detectors cannot be connected
    CHECK(en.values[5] < 1e-12);  // tau = 0.5 tau_c
    CHECK(en.values[12] == doctest::Approx(3.1263053167979007e-05).epsilon(1e-5));
    CHECK(n20.numbers.at("onset_over_tauc") > 0.9);
    CHECK(n20.numbers.at("zero_coupling_max_log_negativity") < 1e-12);
    CHECK(n20.converged);
    CHECK(n20.n_required == 14);

    const auto& summary = results[2];
    CHECK(summary.id == "harvesting_onsets");
    CHECK(summary.axis == std::vector<double>{14.0, 20.0});
}

TEST_CASE("results are deterministic and policy independent") {
    const auto a = run_causality(causality_config());
    const auto b = run_causality(causality_config());
    const auto c = run_causality(causality_config(), ExecPolicy::openmp);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == c.size());
    for (size_t r = 0; r < a.size(); ++r) {
        for (size_t s = 0; s < a[r].series.size(); ++s) {
            const auto& va = a[r].series[s].values;
            const auto& vb = b[r].series[s].values;
            const auto& vc = c[r].series[s].values;
            REQUIRE(va.size() == vb.size());
            REQUIRE(va.size() == vc.size());
            for (size_t i = 0; i < va.size(); ++i) {
                CHECK(va[i] == vb[i]);  // bitwise, not approximate
                CHECK(va[i] == vc[i]);
            }
        }
    }
}

TEST_CASE("mode convergence walks the schedule and stops at a plateau") {
    ConvergencePolicy policy;
    policy.observable = "final_log_negativity";
    policy.tolerance = 1.0;  // loose: first pair already counts as flat
    policy.schedule = {14, 20};
    const auto rep = mode_convergence("harvesting", harvesting_config(), policy);
    CHECK(rep.converged);
    CHECK(rep.n_required == 14);
    REQUIRE(rep.history.size() == 2);
    CHECK(rep.schedule == std::vector<int>{14, 20});

    // an unreachable tolerance exhausts the schedule and says so
    policy.tolerance = 0.0;
    const auto hard = mode_convergence("harvesting", harvesting_config(), policy);
    CHECK_FALSE(hard.converged);
    CHECK(hard.n_required == 20);
}

TEST_CASE("mode convergence rejects bad schedules and unknown observables") {
    ConvergencePolicy policy;
    policy.observable = "final_log_negativity";
    policy.tolerance = 1.0;
    policy.schedule = {20};
    CHECK_THROWS_AS(mode_convergence("harvesting", harvesting_config(), policy), ConfigError);
    policy.schedule = {20, 14};
    CHECK_THROWS_AS(mode_convergence("harvesting", harvesting_config(), policy), ConfigError);
    policy.schedule = {14, 20};
    policy.observable = "nonsense";
    CHECK_THROWS_AS(mode_convergence("harvesting", harvesting_config(), policy), ConfigError);
}

TEST_CASE("scenario dispatch checks names") {
    ConfigMap cfg;
    CHECK_THROWS_AS(run_scenario("made_up", cfg), ConfigError);

    auto declared = causality_config();
    declared.set("scenario", "causality");
    CHECK_THROWS_AS(run_scenario("harvesting", declared), ConfigError);
    CHECK_NOTHROW(run_scenario("causality", declared));
}

TEST_CASE("series length mismatches are caught by validate") {
    ScenarioResult res;
    res.id = "demo";
    res.axis_name = "x";
    res.axis = {0.0, 1.0};
    res.series.push_back({"y", {1.0, 2.0, 3.0}});
    CHECK_THROWS_AS(res.validate(), std::logic_error);
}
