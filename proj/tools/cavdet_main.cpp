// Command-line driver: load a scenario config, run it, write CSV series and
// a JSON metadata sidecar. Exit codes:
//   0  success
//   1  unexpected error
//   2  configuration problem (bad file, unknown key, invalid physics setup)
//   3  integration failure (drift ceiling, unphysical state)
//   4  mode schedule exhausted without convergence
//   5  thermality check failed on at least one scan point
//   6  output could not be written
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "cavdet/config.hpp"
#include "cavdet/io.hpp"
#include "cavdet/parallel.hpp"
#include "cavdet/scenario.hpp"

namespace {

// dry run: resolve the config, report mode layout and step ceiling, no compute
int validate_only(const std::string& scenario, const cavdet::ConfigMap& cfg) {
    using namespace cavdet;
    const std::string det_section = cfg.has("detector.gap") ? "detector" : "detectors";
    const double gap = cfg.get_double(det_section + ".gap");
    const double length = cfg.get_double("cavity.length");
    const Boundary boundary = cfg.get_string("cavity.boundary") == "periodic"
                                  ? Boundary::periodic
                                  : Boundary::dirichlet;

    int n_max = 0;
    if (cfg.has("convergence.schedule"))
        for (long v : cfg.get_int_list("convergence.schedule"))
            n_max = std::max(n_max, static_cast<int>(v));
    if (cfg.has("cavity.mode_counts"))
        for (long v : cfg.get_int_list("cavity.mode_counts"))
            n_max = std::max(n_max, static_cast<int>(v));
    if (n_max == 0) {
        std::fprintf(stderr, "validate: no mode schedule found in the config\n");
        return 2;
    }

    CavityConfig cav{length, boundary, default_modes(boundary, n_max)};
    double omega_max = gap;
    bool resonant = false;
    const double spacing =
        (boundary == Boundary::dirichlet ? std::numbers::pi : 2.0 * std::numbers::pi) / length;
    for (int n : cav.mode_indices) {
        const double w = mode_frequency(cav, n);
        omega_max = std::max(omega_max, w);
        if (std::abs(w - gap) < 0.5 * spacing) resonant = true;
    }
    const double dt_max = 0.05 * 2.0 * std::numbers::pi / omega_max;

    std::printf("scenario:        %s\n", scenario.c_str());
    std::printf("modes:           %d (%s), %zu ladder modes total\n", n_max,
                boundary == Boundary::dirichlet ? "dirichlet" : "periodic",
                cav.mode_indices.size());
    std::printf("omega_max:       %.6g\n", omega_max);
    std::printf("dt ceiling:      %.6g\n", dt_max);
    std::printf("workers:         %d (openmp %s)\n", worker_count(),
                openmp_enabled() ? "on" : "off");
    if (!resonant)
        std::printf("warning: detector gap %.6g is not resonant with any included mode\n", gap);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic detector + cavity field Gaussian evolution runner"};

    std::string scenario, config_path, out_dir = ".";
    std::string modes_override, tolerance_override;
    long seed_override = -1;
    bool validate_flag = false;

    app.add_option("--scenario", scenario, "scenario name")->required();
    app.add_option("--config", config_path, "path to the scenario config file")->required();
    app.add_option("--out", out_dir, "output directory (default: current)");
    app.add_option("--modes", modes_override,
                   "override the mode-count schedule, e.g. '40,70,100'");
    app.add_option("--tolerance", tolerance_override, "override integrator rtol");
    app.add_option("--seed", seed_override, "override the property-suite seed");
    app.add_flag("--validate-only", validate_flag, "resolve the config and report, no compute");

    CLI11_PARSE(app, argc, argv);

    using namespace cavdet;
    try {
        ConfigMap cfg = ConfigMap::parse_file(config_path);
        if (!modes_override.empty()) {
            // causality keeps its schedule under [cavity], the others under
            // [convergence]
            const std::string key =
                scenario == "causality" ? "cavity.mode_counts" : "convergence.schedule";
            cfg.replace(key, modes_override);
        }
        if (!tolerance_override.empty()) cfg.replace("integrator.rtol", tolerance_override);
        if (seed_override >= 0) cfg.replace("seed", std::to_string(seed_override));

        if (validate_flag) return validate_only(scenario, cfg);

        const ExecPolicy exec = openmp_enabled() ? ExecPolicy::openmp : ExecPolicy::serial;
        std::vector<ScenarioResult> results;
        try {
            results = run_scenario(scenario, cfg, exec);
            cfg.check_consumed();
        } catch (const ConfigError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        } catch (const IntegrationError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 3;
        } catch (const UnphysicalStateError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 3;
        }

        const std::string config_text = cfg.serialize();
        const std::string hash = fnv1a_hex(config_text);

        RunMetadata meta;
        meta.scenario = scenario;
        meta.config_hash = hash;
        meta.config_text = config_text;
        meta.numbers["workers"] = worker_count();

        try {
            std::filesystem::create_directories(out_dir);
            for (const auto& res : results) {
                res.validate();
                std::vector<std::string> cols{res.axis_name};
                for (const auto& s : res.series) cols.push_back(s.name);
                std::vector<std::vector<double>> rows(res.axis.size());
                for (size_t i = 0; i < res.axis.size(); ++i) {
                    rows[i].push_back(res.axis[i]);
                    for (const auto& s : res.series) rows[i].push_back(s.values[i]);
                }
                write_csv(out_dir + "/" + res.id + ".csv", cols, rows, hash);

                meta.numbers[res.id + ".mode_count"] = res.mode_count;
                meta.numbers[res.id + ".n_required"] = res.n_required;
                meta.numbers[res.id + ".converged"] = res.converged ? 1.0 : 0.0;
                meta.numbers[res.id + ".max_drift"] = res.max_drift;
                meta.numbers[res.id + ".wall_seconds"] = res.wall_seconds;
                for (const auto& [k, v] : res.numbers) meta.numbers[res.id + "." + k] = v;
            }
            write_metadata(out_dir + "/" + scenario + "_meta.json", meta);
        } catch (const std::runtime_error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 6;
        }

        // flagged violations, reported after the data lands on disk
        for (const auto& res : results) {
            if (!res.converged) {
                std::fprintf(stderr, "non-convergence: %s stopped at N=%d\n", res.id.c_str(),
                             res.mode_count);
                return 4;
            }
        }
        for (const auto& res : results) {
            const auto it = res.numbers.find("thermality_violations");
            if (it != res.numbers.end() && it->second > 0.0) {
                std::fprintf(stderr, "thermality: %g of %zu points above the allowed ratio\n",
                             it->second, res.axis.size());
                return 5;
            }
        }
        std::printf("wrote %zu series group(s) to %s (config %s)\n", results.size(),
                    out_dir.c_str(), hash.c_str());
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
