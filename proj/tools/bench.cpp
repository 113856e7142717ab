// Micro-benchmark for the evolution right-hand side: dense reference versus
// the structured kernel (serial and OpenMP variants), plus a sweep-level
// comparison of the execution policies. Numbers are wall-clock; correctness
// of the kernels against each other is asserted here and tested properly in
// the unit suite.
#include <chrono>
#include <cstdio>
#include <numbers>
#include <vector>

#include "cavdet/cavity.hpp"
#include "cavdet/evolver.hpp"
#include "cavdet/parallel.hpp"

using namespace cavdet;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

EvolutionSystem make_system(int n_side) {
    CavityConfig cav{4.0 * std::numbers::pi, Boundary::periodic,
                     default_modes(Boundary::periodic, n_side)};
    DetectorConfig det{4.0, SwitchingProfile::gaussian(0.01, 8.0 / 7.0),
                       Worldline::uniformly_accelerated(1.0), {}};
    return EvolutionSystem({det}, cav, Picture::interaction);
}

double time_kernel(const EvolutionSystem& sys, RhsKernel kernel, int reps, double* checksum) {
    const int dim = 2 * sys.mode_count();
    Mat s = Mat::Identity(dim, dim);
    Mat out(dim, dim);
    // one warm-up evaluation outside the clock
    sys.apply_generator(0.3, s, out, kernel);
    const double t0 = now_seconds();
    for (int r = 0; r < reps; ++r) sys.apply_generator(0.1 + 1e-3 * r, s, out, kernel);
    const double dt = now_seconds() - t0;
    *checksum = out.cwiseAbs().sum();
    return dt / reps;
}

}  // namespace

int main() {
    std::printf("openmp: %s, workers: %d\n", openmp_enabled() ? "on" : "off", worker_count());

    std::printf("\nrhs kernels, seconds per evaluation (2K x 2K state)\n");
    std::printf("%8s %6s %14s %14s %14s %10s\n", "n_side", "K", "dense", "structured",
                "structured_mp", "speedup");
    for (int n_side : {8, 16, 32, 64}) {
        EvolutionSystem sys = make_system(n_side);
        const int reps = n_side >= 32 ? 20 : 100;
        double c_dense, c_ser, c_omp;
        const double t_dense = time_kernel(sys, RhsKernel::dense_serial, reps, &c_dense);
        const double t_ser = time_kernel(sys, RhsKernel::structured_serial, reps, &c_ser);
        const double t_omp = time_kernel(sys, RhsKernel::structured_openmp, reps, &c_omp);
        // structured serial vs openmp must agree bitwise (same arithmetic per
        // column); dense differs by summation order only
        if (std::abs(c_ser - c_dense) > 1e-9 * c_dense || c_omp != c_ser) {
            std::fprintf(stderr, "kernel outputs disagree (%g, %g, %g)\n", c_dense, c_ser,
                         c_omp);
            return 1;
        }
        std::printf("%8d %6d %14.3e %14.3e %14.3e %9.1fx\n", n_side, sys.mode_count(), t_dense,
                    t_ser, t_omp, t_dense / t_ser);
    }

    std::printf("\nshort evolution (rk45, rtol 1e-9), seconds per run\n");
    IntegratorConfig icfg;
    icfg.method = StepperMethod::rk45_adaptive;
    icfg.rtol = 1e-9;
    icfg.atol = 1e-11;
    for (int n_side : {8, 16, 32}) {
        EvolutionSystem sys = make_system(n_side);
        const double t0 = now_seconds();
        auto traj_d = evolve(sys, {-1.0, 1.0}, icfg, {}, RhsKernel::dense_serial);
        const double t1 = now_seconds();
        auto traj_s = evolve(sys, {-1.0, 1.0}, icfg, {}, RhsKernel::structured_serial);
        const double t2 = now_seconds();
        // summation order differs between the kernels, so agreement is at the
        // integration-tolerance level, not bitwise
        const double diff =
            (traj_d.matrices.back().mat() - traj_s.matrices.back().mat()).cwiseAbs().maxCoeff();
        std::printf("  n_side %3d: dense %8.3fs  structured %8.3fs  |dS| = %.1e\n", n_side,
                    t1 - t0, t2 - t1, diff);
        if (diff > 1e-6) {
            std::fprintf(stderr, "dense and structured trajectories diverged\n");
            return 1;
        }
    }

    std::printf("\nsweep policies, 16 independent evolutions (n_side 12)\n");
    for (ExecPolicy pol : {ExecPolicy::serial, ExecPolicy::openmp}) {
        std::vector<double> out(16);
        const double t0 = now_seconds();
        parallel_for(16, pol, [&](std::int64_t i) {
            EvolutionSystem sys = make_system(12);
            auto traj = evolve(sys, {-1.0, 1.0}, icfg, {}, RhsKernel::structured_serial);
            out[i] = traj.matrices.back().mat().cwiseAbs().sum();
        });
        const double dt = now_seconds() - t0;
        std::printf("  %-7s %8.3fs (checksum %.12e)\n",
                    pol == ExecPolicy::serial ? "serial" : "openmp", dt, out[7]);
    }
    return 0;
}
