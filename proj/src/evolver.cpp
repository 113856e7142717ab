#include "cavdet/evolver.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cavdet {

EvolutionSystem::EvolutionSystem(std::vector<DetectorConfig> detectors, CavityConfig cavity,
                                 Picture picture, bool normalized_modes)
    : detectors_(std::move(detectors)),
      cavity_(std::move(cavity)),
      picture_(picture),
      normalized_(normalized_modes) {
    // fail fast on anything coupling_matrices would reject
    coupling_matrices(0.0, detectors_, cavity_, picture_, normalized_);
    omegas_.reserve(cavity_.mode_indices.size());
    for (int n : cavity_.mode_indices) omegas_.push_back(mode_frequency(cavity_, n));
}

int EvolutionSystem::mode_count() const {
    return static_cast<int>(detectors_.size() + omegas_.size());
}

CouplingMatrices EvolutionSystem::couplings(double tau) const {
    return coupling_matrices(tau, detectors_, cavity_, picture_, normalized_);
}

Mat EvolutionSystem::f_sym(double tau) const { return f_matrix(couplings(tau)).f_sym; }

double EvolutionSystem::max_frequency() const {
    double w = 0.0;
    for (const auto& d : detectors_) w = std::max(w, d.gap);
    for (double om : omegas_) w = std::max(w, om);
    return w;
}

bool EvolutionSystem::has_sharp_switching() const {
    for (const auto& d : detectors_)
        if (d.switching.kind == SwitchingProfile::Kind::sharp) return true;
    return false;
}

namespace {

// Per-pair quadrature couplings at one instant. With coupling c = w_df and
// gc = g_df the symmetrized quadratic form has
//   P_df = Re c + 2 Re gc      (qq block)
//   R_df = Re c - 2 Re gc      (pp block)
//   Q_df = -Im c + 2 Im gc     (qp block, detector row)
//   Q_fd = +Im c + 2 Im gc     (qp block, detector column)
struct StructuredGenerator {
    int m = 0, n = 0;
    Mat p_row, r_row, q_row, q_col;  // m x n each
    Vec diag;                        // free-term diagonal, length m + n
};

void assemble_structured(const EvolutionSystem& sys, double tau, StructuredGenerator& out) {
    const auto& dets = sys.detectors();
    const auto& cav = sys.cavity();
    const int m = static_cast<int>(dets.size());
    const int n = static_cast<int>(cav.mode_indices.size());
    if (out.p_row.rows() != m || out.p_row.cols() != n) {
        out.m = m;
        out.n = n;
        out.p_row.resize(m, n);
        out.r_row.resize(m, n);
        out.q_row.resize(m, n);
        out.q_col.resize(m, n);
        out.diag.resize(m + n);
    }
    out.diag.setZero();
    const bool full = sys.picture() == Picture::full;
    const bool normalized = sys.normalized_modes();
    for (int j = 0; j < m; ++j) {
        const auto& det = dets[j];
        const double lam = det.switching(tau);
        const auto [t, x] = det.worldline.eval(tau);
        const Complex phase =
            full ? Complex(1.0, 0.0) : std::polar(1.0, det.gap * tau);
        if (full) out.diag(j) = det.gap;
        for (int i = 0; i < n; ++i) {
            const int mode = cav.mode_indices[i];
            const double weight = det.mode_weights.empty() ? 1.0 : det.mode_weights[i];
            const Complex u = full ? mode_spatial(cav, mode, x, normalized)
                                   : mode_function(cav, mode, x, t, normalized);
            const Complex c = lam * weight * phase * u;
            const Complex gc = 0.5 * lam * weight * phase * std::conj(u);
            out.p_row(j, i) = c.real() + 2.0 * gc.real();
            out.r_row(j, i) = c.real() - 2.0 * gc.real();
            out.q_row(j, i) = -c.imag() + 2.0 * gc.imag();
            out.q_col(j, i) = c.imag() + 2.0 * gc.imag();
        }
    }
    if (full) {
        const double rs = dets.front().worldline.redshift(tau);
        for (int i = 0; i < n; ++i)
            out.diag(m + i) = rs * mode_frequency(cav, cav.mode_indices[i]);
    }
}

// out = Omega F_sym S using only the populated rows/columns
void apply_structured(const StructuredGenerator& gen, Eigen::Ref<const Mat> s,
                      Eigen::Ref<Mat> out, bool use_openmp) {
    const int m = gen.m, n = gen.n, k = m + n;
    const auto cols = s.cols();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (use_openmp)
#endif
    for (Eigen::Index c = 0; c < cols; ++c) {
        const double* sc = s.col(c).data();
        double* oc = out.col(c).data();
        for (int j = 0; j < m; ++j) {
            double acc_q = gen.diag(j) * sc[k + j];
            double acc_p = -gen.diag(j) * sc[j];
            for (int i = 0; i < n; ++i) {
                const double sq = sc[m + i];
                const double sp = sc[k + m + i];
                acc_q += gen.q_col(j, i) * sq + gen.r_row(j, i) * sp;
                acc_p -= gen.p_row(j, i) * sq + gen.q_row(j, i) * sp;
            }
            oc[j] = acc_q;
            oc[k + j] = acc_p;
        }
        for (int i = 0; i < n; ++i) {
            double acc_q = gen.diag(m + i) * sc[k + m + i];
            double acc_p = -gen.diag(m + i) * sc[m + i];
            for (int j = 0; j < m; ++j) {
                const double sq = sc[j];
                const double sp = sc[k + j];
                acc_q += gen.q_row(j, i) * sq + gen.r_row(j, i) * sp;
                acc_p -= gen.p_row(j, i) * sq + gen.q_col(j, i) * sp;
            }
            oc[m + i] = acc_q;
            oc[k + m + i] = acc_p;
        }
    }
    (void)use_openmp;
}

}  // namespace

void EvolutionSystem::apply_generator(double tau, Eigen::Ref<const Mat> s, Eigen::Ref<Mat> out,
                                      RhsKernel kernel) const {
    const int k = mode_count();
    if (s.rows() != 2 * k || out.rows() != 2 * k || out.cols() != s.cols())
        throw std::invalid_argument("apply_generator: shape mismatch");
    if (kernel == RhsKernel::dense_serial) {
        const Mat fs = f_sym(tau);
        // Omega [[P, Q], [Q^T, R]] = [[Q^T, R], [-P, -Q]]
        Mat g(2 * k, 2 * k);
        g.topRows(k) = fs.bottomRows(k);
        g.bottomRows(k) = -fs.topRows(k);
        out.noalias() = g * s;
        return;
    }
    StructuredGenerator gen;
    assemble_structured(*this, tau, gen);
    apply_structured(gen, s, out, kernel == RhsKernel::structured_openmp);
}

namespace {

std::vector<double> window_samples(const std::vector<double>& samples, double lo, double hi) {
    std::vector<double> out;
    for (double s : samples)
        if (s >= lo && s <= hi) out.push_back(s);
    return out;
}

}  // namespace

EvolutionTrajectory evolve(const EvolutionSystem& system, std::pair<double, double> window,
                           const IntegratorConfig& cfg, const std::vector<double>& sample_times,
                           RhsKernel kernel) {
    const auto [t0, t1] = window;
    if (!(t1 > t0)) throw std::invalid_argument("evolve: need an increasing time window");
    const int k = system.mode_count();
    const int dim = 2 * k;

    IntegratorConfig local = cfg;
    if (local.dt_max <= 0.0) {
        const double wmax = system.max_frequency();
        local.dt_max = wmax > 0.0 ? 0.05 * 2.0 * std::numbers::pi / wmax : (t1 - t0) / 100.0;
    }

    EvolutionTrajectory traj;
    StructuredGenerator scratch;
    const OdeRhs rhs = [&](double tau, const Vec& y, Vec& dy) {
        Eigen::Map<const Mat> s(y.data(), dim, dim);
        Eigen::Map<Mat> ds(dy.data(), dim, dim);
        if (kernel == RhsKernel::dense_serial) {
            system.apply_generator(tau, s, ds, kernel);
        } else {
            assemble_structured(system, tau, scratch);
            apply_structured(scratch, s, ds, kernel == RhsKernel::structured_openmp);
        }
    };

    Vec y(dim * dim);
    Eigen::Map<Mat>(y.data(), dim, dim) = Mat::Identity(dim, dim);

    const Mat om = symplectic_form(k);
    auto handle_sample = [&](double t, const Vec& yy) {
        Mat s = Eigen::Map<const Mat>(yy.data(), dim, dim);
        const double defect = (s * om * s.transpose() - om).cwiseAbs().maxCoeff();
        if (defect > local.drift_ceiling)
            throw IntegrationError("evolve: symplectic drift " + std::to_string(defect) +
                                   " exceeded the ceiling at tau=" + std::to_string(t));
        traj.times.push_back(t);
        traj.drifts.push_back(defect);
        traj.max_drift = std::max(traj.max_drift, defect);
        traj.matrices.emplace_back(std::move(s));
    };

    // Sharp switching makes the generator discontinuous at tau = 0; giving
    // the stepper a window edge there keeps every integrated piece smooth.
    std::vector<std::pair<double, double>> pieces;
    if (system.has_sharp_switching() && t0 < 0.0 && t1 > 0.0) {
        pieces.push_back({t0, 0.0});
        pieces.push_back({0.0, t1});
    } else {
        pieces.push_back({t0, t1});
    }

    long steps_since_fix = 0;
    StepCallback on_step;
    if (local.resymplectify_every > 0) {
        on_step = [&](double, Vec& yy) -> bool {
            if (++steps_since_fix < local.resymplectify_every) return false;
            steps_since_fix = 0;
            Eigen::Map<Mat> s(yy.data(), dim, dim);
            s = resymplectify(SymplecticMatrix(Mat(s))).mat();
            return true;
        };
    }

    for (size_t pi = 0; pi < pieces.size(); ++pi) {
        const auto [lo, hi] = pieces[pi];
        auto samples = window_samples(sample_times, lo, hi);
        const bool last_piece = pi + 1 == pieces.size();
        StepperStats st = integrate_ode(
            rhs, lo, hi, y, local, samples,
            [&](double t, const Vec& yy) {
                const bool is_end = std::abs(t - hi) < 1e-12 * std::max(1.0, std::abs(hi));
                const bool requested = std::any_of(samples.begin(), samples.end(), [&](double s) {
                    return std::abs(s - t) < 1e-12 * std::max(1.0, std::abs(t));
                });
                if (requested || (is_end && last_piece)) handle_sample(t, yy);
            },
            on_step);
        traj.stats.steps_accepted += st.steps_accepted;
        traj.stats.steps_rejected += st.steps_rejected;
        traj.stats.rhs_evaluations += st.rhs_evaluations;
        traj.stats.min_step = std::min(traj.stats.min_step == 0.0
                                           ? std::numeric_limits<double>::infinity()
                                           : traj.stats.min_step,
                                       st.min_step);
    }
    return traj;
}

SymplecticMatrix evolve_static(const Mat& f_sym, double duration) {
    if (f_sym.rows() != f_sym.cols() || f_sym.rows() % 2 != 0)
        throw std::invalid_argument("evolve_static: F_sym must be square 2K x 2K");
    const double asym = (f_sym - f_sym.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(1.0, f_sym.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("evolve_static: F_sym is not symmetric");
    const int k = static_cast<int>(f_sym.rows()) / 2;
    const Mat gen = symplectic_form(k) * f_sym * duration;
    return SymplecticMatrix(gen.exp());
}

SymplecticMatrix resymplectify(const SymplecticMatrix& s, double target_defect,
                               int max_iterations) {
    const int k = s.modes();
    const Mat om = symplectic_form(k);
    Mat cur = s.mat();
    double defect = check_symplectic(SymplecticMatrix(cur));
    for (int it = 0; it < max_iterations; ++it) {
        if (defect <= target_defect) return SymplecticMatrix(cur);
        Eigen::PartialPivLU<Mat> lu(cur.transpose());
        if (lu.determinant() == 0.0)
            throw UnphysicalStateError("resymplectify: matrix is singular");
        const Mat inv_t = lu.solve(Mat::Identity(2 * k, 2 * k));
        Mat next = 0.5 * (cur - om * inv_t * om);
        const double next_defect = check_symplectic(SymplecticMatrix(next));
        if (!(next_defect < defect) && next_defect > target_defect)
            throw UnphysicalStateError(
                "resymplectify: iteration stalled, input is too far from symplectic");
        cur = std::move(next);
        defect = next_defect;
    }
    if (defect > target_defect)
        throw UnphysicalStateError("resymplectify: failed to reach the target defect");
    return SymplecticMatrix(cur);
}

}  // namespace cavdet
