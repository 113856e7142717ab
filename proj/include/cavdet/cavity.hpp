#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cavdet/types.hpp"

namespace cavdet {

enum class Boundary { dirichlet, periodic };
enum class Picture { interaction, full };

// One-dimensional cavity of length L with an explicit list of mode indices.
// Dirichlet indices are n >= 1; periodic indices are signed (n != 0 unless
// the zero mode is explicitly requested, which is rejected by the coupling
// assembly since omega = 0 has no ladder description).
struct CavityConfig {
    double length = 0.0;
    Boundary boundary = Boundary::dirichlet;
    std::vector<int> mode_indices;
};

// First n_side modes: 1..n for Dirichlet, +/-1..+/-n for periodic.
std::vector<int> default_modes(Boundary boundary, int n_side, bool include_zero = false);

double mode_frequency(const CavityConfig& c, int n);
double mode_wavenumber(const CavityConfig& c, int n);

// Spatial part v_n(x): sin(k x) for Dirichlet, e^{ikx} for periodic.
// Deliberately unnormalized (no 1/sqrt(omega L) factor); pass
// normalized = true for continuum-comparison studies.
Complex mode_spatial(const CavityConfig& c, int n, double x, bool normalized = false);

// Full mode function u_n(x, t) = e^{-i omega t} v_n(x).
Complex mode_function(const CavityConfig& c, int n, double x, double t, bool normalized = false);

// Detector trajectory (t(tau), x(tau)) parametrized by proper time.
class Worldline {
public:
    enum class Kind { inertial, uniform_acceleration, custom };

    static Worldline inertial(double x0);
    static Worldline uniformly_accelerated(double acceleration);
    static Worldline custom(std::function<double(double)> t_of_tau,
                            std::function<double(double)> x_of_tau,
                            std::function<double(double)> dt_dtau = {});

    // returns {t, x}
    std::pair<double, double> eval(double tau) const;
    double redshift(double tau) const;  // dt/dtau, must stay positive
    Kind kind() const { return kind_; }
    double parameter() const { return param_; }  // x0 or acceleration

private:
    Worldline() = default;
    Kind kind_ = Kind::inertial;
    double param_ = 0.0;
    std::function<double(double)> t_fn_, x_fn_, dt_fn_;
};

// lambda(tau): sharp turns on at tau = 0 and stays at lambda;
// gaussian is lambda e^{-tau^2 / 2 width^2}.
struct SwitchingProfile {
    enum class Kind { sharp, gaussian };
    Kind kind = Kind::sharp;
    double lambda = 0.0;
    double width = 0.0;  // gaussian only

    static SwitchingProfile sharp(double lambda);
    static SwitchingProfile gaussian(double lambda, double width);
    double operator()(double tau) const;
};

struct DetectorConfig {
    double gap = 0.0;  // harmonic oscillator frequency Omega
    SwitchingProfile switching;
    Worldline worldline = Worldline::inertial(0.0);
    // optional per-mode coupling weights, aligned with cavity.mode_indices
    std::vector<double> mode_weights;
};

// Quadratic Hamiltonian coefficients: H = a^dag^T w a + a^dag^T g a^dag + h.c.
// with w Hermitian and g symmetric. Detectors occupy indices 0..M-1,
// field modes M..M+N-1.
struct CouplingMatrices {
    CMat w;
    CMat g;
};

// Assemble w and g at proper time tau. In the interaction picture only the
// detector-field blocks are populated, with the detector phase e^{i Omega tau}
// and the mode function evaluated on the detector worldline. The full picture
// uses the bare spatial mode functions and adds the free diagonal terms
// Omega_d and (dt/dtau) omega_n.
//
// Multi-detector runs require a shared proper time, so any non-inertial
// worldline is rejected when more than one detector is present.
CouplingMatrices coupling_matrices(double tau, const std::vector<DetectorConfig>& detectors,
                                   const CavityConfig& cavity, Picture picture,
                                   bool normalized_modes = false);

// Quadratic-form matrix of the Hamiltonian over (q, p) quadratures and its
// real symmetrization F + F^T, which generates d S / d tau = Omega F_sym S.
struct FMatrix {
    CMat f;
    Mat f_sym;
};

FMatrix f_matrix(const CouplingMatrices& c, double hermiticity_tol = 1e-10);

}  // namespace cavdet
