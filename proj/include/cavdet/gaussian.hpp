#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "cavdet/types.hpp"

namespace cavdet {

// Symplectic form Omega = [[0, I], [-I, 0]] for K modes (2K x 2K).
Mat symplectic_form(int modes);

// Covariance matrix of a Gaussian state. Wraps a real symmetric 2K x 2K
// matrix in the (q..., p...) ordering; the constructor symmetrizes small
// asymmetries and rejects anything structurally wrong.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Mat m, double symmetry_tol = 1e-9);
    static CovarianceMatrix vacuum(int modes);

    int modes() const { return static_cast<int>(m_.rows()) / 2; }
    const Mat& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Mat m_;
};

// Linear phase-space transformation S acting as sigma -> S sigma S^T.
// Symplecticity is a property of how S was produced, not enforced here;
// use check_symplectic to measure the defect.
class SymplecticMatrix {
public:
    explicit SymplecticMatrix(Mat m);
    static SymplecticMatrix identity(int modes);

    int modes() const { return static_cast<int>(m_.rows()) / 2; }
    const Mat& mat() const { return m_; }

private:
    Mat m_;
};

// max-abs entry of S Omega S^T - Omega
double check_symplectic(const SymplecticMatrix& s);

// Symplectic eigenvalues of sigma, sorted descending. Computed from the
// Hermitian matrix i sigma^(1/2) Omega sigma^(1/2); its spectrum comes in
// +/- pairs and the pairing is verified to pair_tol (relative).
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma,
                                           double pair_tol = 1e-9);

// purity = 1/sqrt(det sigma); requires det sigma >= 1 (up to tolerance)
double purity(const CovarianceMatrix& sigma);

// Ground-state population of a single-mode state:
// p0 = 2 / sqrt(det sigma + tr sigma + 1). Requires a 2x2 covariance.
double ground_probability(const CovarianceMatrix& sigma_d);

// Number-basis populations of a thermal state with symplectic eigenvalue nu:
// p_n = (2/(nu+1)) ((nu-1)/(nu+1))^n for n = 0..n_max.
std::vector<double> thermal_spectrum(double nu, int n_max);

// Temperature of a thermal single-mode state with the given energy gap:
// T = gap / ln(1 + 2/(nu-1)); returns 0 for nu <= 1 (pure ground state).
double temperature(double nu, double gap);

struct ThermalityGap {
    double delta_p0;  // |p0(sigma) - 2/(nu+1)|
    double p1_therm;  // first excited thermal population at the same nu
    double nu;
};

// Distance of a single-mode state from the thermal state sharing its nu.
// delta_p0 is evaluated through the eigenvalue gap of sigma, which avoids
// the catastrophic cancellation of subtracting two near-unit populations.
ThermalityGap thermality_gap(const CovarianceMatrix& sigma_d);

// Logarithmic negativity of a two-mode state (4x4 covariance), natural log
// by default. E_N = max(0, -log nu_minus^Gamma) with
// nu_minus^Gamma = sqrt((dt - sqrt(dt^2 - 4 det sigma))/2),
// dt = det s1 + det s2 - 2 det s12.
double log_negativity(const CovarianceMatrix& sigma,
                      double log_base = std::numbers::e);

// Partial trace: keep the listed modes (0-based), preserving their order.
CovarianceMatrix reduce_state(const CovarianceMatrix& sigma, std::span<const int> keep);

// sigma -> S sigma S^T, resymmetrized
CovarianceMatrix evolve_covariance(const SymplecticMatrix& s, const CovarianceMatrix& sigma);

// log |det m| via LU, usable where the determinant itself would overflow
double log_abs_det(const Mat& m);

}  // namespace cavdet
