#include "cavdet/gaussian.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace cavdet {

Mat symplectic_form(int modes) {
    if (modes < 1) throw std::invalid_argument("symplectic_form: modes must be >= 1");
    Mat om = Mat::Zero(2 * modes, 2 * modes);
    om.topRightCorner(modes, modes) = Mat::Identity(modes, modes);
    om.bottomLeftCorner(modes, modes) = -Mat::Identity(modes, modes);
    return om;
}

CovarianceMatrix::CovarianceMatrix(Mat m, double symmetry_tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2 || m_.rows() % 2 != 0)
        throw std::invalid_argument("CovarianceMatrix: need a square 2K x 2K matrix");
    const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if (asym > symmetry_tol * scale)
        throw std::invalid_argument("CovarianceMatrix: input is not symmetric (defect " +
                                    std::to_string(asym) + ")");
    m_ = 0.5 * (m_ + m_.transpose()).eval();
}

CovarianceMatrix CovarianceMatrix::vacuum(int modes) {
    return CovarianceMatrix(Mat::Identity(2 * modes, 2 * modes));
}

SymplecticMatrix::SymplecticMatrix(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2 || m_.rows() % 2 != 0)
        throw std::invalid_argument("SymplecticMatrix: need a square 2K x 2K matrix");
}

SymplecticMatrix SymplecticMatrix::identity(int modes) {
    return SymplecticMatrix(Mat::Identity(2 * modes, 2 * modes));
}

double check_symplectic(const SymplecticMatrix& s) {
    const Mat om = symplectic_form(s.modes());
    return (s.mat() * om * s.mat().transpose() - om).cwiseAbs().maxCoeff();
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& sigma, double pair_tol) {
    const int k = sigma.modes();
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma.mat());
    if (es.info() != Eigen::Success)
        throw UnphysicalStateError("symplectic_eigenvalues: eigendecomposition failed");
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw UnphysicalStateError("symplectic_eigenvalues: covariance is not positive definite");

    // sigma^(1/2) (i Omega) sigma^(1/2) is Hermitian and shares the spectrum
    // of i Omega sigma, so a self-adjoint solver is enough.
    const Mat root = es.operatorSqrt();
    const Mat om = symplectic_form(k);
    CMat herm = Complex(0.0, 1.0) * (root * om * root).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> hs(herm);
    if (hs.info() != Eigen::Success)
        throw UnphysicalStateError("symplectic_eigenvalues: Hermitian solve failed");

    Vec ev = hs.eigenvalues();  // ascending, in +/- pairs
    std::vector<double> nus;
    nus.reserve(k);
    for (int i = 0; i < k; ++i) {
        const double neg = -ev(i);             // i-th most negative
        const double pos = ev(2 * k - 1 - i);  // i-th most positive
        const double ref = std::max(1.0, std::abs(pos));
        if (std::abs(pos - neg) > pair_tol * ref)
            throw UnphysicalStateError(
                "symplectic_eigenvalues: +/- pairing failed, covariance is unphysical");
        nus.push_back(0.5 * (pos + neg));
    }
    std::sort(nus.begin(), nus.end(), std::greater<>());
    return nus;
}

double purity(const CovarianceMatrix& sigma) {
    const double det = sigma.mat().determinant();
    if (det < 1.0 - 1e-9)
        throw UnphysicalStateError("purity: det sigma < 1, state is unphysical");
    return 1.0 / std::sqrt(std::max(det, 1.0));
}

namespace {

// Eigenvalues of a symmetric 2x2, computed without forming the
// characteristic polynomial around a near-degenerate trace.
std::pair<double, double> eig2(const Mat& s) {
    const double half_tr = 0.5 * (s(0, 0) + s(1, 1));
    const double gap = 0.5 * std::hypot(s(0, 0) - s(1, 1), 2.0 * s(0, 1));
    return {half_tr + gap, half_tr - gap};
}

void require_single_mode(const CovarianceMatrix& sigma, const char* who) {
    if (sigma.modes() != 1)
        throw std::invalid_argument(std::string(who) + ": expected a single-mode 2x2 covariance");
}

}  // namespace

double ground_probability(const CovarianceMatrix& sigma_d) {
    require_single_mode(sigma_d, "ground_probability");
    const Mat& s = sigma_d.mat();
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    const double radicand = det + s.trace() + 1.0;
    if (radicand <= 0.0 || det <= 0.0)
        throw UnphysicalStateError("ground_probability: covariance is not a valid state");
    return 2.0 / std::sqrt(radicand);
}

std::vector<double> thermal_spectrum(double nu, int n_max) {
    if (nu < 1.0) throw std::invalid_argument("thermal_spectrum: nu must be >= 1");
    if (n_max < 0) throw std::invalid_argument("thermal_spectrum: n_max must be >= 0");
    const double p0 = 2.0 / (nu + 1.0);
    const double ratio = (nu - 1.0) / (nu + 1.0);
    std::vector<double> p(static_cast<size_t>(n_max) + 1);
    double cur = p0;
    for (int n = 0; n <= n_max; ++n) {
        p[static_cast<size_t>(n)] = cur;
        cur *= ratio;
    }
    return p;
}

double temperature(double nu, double gap) {
    if (gap <= 0.0) throw std::invalid_argument("temperature: gap must be positive");
    if (nu <= 1.0) return 0.0;
    return gap / std::log1p(2.0 / (nu - 1.0));
}

ThermalityGap thermality_gap(const CovarianceMatrix& sigma_d) {
    require_single_mode(sigma_d, "thermality_gap");
    const Mat& s = sigma_d.mat();
    const auto [l1, l2] = eig2(s);
    if (l2 <= 0.0) throw UnphysicalStateError("thermality_gap: covariance not positive definite");
    const double det = l1 * l2;
    const double nu = std::sqrt(det);

    // p0 - 2/(nu+1) == 2 (2 sqrt(det) - tr) / (A B (A + B)) with
    // A = sqrt(det + tr + 1), B = nu + 1, and
    // tr - 2 sqrt(det) = (sqrt(l1) - sqrt(l2))^2 exactly. Evaluating it this
    // way keeps the gap meaningful far below the rounding floor of the two
    // populations themselves.
    const double tr_minus = std::pow(std::sqrt(l1) - std::sqrt(l2), 2);
    const double a = std::sqrt(det + s.trace() + 1.0);
    const double b = nu + 1.0;
    ThermalityGap out;
    out.nu = nu;
    out.delta_p0 = 2.0 * tr_minus / (a * b * (a + b));
    out.p1_therm = nu > 1.0 ? (2.0 / (nu + 1.0)) * ((nu - 1.0) / (nu + 1.0)) : 0.0;
    return out;
}

double log_negativity(const CovarianceMatrix& sigma, double log_base) {
    if (sigma.modes() != 2)
        throw std::invalid_argument("log_negativity: expected a two-mode 4x4 covariance");
    if (log_base <= 1.0) throw std::invalid_argument("log_negativity: base must exceed 1");
    const Mat& m = sigma.mat();
    // blocks in (q1,q2,p1,p2) ordering
    Mat s1(2, 2), s2(2, 2), s12(2, 2);
    s1 << m(0, 0), m(0, 2), m(2, 0), m(2, 2);
    s2 << m(1, 1), m(1, 3), m(3, 1), m(3, 3);
    s12 << m(0, 1), m(0, 3), m(2, 1), m(2, 3);
    const double dt = s1.determinant() + s2.determinant() - 2.0 * s12.determinant();
    const double det = m.determinant();
    double disc = dt * dt - 4.0 * det;
    if (disc < 0.0) {
        if (disc < -1e-9 * std::max(1.0, dt * dt))
            throw UnphysicalStateError("log_negativity: discriminant is negative");
        disc = 0.0;
    }
    // (dt - sqrt(disc)) / 2 cancels catastrophically for strong squeezing
    // (dt >> 1); the conjugate form keeps full precision
    const double hi = 0.5 * (dt + std::sqrt(disc));
    if (hi <= 0.0) throw UnphysicalStateError("log_negativity: transposed spectrum collapsed");
    double lo = det / hi;
    if (lo < 0.0) {
        if (lo < -1e-9 * std::max(1.0, std::abs(dt)))
            throw UnphysicalStateError("log_negativity: nu_minus^2 is negative");
        lo = 0.0;
    }
    const double nu_minus = std::sqrt(lo);
    if (nu_minus <= 0.0) return 0.0;
    return std::max(0.0, -std::log(nu_minus) / std::log(log_base));
}

CovarianceMatrix reduce_state(const CovarianceMatrix& sigma, std::span<const int> keep) {
    const int k = sigma.modes();
    if (keep.empty()) throw std::invalid_argument("reduce_state: keep list is empty");
    for (int i : keep)
        if (i < 0 || i >= k) throw std::invalid_argument("reduce_state: mode index out of range");
    const int r = static_cast<int>(keep.size());
    Mat out(2 * r, 2 * r);
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) {
            out(a, b) = sigma(keep[a], keep[b]);
            out(a, r + b) = sigma(keep[a], k + keep[b]);
            out(r + a, b) = sigma(k + keep[a], keep[b]);
            out(r + a, r + b) = sigma(k + keep[a], k + keep[b]);
        }
    }
    return CovarianceMatrix(std::move(out));
}

CovarianceMatrix evolve_covariance(const SymplecticMatrix& s, const CovarianceMatrix& sigma) {
    if (s.modes() != sigma.modes())
        throw std::invalid_argument("evolve_covariance: mode count mismatch");
    Mat out = s.mat() * sigma.mat() * s.mat().transpose();
    return CovarianceMatrix(0.5 * (out + out.transpose()));
}

double log_abs_det(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("log_abs_det: matrix must be square");
    Eigen::PartialPivLU<Mat> lu(m);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double u = std::abs(lu.matrixLU()(i, i));
        if (u == 0.0) return -std::numeric_limits<double>::infinity();
        acc += std::log(u);
    }
    return acc;
}

}  // namespace cavdet
