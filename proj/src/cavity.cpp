#include "cavdet/cavity.hpp"

#include <cmath>
#include <numbers>

namespace cavdet {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::vector<int> default_modes(Boundary boundary, int n_side, bool include_zero) {
    if (n_side < 1) throw std::invalid_argument("default_modes: n_side must be >= 1");
    std::vector<int> ns;
    if (boundary == Boundary::dirichlet) {
        for (int n = 1; n <= n_side; ++n) ns.push_back(n);
    } else {
        for (int n = -n_side; n <= n_side; ++n)
            if (n != 0 || include_zero) ns.push_back(n);
    }
    return ns;
}

double mode_wavenumber(const CavityConfig& c, int n) {
    if (c.length <= 0.0) throw std::invalid_argument("cavity length must be positive");
    if (c.boundary == Boundary::dirichlet) {
        if (n < 1) throw std::invalid_argument("Dirichlet mode index must be >= 1");
        return n * kPi / c.length;
    }
    return 2.0 * n * kPi / c.length;
}

double mode_frequency(const CavityConfig& c, int n) { return std::abs(mode_wavenumber(c, n)); }

Complex mode_spatial(const CavityConfig& c, int n, double x, bool normalized) {
    const double k = mode_wavenumber(c, n);
    Complex v;
    if (c.boundary == Boundary::dirichlet) {
        v = Complex(std::sin(k * x), 0.0);
    } else {
        v = std::polar(1.0, k * x);
    }
    if (normalized) {
        const double om = std::abs(k);
        if (om <= 0.0) throw std::invalid_argument("cannot normalize the zero mode");
        v /= std::sqrt(om * c.length);
    }
    return v;
}

Complex mode_function(const CavityConfig& c, int n, double x, double t, bool normalized) {
    return std::polar(1.0, -mode_frequency(c, n) * t) * mode_spatial(c, n, x, normalized);
}

// ---- worldlines ----

Worldline Worldline::inertial(double x0) {
    Worldline w;
    w.kind_ = Kind::inertial;
    w.param_ = x0;
    return w;
}

Worldline Worldline::uniformly_accelerated(double acceleration) {
    if (acceleration <= 0.0)
        throw std::invalid_argument("uniformly_accelerated: acceleration must be positive");
    Worldline w;
    w.kind_ = Kind::uniform_acceleration;
    w.param_ = acceleration;
    return w;
}

Worldline Worldline::custom(std::function<double(double)> t_of_tau,
                            std::function<double(double)> x_of_tau,
                            std::function<double(double)> dt_dtau) {
    if (!t_of_tau || !x_of_tau)
        throw std::invalid_argument("custom worldline needs both t(tau) and x(tau)");
    Worldline w;
    w.kind_ = Kind::custom;
    w.t_fn_ = std::move(t_of_tau);
    w.x_fn_ = std::move(x_of_tau);
    w.dt_fn_ = std::move(dt_dtau);
    return w;
}

std::pair<double, double> Worldline::eval(double tau) const {
    switch (kind_) {
        case Kind::inertial:
            return {tau, param_};
        case Kind::uniform_acceleration: {
            const double a = param_;
            return {std::sinh(a * tau) / a, (std::cosh(a * tau) - 1.0) / a};
        }
        case Kind::custom:
            return {t_fn_(tau), x_fn_(tau)};
    }
    throw std::logic_error("unreachable");
}

double Worldline::redshift(double tau) const {
    double r = 1.0;
    switch (kind_) {
        case Kind::inertial:
            r = 1.0;
            break;
        case Kind::uniform_acceleration:
            r = std::cosh(param_ * tau);
            break;
        case Kind::custom:
            if (dt_fn_) {
                r = dt_fn_(tau);
            } else {
                const double h = 1e-6 * std::max(1.0, std::abs(tau));
                r = (t_fn_(tau + h) - t_fn_(tau - h)) / (2.0 * h);
            }
            break;
    }
    if (r <= 0.0)
        throw std::invalid_argument("worldline is not future-directed: dt/dtau <= 0 at tau=" +
                                    std::to_string(tau));
    return r;
}

// ---- switching ----

SwitchingProfile SwitchingProfile::sharp(double lambda) {
    SwitchingProfile s;
    s.kind = Kind::sharp;
    s.lambda = lambda;
    return s;
}

SwitchingProfile SwitchingProfile::gaussian(double lambda, double width) {
    if (width <= 0.0) throw std::invalid_argument("gaussian switching needs a positive width");
    SwitchingProfile s;
    s.kind = Kind::gaussian;
    s.lambda = lambda;
    s.width = width;
    return s;
}

double SwitchingProfile::operator()(double tau) const {
    if (kind == Kind::sharp) return tau >= 0.0 ? lambda : 0.0;
    const double z = tau / width;
    return lambda * std::exp(-0.5 * z * z);
}

// ---- coupling assembly ----

CouplingMatrices coupling_matrices(double tau, const std::vector<DetectorConfig>& detectors,
                                   const CavityConfig& cavity, Picture picture,
                                   bool normalized_modes) {
    const int m = static_cast<int>(detectors.size());
    const int n = static_cast<int>(cavity.mode_indices.size());
    if (m < 1) throw std::invalid_argument("coupling_matrices: need at least one detector");
    if (n < 1) throw std::invalid_argument("coupling_matrices: cavity has no modes");
    for (int idx : cavity.mode_indices)
        if (cavity.boundary == Boundary::periodic && idx == 0)
            throw std::invalid_argument(
                "coupling_matrices: the periodic zero mode has no oscillator description");

    if (m > 1) {
        // A shared evolution parameter only makes sense when every detector's
        // clock agrees with it.
        for (const auto& d : detectors)
            if (d.worldline.kind() != Worldline::Kind::inertial)
                throw std::invalid_argument(
                    "coupling_matrices: multiple detectors require inertial worldlines "
                    "(shared proper time)");
    }

    const int k = m + n;
    CouplingMatrices out;
    out.w = CMat::Zero(k, k);
    out.g = CMat::Zero(k, k);

    for (int j = 0; j < m; ++j) {
        const DetectorConfig& det = detectors[j];
        if (det.gap <= 0.0) throw std::invalid_argument("detector gap must be positive");
        if (!det.mode_weights.empty() && static_cast<int>(det.mode_weights.size()) != n)
            throw std::invalid_argument("mode_weights length must match the cavity mode list");
        const double lam = det.switching(tau);
        const auto [t, x] = det.worldline.eval(tau);
        const Complex det_phase =
            picture == Picture::interaction ? std::polar(1.0, det.gap * tau) : Complex(1.0, 0.0);
        if (picture == Picture::full) out.w(j, j) += det.gap;

        for (int i = 0; i < n; ++i) {
            const int mode = cavity.mode_indices[i];
            const double weight = det.mode_weights.empty() ? 1.0 : det.mode_weights[i];
            const Complex u = picture == Picture::interaction
                                  ? mode_function(cavity, mode, x, t, normalized_modes)
                                  : mode_spatial(cavity, mode, x, normalized_modes);
            const Complex c = lam * weight * det_phase * u;
            out.w(j, m + i) += c;
            out.w(m + i, j) += std::conj(c);
            // a^dag a^dag coefficient split evenly to keep g symmetric
            const Complex half = 0.5 * lam * weight * det_phase * std::conj(u);
            out.g(j, m + i) += half;
            out.g(m + i, j) += half;
        }
    }

    if (picture == Picture::full) {
        const double rs = detectors.front().worldline.redshift(tau);
        for (int i = 0; i < n; ++i)
            out.w(m + i, m + i) += rs * mode_frequency(cavity, cavity.mode_indices[i]);
    }
    return out;
}

FMatrix f_matrix(const CouplingMatrices& c, double hermiticity_tol) {
    const auto k = c.w.rows();
    if (c.w.cols() != k || c.g.rows() != k || c.g.cols() != k)
        throw std::invalid_argument("f_matrix: w and g must be square and equally sized");
    const double scale = std::max({1.0, c.w.cwiseAbs().maxCoeff(), c.g.cwiseAbs().maxCoeff()});
    if ((c.w - c.w.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tol * scale)
        throw std::invalid_argument("f_matrix: w is not Hermitian");
    if ((c.g - c.g.transpose()).cwiseAbs().maxCoeff() > hermiticity_tol * scale)
        throw std::invalid_argument("f_matrix: g is not symmetric");

    const CMat gh = c.g.adjoint();
    const CMat a = 0.5 * (c.w + c.g + gh);
    const CMat b = 0.5 * (c.w - c.g - gh);
    const CMat x = Complex(0.0, 0.5) * (c.w - c.g + gh);

    FMatrix out;
    out.f.resize(2 * k, 2 * k);
    out.f.topLeftCorner(k, k) = a;
    out.f.topRightCorner(k, k) = x;
    out.f.bottomLeftCorner(k, k) = x.adjoint();
    out.f.bottomRightCorner(k, k) = b;

    const CMat fs = out.f + out.f.transpose();
    const double imag_resid = fs.imag().cwiseAbs().maxCoeff();
    if (imag_resid > hermiticity_tol * std::max(1.0, fs.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("f_matrix: symmetrized form has an imaginary residue of " +
                                    std::to_string(imag_resid));
    out.f_sym = fs.real();
    return out;
}

}  // namespace cavdet
