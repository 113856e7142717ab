#include "cavdet/takagi.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace cavdet {

TakagiFactorization takagi(const CMat& a, double pair_tol, double residual_tol) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("takagi: matrix must be square");
    const double scale = std::max(1.0, n > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
    if (n > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("takagi: matrix must be complex symmetric");

    Mat big(2 * n, 2 * n);
    big.topLeftCorner(n, n) = a.real();
    big.topRightCorner(n, n) = a.imag();
    big.bottomLeftCorner(n, n) = a.imag();
    big.bottomRightCorner(n, n) = -a.real();
    big = ((big + big.transpose()) / 2.0).eval();  // scrub asymmetric roundoff

    Eigen::SelfAdjointEigenSolver<Mat> es(big);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("takagi: eigendecomposition of the embedding failed");
    const Vec& vals = es.eigenvalues();  // ascending
    const Mat& vecs = es.eigenvectors();
    const double cut = pair_tol * std::max(1.0, n > 0 ? vals.cwiseAbs().maxCoeff() : 0.0);

    TakagiFactorization out;
    out.v.resize(n, n);
    out.values.resize(n);
    Eigen::Index filled = 0;
    for (Eigen::Index i = 2 * n - 1; i >= 0 && filled < n; --i) {
        if (vals(i) <= cut) break;  // descending walk, rest is kernel or negative
        out.v.col(filled).real() = vecs.col(i).head(n);
        out.v.col(filled).imag() = vecs.col(i).tail(n);
        out.values(filled) = vals(i);
        ++filled;
    }
    // Zero modes come in complex-linearly dependent pairs (v and iv), so
    // orthonormalize against everything accepted so far and keep survivors.
    for (Eigen::Index i = 2 * n - 1; i >= 0 && filled < n; --i) {
        if (std::abs(vals(i)) > cut) continue;
        CVec x(n);
        x.real() = vecs.col(i).head(n);
        x.imag() = vecs.col(i).tail(n);
        for (Eigen::Index c = 0; c < filled; ++c) x -= out.v.col(c) * out.v.col(c).dot(x);
        const double nrm = x.norm();
        if (nrm > 1e-8) {
            out.v.col(filled) = x / nrm;
            out.values(filled) = 0.0;
            ++filled;
        }
    }
    if (filled < n)
        throw std::runtime_error("takagi: could not assemble a full unitary from the embedding");

    if (n > 0) {
        const CMat rebuilt = out.v * out.values.asDiagonal() * out.v.transpose();
        out.residual = (rebuilt - a).cwiseAbs().maxCoeff();
        const double unit = (out.v.adjoint() * out.v - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
        if (out.residual > residual_tol * scale || unit > residual_tol)
            throw std::runtime_error("takagi: factorization residual " +
                                     std::to_string(out.residual) + " is above tolerance");
    }
    return out;
}

}  // namespace cavdet
