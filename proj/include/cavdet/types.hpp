#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace cavdet {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Units: hbar = c = 1 throughout. Covariance convention:
// sigma_ij = <x_i x_j + x_j x_i> - 2<x_i><x_j>, so the vacuum is the identity.
// Quadrature ordering is (q_1..q_K, p_1..p_K) with detector modes first.

// Thrown when a state fails a physicality requirement (covariance not a
// valid quantum state, symplectic eigenvalue below 1, negative determinant).
class UnphysicalStateError : public std::runtime_error {
public:
    explicit UnphysicalStateError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an integration cannot proceed (step underflow, drift ceiling
// exceeded, oracle squeezing leaving its domain of validity).
class IntegrationError : public std::runtime_error {
public:
    explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown for malformed run configuration (unknown keys, missing sections,
// values out of range).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cavdet
