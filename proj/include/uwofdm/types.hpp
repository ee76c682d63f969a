// Shared linear-algebra aliases and error types for the UW-OFDM toolkit.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace uwofdm {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// A time-domain OFDM symbol (length N) or a frequency-domain symbol
// (length N, zero subcarriers included). Downsized frequency vectors
// (zero subcarriers excluded, length N_d+N_r) are also CVec; sizes are
// checked at the operation boundaries.
using TimeSymbol = CVec;
using FreqSymbol = CVec;

/// Invalid or inconsistent system configuration (bad index sets, singular
/// constraint subsystem, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Pathological channel: the equalizer system is numerically rank deficient.
class SingularChannelError : public std::runtime_error {
 public:
  explicit SingularChannelError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace uwofdm
