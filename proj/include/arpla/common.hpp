// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace arpla {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Random source used across the library. Every stochastic operation takes one
/// explicitly so trajectories are reproducible from a seed.
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Numerical breakdown: non-PD covariance, impossible emission, grid leakage
/// (CLI exit code 3).
class NumericFault : public Error {
  public:
    using Error::Error;
};

/// Shape mismatch between cooperating objects.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Trace / dataset file problems. Carries the 1-based line number when known
/// (0 when the failure is not tied to one line).
class TraceError : public Error {
  public:
    TraceError(const std::string& what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// splitmix64 finalizer; used to derive independent stream seeds from a master
/// seed and a counter.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t counter) {
    return mix_seed(mix_seed(master ^ mix_seed(stream)) + counter);
}

/// Circularly symmetric complex Gaussian with E|x|^2 = variance, split equally
/// between the real and imaginary parts.
inline Complex complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline double snr_db_to_noise_var(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

inline double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(const RVector& v) {
    const double m = v.maxCoeff();
    if (m == kNegInf) return kNegInf;
    if (m == kPosInf) return kPosInf;
    return m + std::log((v.array() - m).exp().sum());
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

/// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) {
    return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace arpla
