// SPDX-License-Identifier: Apache-2.0

#include "arpla/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace arpla {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

CMatrix complex_gaussian_matrix(int rows, int cols, double variance, Rng& rng) {
    CMatrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = complex_normal(rng, variance);
    return m;
}

void check_dims(const CMatrix& m, const ChannelParams& p, const char* what) {
    if (m.rows() != p.m_r || m.cols() != p.m_t)
        throw DimensionError(std::string(what) + ": expected " + std::to_string(p.m_r) + "x" +
                             std::to_string(p.m_t) + ", got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
}

ChannelState init_from_rng(const ChannelParams& params, Rng& rng) {
    params.validate();
    ChannelState s;
    s.t = 0;
    s.h_w = complex_gaussian_matrix(params.m_r, params.m_t, 1.0, rng);
    const Eigen::VectorXcd a_r = steering_vector(params.m_r, params.los_arrival);
    const Eigen::VectorXcd a_t = steering_vector(params.m_t, params.los_departure);
    s.h_los = a_r * a_t.adjoint();
    // unit-modulus entries already give ||h_los||_F^2 = m_r * m_t; rescale anyway
    // so the contract survives any change to the steering construction
    const double target = std::sqrt(static_cast<double>(params.m_r * params.m_t));
    s.h_los *= target / s.h_los.norm();
    s.k_now = params.rician_factor(0);
    return s;
}

}  // namespace

const char* to_string(Identity who) { return who == Identity::Alice ? "alice" : "eve"; }

void ChannelParams::validate() const {
    require(m_t >= 1 && m_r >= 1, "antenna counts must be >= 1");
    require(rho_t >= 0.0 && rho_t <= 1.0, "rho_t must lie in [0,1]");
    require(r_tx >= 0.0 && r_tx < 1.0, "r_tx must lie in [0,1)");
    require(r_rx >= 0.0 && r_rx < 1.0, "r_rx must lie in [0,1)");
    require(noise_var >= 0.0, "noise_var must be >= 0");
    require(k0 >= 0.0, "k0 must be >= 0");
    require(sigma_phi >= 0.0, "sigma_phi must be >= 0");
    require(std::isfinite(los_departure) && std::isfinite(los_arrival), "LoS angles must be finite");
    for (const auto& b : blockage) require(b.start >= 1 && b.length >= 0, "blockage needs t_b >= 1, T_block >= 0");
}

std::vector<BlockageInterval> ChannelParams::normalized_blockage() const {
    std::vector<BlockageInterval> v = blockage;
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    std::vector<BlockageInterval> out;
    for (const auto& b : v) {
        if (!out.empty() && b.start <= out.back().end() + 1) {
            const int end = std::max(out.back().end(), b.end());
            out.back().length = end - out.back().start;
        } else {
            out.push_back(b);
        }
    }
    return out;
}

bool ChannelParams::blocked(int t) const {
    return std::any_of(blockage.begin(), blockage.end(), [t](const auto& b) { return b.contains(t); });
}

ChannelParams make_eve_params(const ChannelParams& alice, double angle_offset) {
    ChannelParams eve = alice;
    eve.los_departure = alice.los_departure + angle_offset;
    eve.los_arrival = alice.los_arrival + angle_offset;
    eve.blockage.clear();
    return eve;
}

SpatialFactors SpatialFactors::from(const ChannelParams& params) {
    return {hermitian_sqrt(exp_correlation_matrix(params.m_r, params.r_rx)),
            hermitian_sqrt(exp_correlation_matrix(params.m_t, params.r_tx))};
}

CMatrix exp_correlation_matrix(int n, double r) {
    if (n < 1) throw ConfigError("correlation matrix size must be >= 1");
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("correlation coefficient must lie in [0,1)");
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = std::pow(r, std::abs(i - j));
    return m;
}

CMatrix hermitian_sqrt(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    if (es.info() != Eigen::Success) throw NumericFault("eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::VectorXcd steering_vector(int n, double theta) {
    Eigen::VectorXcd a(n);
    for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, kPi * k * std::sin(theta));
    return a;
}

ChannelState step_whitened(const ChannelState& state, const ChannelParams& params, Rng& rng) {
    check_dims(state.h_w, params, "h_w");
    ChannelState next = state;
    const double q = 1.0 - params.rho_t * params.rho_t;
    next.h_w = params.rho_t * state.h_w;
    if (q > 0.0) next.h_w += complex_gaussian_matrix(params.m_r, params.m_t, q, rng);
    return next;
}

CMatrix apply_spatial_correlation(const CMatrix& h_w, const CMatrix& r_rx_sqrt, const CMatrix& r_tx_sqrt) {
    if (r_rx_sqrt.rows() != r_rx_sqrt.cols() || r_tx_sqrt.rows() != r_tx_sqrt.cols() ||
        r_rx_sqrt.cols() != h_w.rows() || h_w.cols() != r_tx_sqrt.rows())
        throw DimensionError("spatial correlation factors do not match the channel matrix");
    return r_rx_sqrt * h_w * r_tx_sqrt;
}

ChannelState step_los(const ChannelState& state, const ChannelParams& params, Rng& rng) {
    ChannelState next = state;
    if (params.sigma_phi > 0.0) {
        std::normal_distribution<double> n(0.0, params.sigma_phi);
        next.h_los = state.h_los * std::polar(1.0, n(rng));
    }
    return next;
}

CMatrix compose_rician(const ChannelState& state, int t, const ChannelParams& params,
                       const SpatialFactors& factors) {
    check_dims(state.h_w, params, "h_w");
    check_dims(state.h_los, params, "h_los");
    const double k = params.rician_factor(t);
    const CMatrix nlos = apply_spatial_correlation(state.h_w, factors.rx_sqrt, factors.tx_sqrt);
    if (k == 0.0) return nlos;
    return std::sqrt(k / (k + 1.0)) * state.h_los + std::sqrt(1.0 / (k + 1.0)) * nlos;
}

CMatrix compose_rician(const ChannelState& state, int t, const ChannelParams& params) {
    return compose_rician(state, t, params, SpatialFactors::from(params));
}

CsiObservation observe(const CMatrix& h, double noise_var, Rng& rng, int t) {
    if (!(noise_var >= 0.0)) throw ConfigError("noise variance must be >= 0");
    CsiObservation obs{t, h};
    if (noise_var > 0.0) obs.h_hat += complex_gaussian_matrix(static_cast<int>(h.rows()), static_cast<int>(h.cols()), noise_var, rng);
    return obs;
}

Rng channel_rng(Identity who, std::uint64_t seed) {
    return Rng(derive_seed(seed, who == Identity::Alice ? 0xA11CEu : 0xE7Eu, 0));
}

ChannelState init_channel(const ChannelParams& params, Identity who, std::uint64_t seed) {
    Rng rng = channel_rng(who, seed);
    return init_from_rng(params, rng);
}

ChannelSimulator::ChannelSimulator(ChannelParams params, Identity who, std::uint64_t seed)
    : params_(std::move(params)), rng_(channel_rng(who, seed)) {
    state_ = init_from_rng(params_, rng_);
    factors_ = SpatialFactors::from(params_);
    current_ = compose_rician(state_, 0, params_, factors_);
}

CMatrix ChannelSimulator::advance() {
    state_ = step_whitened(state_, params_, rng_);
    state_ = step_los(state_, params_, rng_);
    state_.t += 1;
    state_.k_now = params_.rician_factor(state_.t);
    current_ = compose_rician(state_, state_.t, params_, factors_);
    return current_;
}

CsiObservation ChannelSimulator::next() {
    advance();
    return observe(current_, params_.noise_var, rng_, state_.t);
}

CsiObservation ChannelSimulator::observe_current(double noise_var, Rng& rng) const {
    return observe(current_, noise_var, rng, state_.t);
}

}  // namespace arpla
