// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "arpla/common.hpp"

namespace arpla {

enum class Identity { Alice, Eve };

const char* to_string(Identity who);

/// LoS blocked for slots start .. start + length (inclusive on both ends).
struct BlockageInterval {
    int start = 1;
    int length = 0;

    int end() const { return start + length; }
    bool contains(int t) const { return t >= start && t <= end(); }
};

struct ChannelParams {
    int m_t = 4;
    int m_r = 4;
    double rho_t = 0.7;          // temporal correlation of the whitened NLoS state
    double r_tx = 0.5;           // exponential spatial correlation, transmit side
    double r_rx = 0.5;           // exponential spatial correlation, receive side
    double noise_var = 0.31622776601683794;  // 5 dB SNR for unit-power channels
    double k0 = 10.0;            // nominal Rician factor
    double sigma_phi = 0.0;      // LoS phase drift std dev per slot [rad]
    double los_departure = 0.0;  // [rad]
    double los_arrival = 0.0;    // [rad]
    std::vector<BlockageInterval> blockage;

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    /// Sorted, merged copy of the blockage list.
    std::vector<BlockageInterval> normalized_blockage() const;

    bool blocked(int t) const;

    /// K_Rician(t): 0 inside a blockage interval, k0 otherwise.
    double rician_factor(int t) const { return blocked(t) ? 0.0 : k0; }
};

/// Spoofer geometry: same dynamics and correlation as Alice, LoS angles rotated
/// by `angle_offset` radians.
ChannelParams make_eve_params(const ChannelParams& alice, double angle_offset);

struct ChannelState {
    int t = 0;
    CMatrix h_w;    // whitened NLoS state, m_r x m_t
    CMatrix h_los;  // LoS component, ||h_los||_F^2 = m_t * m_r
    double k_now = 0.0;
};

struct CsiObservation {
    int t = 0;
    CMatrix h_hat;
};

/// Hermitian square roots of R_r and R_t, computed once per parameter set.
struct SpatialFactors {
    CMatrix rx_sqrt;
    CMatrix tx_sqrt;

    static SpatialFactors from(const ChannelParams& params);
};

/// Entry (i,j) = r^|i-j|. Rejects r outside [0,1) and n < 1.
CMatrix exp_correlation_matrix(int n, double r);

/// Principal square root of a Hermitian positive semi-definite matrix.
CMatrix hermitian_sqrt(const CMatrix& m);

/// Half-wavelength ULA steering vector, entry n = exp(j*pi*n*sin(theta)).
Eigen::VectorXcd steering_vector(int n, double theta);

ChannelState step_whitened(const ChannelState& state, const ChannelParams& params, Rng& rng);

CMatrix apply_spatial_correlation(const CMatrix& h_w, const CMatrix& r_rx_sqrt, const CMatrix& r_tx_sqrt);

ChannelState step_los(const ChannelState& state, const ChannelParams& params, Rng& rng);

/// sqrt(K/(K+1)) h_los + sqrt(1/(K+1)) R_r^1/2 h_w R_t^1/2 with K = K_Rician(t).
CMatrix compose_rician(const ChannelState& state, int t, const ChannelParams& params,
                       const SpatialFactors& factors);
CMatrix compose_rician(const ChannelState& state, int t, const ChannelParams& params);

CsiObservation observe(const CMatrix& h, double noise_var, Rng& rng, int t = 0);

/// State at t = 0: h_w from the stationary law, h_los from the LoS geometry.
ChannelState init_channel(const ChannelParams& params, Identity who, std::uint64_t seed);

/// Seeded RNG matching init_channel's stream for (who, seed).
Rng channel_rng(Identity who, std::uint64_t seed);

/// One transmitter-to-Bob link: owns the state, cached spatial factors and the
/// random stream.
class ChannelSimulator {
  public:
    ChannelSimulator(ChannelParams params, Identity who, std::uint64_t seed);

    /// Advance one slot and return the noiseless channel H(t).
    CMatrix advance();

    /// Advance one slot and return Bob's noisy observation.
    CsiObservation next();

    /// Noisy observation of the current H(t) with a caller-chosen noise level
    /// (used by an eavesdropper).
    CsiObservation observe_current(double noise_var, Rng& rng) const;

    const ChannelState& state() const { return state_; }
    const ChannelParams& params() const { return params_; }
    const CMatrix& current() const { return current_; }
    bool blocked() const { return params_.blocked(state_.t); }

  private:
    ChannelParams params_;
    SpatialFactors factors_;
    ChannelState state_;
    Rng rng_;
    CMatrix current_;
};

}  // namespace arpla
