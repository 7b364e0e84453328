// SPDX-License-Identifier: Apache-2.0

// Monte Carlo counterparts of the analytic curves: simulate the hidden chain,
// draw Gaussian emissions, run the forward algorithm.

#pragma once

#include <cstdint>
#include <vector>

#include "arpla/analysis.hpp"

namespace arpla {

/// Random means around the origin with |mu_j - mu_k| of order `separation`
/// and one shared SPD covariance (eigenvalues in [0.5, 1.5]).
HmmModel synthetic_equal_cov_model(int n_states, int d, double separation, std::uint64_t seed);

/// Lambda_t and S_t for `trials` independent trajectories of length `horizon`,
/// stored trial-major: lambda[i * horizon + (t - 1)].
struct HmmTrajectories {
    int trials = 0;
    int horizon = 0;
    std::vector<double> lambda;
    std::vector<int> state;

    double lambda_at(int trial, int t) const { return lambda[static_cast<std::size_t>(trial * horizon + t - 1)]; }
    int state_at(int trial, int t) const { return state[static_cast<std::size_t>(trial * horizon + t - 1)]; }
};

HmmTrajectories simulate_hmm(const HmmModel& model, int horizon, int trials, std::uint64_t seed);

/// Empirical P(Lambda_t <= gamma0 | S_t Alice) and P(Lambda_t <= gamma0 | S_t = Eve).
/// With first_passage set, "Lambda_t <= gamma0" becomes "min_{s<=t} Lambda_s <= gamma0".
std::vector<analysis::OperatingPoint> empirical_operating_curve(const HmmTrajectories& traj, const HmmModel& model,
                                                                double gamma0, bool first_passage = false);

}  // namespace arpla
