// SPDX-License-Identifier: Apache-2.0

#include "arpla/auth.hpp"

#include <cmath>
#include <string>

namespace arpla {

GaussianDensity::GaussianDensity(const EmissionStats& stats) : mu_(stats.mu) {
    if (stats.sigma.rows() != stats.mu.size() || stats.sigma.cols() != stats.mu.size())
        throw DimensionError("emission covariance shape does not match its mean");
    llt_.compute(stats.regularized());
    if (llt_.info() != Eigen::Success) throw NumericFault("emission covariance is not positive definite");
    const RVector diag = llt_.matrixL().toDenseMatrix().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite())
        throw NumericFault("emission covariance is not positive definite");
    log_det_ = 2.0 * diag.array().log().sum();
}

double GaussianDensity::mahalanobis2(const RVector& z) const {
    if (z.size() != mu_.size()) throw DimensionError("embedding and emission dimensions differ");
    const RVector y = llt_.matrixL().solve(z - mu_);
    return y.squaredNorm();
}

double GaussianDensity::log_pdf(const RVector& z) const {
    const double d = static_cast<double>(mu_.size());
    return -0.5 * (d * std::log(2.0 * kPi) + log_det_ + mahalanobis2(z));
}

double gaussian_log_pdf(const Embedding& z, const EmissionStats& stats) { return GaussianDensity(stats).log_pdf(z.z); }

double instantaneous_llr(const Embedding& z, const EmissionStats& stats0, const EmissionStats& stats1) {
    return gaussian_log_pdf(z, stats0) - gaussian_log_pdf(z, stats1);
}

void DecisionThresholds::validate() const {
    if (!(gamma0 < 0.0 && 0.0 < gamma1)) throw ConfigError("thresholds must satisfy gamma0 < 0 < gamma1");
}

DecisionThresholds wald_thresholds(double alpha_fa, double beta_md) {
    if (!(alpha_fa > 0.0 && alpha_fa < 0.5) || !(beta_md > 0.0 && beta_md < 0.5))
        throw ConfigError("Wald targets must lie in (0, 0.5)");
    return {std::log(beta_md / (1.0 - alpha_fa)), std::log((1.0 - beta_md) / alpha_fa)};
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Alice: return "alice";
        case Verdict::Eve: return "eve";
        case Verdict::Continue: break;
    }
    return "continue";
}

Decision decide(double lambda, int t, const DecisionThresholds& thr) {
    Verdict v = Verdict::Continue;
    if (lambda >= thr.gamma1)
        v = Verdict::Alice;
    else if (lambda <= thr.gamma0)
        v = Verdict::Eve;
    return {v, t, lambda};
}

SprtStep sprt_step(double cum, const Embedding& z, const EmissionStats& stats0, const EmissionStats& stats1,
                   const DecisionThresholds& thr) {
    const double next = cum + instantaneous_llr(z, stats0, stats1);
    return {next, decide(next, z.t, thr)};
}

void HmmModel::validate() const {
    if (n_states != 2 && n_states != 3) throw ConfigError("HMM must have 2 or 3 states");
    if (pi.size() != n_states || a.rows() != n_states || a.cols() != n_states ||
        static_cast<int>(emissions.size()) != n_states)
        throw ConfigError("HMM shapes disagree with n_states");
    if ((pi.array() < 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-12) throw ConfigError("pi must be a distribution");
    for (int i = 0; i < n_states; ++i)
        if ((a.row(i).array() < 0.0).any() || std::abs(a.row(i).sum() - 1.0) > 1e-12)
            throw ConfigError("transition matrix rows must sum to 1");
    const auto d = emissions.front().mu.size();
    for (const auto& e : emissions)
        if (e.mu.size() != d) throw ConfigError("emission dimensions differ between states");
}

HmmModel default_hmm2(EmissionStats alice, EmissionStats eve) {
    HmmModel m;
    m.n_states = 2;
    m.pi = Eigen::Vector2d(0.7, 0.3);
    m.a.resize(2, 2);
    m.a << 0.95, 0.05, 0.05, 0.95;
    alice.state_label = 0;
    eve.state_label = 1;
    m.emissions = {std::move(alice), std::move(eve)};
    return m;
}

HmmModel default_hmm3(EmissionStats alice_los, EmissionStats alice_nlos, EmissionStats eve) {
    HmmModel m;
    m.n_states = 3;
    m.pi = Eigen::Vector3d(0.45, 0.45, 0.1);
    m.a.resize(3, 3);
    m.a << 0.93, 0.05, 0.02, 0.10, 0.88, 0.02, 0.02, 0.02, 0.96;
    alice_los.state_label = 0;
    alice_nlos.state_label = 1;
    eve.state_label = 2;
    m.emissions = {std::move(alice_los), std::move(alice_nlos), std::move(eve)};
    return m;
}

RVector ForwardState::posterior() const {
    const double norm = log_sum_exp(log_alpha);
    return (log_alpha.array() - norm).exp();
}

double log_posterior_ratio(const RVector& log_alpha) {
    if (log_alpha.size() == 2) return log_alpha(0) - log_alpha(1);
    if (log_alpha.size() == 3) return log_sum_exp(log_alpha(0), log_alpha(1)) - log_alpha(2);
    throw DimensionError("log-posterior ratio needs 2 or 3 states");
}

double log_posterior_ratio(const ForwardState& fwd, const HmmModel& model) {
    if (fwd.log_alpha.size() != model.n_states) throw DimensionError("forward state does not match model");
    return log_posterior_ratio(fwd.log_alpha);
}

ForwardState initial_forward_state(const HmmModel& model) {
    ForwardState f;
    f.t = 0;
    f.log_alpha = model.pi.unaryExpr([](double p) { return safe_log(p); });
    f.lambda = log_posterior_ratio(f.log_alpha);
    return f;
}

ForwardState hmm_forward_step(const ForwardState& fwd, const RVector& log_pi, const RMatrix& log_a,
                              const RVector& loglik) {
    const auto n = loglik.size();
    if (log_pi.size() != n || log_a.rows() != n || log_a.cols() != n)
        throw DimensionError("forward step shapes disagree");
    ForwardState next;
    next.t = fwd.t + 1;
    next.log_alpha.resize(n);
    if (fwd.t == 0) {
        next.log_alpha = log_pi + loglik;
    } else {
        if (fwd.log_alpha.size() != n) throw DimensionError("forward state does not match model");
        // keep the carried vector normalized so magnitudes stay bounded
        const double norm = log_sum_exp(fwd.log_alpha);
        RVector terms(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index j = 0; j < n; ++j) terms(j) = fwd.log_alpha(j) - norm + log_a(j, k);
            next.log_alpha(k) = loglik(k) + log_sum_exp(terms);
        }
    }
    if (next.log_alpha.maxCoeff() == kNegInf || next.log_alpha.hasNaN())
        throw NumericFault("forward variables vanished at t=" + std::to_string(next.t));
    next.lambda = log_posterior_ratio(next.log_alpha);
    return next;
}

ForwardState hmm_forward_step(const ForwardState& fwd, const HmmModel& model, const Embedding& z) {
    RVector loglik(model.n_states);
    for (int k = 0; k < model.n_states; ++k) loglik(k) = gaussian_log_pdf(z, model.emissions[static_cast<std::size_t>(k)]);
    const RVector log_pi = model.pi.unaryExpr([](double p) { return safe_log(p); });
    const RMatrix log_a = model.a.unaryExpr([](double p) { return safe_log(p); });
    return hmm_forward_step(fwd, log_pi, log_a, loglik);
}

double transition_warp(double x, const Eigen::Matrix2d& a) {
    const double ls = log_sigmoid(x);
    const double lc = log_sigmoid(-x);
    const double num = log_sum_exp(safe_log(a(0, 0)) + ls, safe_log(a(1, 0)) + lc);
    const double den = log_sum_exp(safe_log(a(0, 1)) + ls, safe_log(a(1, 1)) + lc);
    return num - den;
}

double recursive_llr_step(double lambda_prev, double ell, const Eigen::Matrix2d& a) {
    return ell + transition_warp(lambda_prev, a);
}

}  // namespace arpla
