// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "arpla/encoder.hpp"

namespace arpla {

/// Multivariate normal with a cached Cholesky factor of sigma + reg_eps * I.
class GaussianDensity {
  public:
    GaussianDensity() = default;
    explicit GaussianDensity(const EmissionStats& stats);

    double log_pdf(const RVector& z) const;
    double log_det() const { return log_det_; }
    /// (z - mu)^T Sigma^{-1} (z - mu)
    double mahalanobis2(const RVector& z) const;
    int dim() const { return static_cast<int>(mu_.size()); }

  private:
    RVector mu_;
    Eigen::LLT<RMatrix> llt_;
    double log_det_ = 0.0;
};

/// -1/2 [d log 2pi + log|Sigma| + (z-mu)^T Sigma^{-1} (z-mu)] via Cholesky.
/// Throws NumericFault if the regularized covariance is not positive definite.
double gaussian_log_pdf(const Embedding& z, const EmissionStats& stats);

/// log p(z|H0) - log p(z|H1)
double instantaneous_llr(const Embedding& z, const EmissionStats& stats0, const EmissionStats& stats1);

struct DecisionThresholds {
    double gamma0 = -2.9444389791664403;
    double gamma1 = 2.9444389791664403;

    void validate() const;
};

/// Wald's approximations: gamma1 = log((1-b)/a), gamma0 = log(b/(1-a)).
DecisionThresholds wald_thresholds(double alpha_fa, double beta_md);

enum class Verdict { Alice, Eve, Continue };

const char* to_string(Verdict v);

struct Decision {
    Verdict verdict = Verdict::Continue;
    int t = 0;
    double lambda_at_decision = 0.0;
};

/// Three-way rule; ties go to the terminal verdict.
Decision decide(double lambda, int t, const DecisionThresholds& thr);

struct SprtStep {
    double cumulative;
    Decision decision;
};

SprtStep sprt_step(double cum, const Embedding& z, const EmissionStats& stats0, const EmissionStats& stats1,
                   const DecisionThresholds& thr);

struct HmmModel {
    int n_states = 2;
    RVector pi;
    RMatrix a;  // a(i,j) = P(S_t = j | S_{t-1} = i)
    std::vector<EmissionStats> emissions;

    void validate() const;
    /// Indices of the states that belong to Alice: {0} for 2 states, {0,1} for 3.
    bool is_alice_state(int k) const { return k < n_states - 1; }
};

HmmModel default_hmm2(EmissionStats alice, EmissionStats eve);
HmmModel default_hmm3(EmissionStats alice_los, EmissionStats alice_nlos, EmissionStats eve);

struct ForwardState {
    int t = 0;
    RVector log_alpha;  // unnormalized log forward variables
    double lambda = 0.0;

    /// Normalized posterior P(S_t = k | z_1..t).
    RVector posterior() const;
};

/// Ratio at t = 0 (no observations): prior log-odds of Alice.
ForwardState initial_forward_state(const HmmModel& model);

/// One forward step from precomputed emission log-likelihoods.
ForwardState hmm_forward_step(const ForwardState& fwd, const RVector& log_pi, const RMatrix& log_a,
                              const RVector& loglik);

ForwardState hmm_forward_step(const ForwardState& fwd, const HmmModel& model, const Embedding& z);

/// 2 states: log a(0) - log a(1); 3 states: logsumexp(log a(0), log a(1)) - log a(2).
double log_posterior_ratio(const ForwardState& fwd, const HmmModel& model);
double log_posterior_ratio(const RVector& log_alpha);

/// f(x) = log[(a00 s + a10 (1-s)) / (a01 s + a11 (1-s))], s = sigmoid(x),
/// evaluated in the log domain so identity and near-degenerate matrices stay exact.
double transition_warp(double x, const Eigen::Matrix2d& a);

/// Lambda_t = ell_t + transition_warp(Lambda_{t-1}, a).
double recursive_llr_step(double lambda_prev, double ell, const Eigen::Matrix2d& a);

}  // namespace arpla
