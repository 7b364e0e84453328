// SPDX-License-Identifier: Apache-2.0

// Closed-form and quadrature characterizations of the sequential statistics:
// moments of Gaussian quadratic forms and LLRs, the equal-covariance affine
// LLR, the 2-state PDF/CDF recursion and its AR(1) steady state, and the
// 3-state bivariate representation with its region CDF, delta-method moments
// and P_FA/P_D propagation.

#pragma once

#include <array>
#include <vector>

#include "arpla/auth.hpp"

namespace arpla::analysis {

using arpla::transition_warp;

// ---------------------------------------------------------------------------
// Moments

struct QuadFormMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Moments of Q(z) = (z - mu_a)^T A (z - mu_a) for z ~ N(mu_b, sigma_b), A symmetric.
QuadFormMoments quad_form_moments(const RMatrix& a_mat, const RVector& mu_a, const RVector& mu_b,
                                  const RMatrix& sigma_b);

/// Cov(Q_A, Q_B) for two quadratic forms of the same z ~ N(mu, sigma).
double quad_form_covariance(const RMatrix& a_mat, const RVector& mu_a, const RMatrix& b_mat, const RVector& mu_b,
                            const RVector& mu, const RMatrix& sigma);

struct LlrMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean/variance of ell = log p0(z) - log p1(z) for z ~ N(mu_k, Sigma_k), k = under_state.
/// Covariances are taken regularized, matching gaussian_log_pdf.
LlrMoments llr_moments(const EmissionStats& stats0, const EmissionStats& stats1, int under_state);

// ---------------------------------------------------------------------------
// Equal covariances, two states

struct AffineLlrParams {
    RVector w;          // Sigma^{-1} (mu0 - mu1)
    double kappa = 0.0; // (mu1' S^-1 mu1 - mu0' S^-1 mu0) / 2
    double m0 = 0.0;    // E[ell | S = 0]
    double m1 = 0.0;    // E[ell | S = 1]
    double v = 0.0;     // Var[ell | S = k]
};

/// w' z + kappa == log p0(z) - log p1(z) identically. Throws NumericFault on singular sigma.
AffineLlrParams affine_llr_params(const RVector& mu0, const RVector& mu1, const RMatrix& sigma);

/// Affine parameters of a 2-state model whose emissions share one covariance.
AffineLlrParams affine_llr_params(const HmmModel& model);

struct Ar1SteadyState {
    double c0 = 0.0;
    double c1 = 0.0;
    double mu_lambda = 0.0;
    double var_lambda = 0.0;
    double mean_ell = 0.0;  // stationary mixture mean of ell
    double var_ell = 0.0;   // stationary mixture variance of ell
};

/// Stationary distribution of a 2x2 row-stochastic matrix.
Eigen::Vector2d stationary_distribution(const Eigen::Matrix2d& a);

/// Linearizes f around the self-consistent mean mu = mean_ell + f(mu).
/// Throws NumericFault when |c1| >= 1 (no stationary law).
Ar1SteadyState ar1_steady_state(const Eigen::Matrix2d& a, const AffineLlrParams& affine);

struct GridOptions {
    int points = 2048;
    double span_sigmas = 8.0;
    double leak_tolerance = 1e-2;  // raw mass deficit that counts as grid failure
};

/// Joint densities q_t^(k)(y) = P(Lambda_t in dy, S_t = k)/dy on a shared grid.
struct GridDensity {
    int t = 0;
    RVector grid;
    RVector weights;                 // trapezoid weights
    std::array<RVector, 2> values;   // per-state joint densities
    Eigen::Vector2d mass;            // state probabilities after renormalization
    double raw_mass_deficit = 0.0;   // max |raw - expected| / expected before renormalization
};

struct OperatingPoint {
    int t = 0;
    double p_fa = 0.0;
    double p_d = 0.0;
};

/// Quadrature evaluation of the 2-state PDF/CDF recursion (equal covariances).
class TwoStateRecursion {
  public:
    TwoStateRecursion(const Eigen::Vector2d& pi, const Eigen::Matrix2d& a, const AffineLlrParams& affine, int horizon,
                      GridOptions options = {});

    int horizon() const { return horizon_; }
    const GridDensity& density(int t) const { return densities_.at(static_cast<std::size_t>(t - 1)); }

    /// Conditional CDF F_t^(k)(gamma) = P(Lambda_t <= gamma | S_t = k).
    double cdf(int t, int k, double gamma) const;

    /// P_FA(t) = F_t^(0)(gamma0), P_D(t) = F_t^(1)(gamma0).
    std::vector<OperatingPoint> operating_curve(double gamma0) const;

    double max_raw_mass_deficit() const;

  private:
    Eigen::Vector2d pi_;
    Eigen::Matrix2d a_;
    AffineLlrParams aff_;
    int horizon_;
    GridOptions opt_;
    RVector warp_;  // f(grid)
    std::vector<GridDensity> densities_;
};

struct Recursion2StateResult {
    std::vector<GridDensity> densities;
    std::vector<OperatingPoint> curve;
};

/// Wrapper over TwoStateRecursion for a 2-state model with shared covariance.
Recursion2StateResult pdf_cdf_recursion_2state(const HmmModel& model, const DecisionThresholds& thresholds,
                                               int horizon, GridOptions options = {});

// ---------------------------------------------------------------------------
// Three states (0 Alice LoS, 1 Alice NLoS, 2 Eve), equal covariances

struct BivariateLlrParams {
    std::array<Eigen::Vector2d, 3> m_by_state;  // E[(ell02, ell12) | S = s]
    Eigen::Matrix2d v;                          // Cov[(ell02, ell12)]
    Eigen::Vector3d t_weights;                  // T_k = sum_j a_jk u_prev(j)
    std::array<RVector, 2> w;                   // w_02, w_12
    std::array<double, 2> kappa{};              // kappa_02, kappa_12
};

Eigen::Vector3d transition_weighted_prior(const Eigen::Vector3d& u_prev, const Eigen::Matrix3d& a);

BivariateLlrParams bivariate_llr_params(const RVector& mu0, const RVector& mu1, const RVector& mu2,
                                        const RMatrix& sigma, const Eigen::Vector3d& u_prev,
                                        const Eigen::Matrix3d& a);

struct Lambda3 {
    double value = 0.0;
    bool unbounded = false;  // T2 == 0: statistic is +infinity
};

/// log(T0 e^ell02 + T1 e^ell12) - log T2, log-sum-exp stabilized.
Lambda3 lambda_3state(double ell02, double ell12, const Eigen::Vector3d& t_weights);

/// P[T0 e^X + T1 e^Y <= e^gamma T2] for (X, Y) ~ N(mean, v).
double region_cdf(double gamma, const Eigen::Vector3d& t_weights, const Eigen::Vector2d& mean,
                  const Eigen::Matrix2d& v);

double region_cdf_3state(double gamma, const BivariateLlrParams& params, int s);

struct DeltaMoments {
    double mean = 0.0;
    double variance = 0.0;
};

DeltaMoments delta_method_moments(const BivariateLlrParams& params, int s);

struct UGridOptions {
    int cells = 400;            // cells over the Alice-mass log-odds axis
    double lambda_span = 40.0;  // axis covers [-span, span]
    int hermite_nodes = 16;     // per dimension, for propagating the summary
    bool check_refinement = false;
    double refinement_tolerance = 5e-3;
};

struct ThreeStateCurve {
    std::vector<OperatingPoint> points;
    std::vector<Eigen::Vector3d> state_marginals;  // rho_t
    std::vector<Eigen::Vector3d> conditional_cdf;  // F_t^(s)(gamma0)
};

/// P_FA(t), P_D(t) for t = 1..horizon by grid averaging over the law of the
/// previous posterior, summarized by its Alice log-odds plus the mean
/// within-Alice split per grid cell.
ThreeStateCurve pfa_pd_3state(double gamma0, const HmmModel& model, int horizon, UGridOptions options = {});

}  // namespace arpla::analysis
