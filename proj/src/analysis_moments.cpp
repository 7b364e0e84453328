// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "arpla/analysis.hpp"

namespace arpla::analysis {

namespace {

void check_square(const RMatrix& m, Eigen::Index d, const char* what) {
    if (m.rows() != d || m.cols() != d) throw DimensionError(std::string(what) + " has the wrong shape");
}

}  // namespace

QuadFormMoments quad_form_moments(const RMatrix& a_mat, const RVector& mu_a, const RVector& mu_b,
                                  const RMatrix& sigma_b) {
    const auto d = mu_a.size();
    if (mu_b.size() != d) throw DimensionError("quad_form_moments: mean vectors differ in length");
    check_square(a_mat, d, "A");
    check_square(sigma_b, d, "Sigma_B");
    const RVector delta = mu_b - mu_a;
    const RMatrix as = a_mat * sigma_b;
    QuadFormMoments m;
    m.mean = as.trace() + delta.dot(a_mat * delta);
    m.variance = 2.0 * (as * as).trace() + 4.0 * delta.dot(as * a_mat * delta);
    return m;
}

double quad_form_covariance(const RMatrix& a_mat, const RVector& mu_a, const RMatrix& b_mat, const RVector& mu_b,
                            const RVector& mu, const RMatrix& sigma) {
    const auto d = mu.size();
    check_square(a_mat, d, "A");
    check_square(b_mat, d, "B");
    check_square(sigma, d, "Sigma");
    // z = mu + x:  Q_A = x'Ax + 2 x'A(mu - mu_a) + const
    const RVector da = mu - mu_a;
    const RVector db = mu - mu_b;
    return 2.0 * (a_mat * sigma * b_mat * sigma).trace() + 4.0 * da.dot(a_mat * sigma * b_mat * db);
}

LlrMoments llr_moments(const EmissionStats& stats0, const EmissionStats& stats1, int under_state) {
    if (under_state != 0 && under_state != 1) throw ConfigError("under_state must be 0 or 1");
    if (stats0.mu.size() != stats1.mu.size()) throw DimensionError("llr_moments: dimensions differ");
    const RMatrix s0 = stats0.regularized();
    const RMatrix s1 = stats1.regularized();
    Eigen::LLT<RMatrix> l0(s0), l1(s1);
    if (l0.info() != Eigen::Success || l1.info() != Eigen::Success)
        throw NumericFault("llr_moments: covariance not positive definite");
    const auto d = stats0.mu.size();
    const RMatrix p0 = l0.solve(RMatrix::Identity(d, d));
    const RMatrix p1 = l1.solve(RMatrix::Identity(d, d));
    const double logdet0 = 2.0 * RVector(l0.matrixL().toDenseMatrix().diagonal()).array().log().sum();
    const double logdet1 = 2.0 * RVector(l1.matrixL().toDenseMatrix().diagonal()).array().log().sum();

    const RVector& mu = under_state == 0 ? stats0.mu : stats1.mu;
    const RMatrix& sigma = under_state == 0 ? s0 : s1;
    // ell = 1/2 [logdet1 - logdet0 - Q0 + Q1]
    const auto q0 = quad_form_moments(p0, stats0.mu, mu, sigma);
    const auto q1 = quad_form_moments(p1, stats1.mu, mu, sigma);
    const double c01 = quad_form_covariance(p0, stats0.mu, p1, stats1.mu, mu, sigma);
    LlrMoments m;
    m.mean = 0.5 * (logdet1 - logdet0 - q0.mean + q1.mean);
    m.variance = std::max(0.0, 0.25 * (q0.variance + q1.variance - 2.0 * c01));
    return m;
}

AffineLlrParams affine_llr_params(const RVector& mu0, const RVector& mu1, const RMatrix& sigma) {
    const auto d = mu0.size();
    if (mu1.size() != d) throw DimensionError("affine_llr_params: mean vectors differ in length");
    check_square(sigma, d, "Sigma");
    Eigen::LLT<RMatrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw NumericFault("affine_llr_params: singular covariance");
    AffineLlrParams p;
    const RVector p_mu0 = llt.solve(mu0);
    const RVector p_mu1 = llt.solve(mu1);
    p.w = p_mu0 - p_mu1;
    p.kappa = 0.5 * (mu1.dot(p_mu1) - mu0.dot(p_mu0));
    p.m0 = p.w.dot(mu0) + p.kappa;
    p.m1 = p.w.dot(mu1) + p.kappa;
    p.v = p.w.dot(sigma * p.w);
    return p;
}

AffineLlrParams affine_llr_params(const HmmModel& model) {
    if (model.n_states != 2 || model.emissions.size() != 2) throw ConfigError("affine form needs a 2-state model");
    const RMatrix s0 = model.emissions[0].regularized();
    const RMatrix s1 = model.emissions[1].regularized();
    const double scale = std::max(1.0, s0.cwiseAbs().maxCoeff());
    if ((s0 - s1).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw ConfigError("affine LLR regime requires equal emission covariances");
    return affine_llr_params(model.emissions[0].mu, model.emissions[1].mu, s0);
}

Eigen::Vector2d stationary_distribution(const Eigen::Matrix2d& a) {
    const double out0 = a(0, 1);
    const double out1 = a(1, 0);
    if (out0 + out1 <= 0.0) return {0.5, 0.5};  // reducible; no unique law, report the symmetric one
    return {out1 / (out0 + out1), out0 / (out0 + out1)};
}

Ar1SteadyState ar1_steady_state(const Eigen::Matrix2d& a, const AffineLlrParams& affine) {
    Ar1SteadyState s;
    const Eigen::Vector2d rho = stationary_distribution(a);
    s.mean_ell = rho(0) * affine.m0 + rho(1) * affine.m1;
    s.var_ell = affine.v + rho(0) * affine.m0 * affine.m0 + rho(1) * affine.m1 * affine.m1 - s.mean_ell * s.mean_ell;

    // f'(x) = s(1-s) [(a00 - a10)/N - (a01 - a11)/D]
    const auto slope = [&](double x) {
        const double sg = sigmoid(x);
        const double num = a(0, 0) * sg + a(1, 0) * (1.0 - sg);
        const double den = a(0, 1) * sg + a(1, 1) * (1.0 - sg);
        return sg * (1.0 - sg) * ((a(0, 0) - a(1, 0)) / num - (a(0, 1) - a(1, 1)) / den);
    };

    // mu = mean_ell + f(mu); f is monotone with slope < 1 on the contractive branch
    double mu = s.mean_ell;
    bool converged = false;
    for (int it = 0; it < 10000; ++it) {
        const double next = s.mean_ell + transition_warp(mu, a);
        if (std::abs(next - mu) < 1e-13 * std::max(1.0, std::abs(mu))) {
            mu = next;
            converged = true;
            break;
        }
        mu = next;
        if (!std::isfinite(mu)) break;
    }
    s.c1 = std::isfinite(mu) ? slope(mu) : 1.0;
    if (!converged || std::abs(s.c1) >= 1.0 - 1e-12)
        throw NumericFault("AR(1) linearization is not contractive (|c1| >= 1)");
    s.c0 = transition_warp(mu, a) - s.c1 * mu;
    s.mu_lambda = (s.mean_ell + s.c0) / (1.0 - s.c1);
    s.var_lambda = s.var_ell / (1.0 - s.c1 * s.c1);
    return s;
}

}  // namespace arpla::analysis
