// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "arpla/analysis.hpp"

namespace arpla::analysis {

namespace {

double cdf_1d(double bound, double mean, double var) {
    if (var <= 0.0) return mean <= bound ? 1.0 : 0.0;
    return normal_cdf((bound - mean) / std::sqrt(var));
}

/// Root of a monotone function on a bracket [lo, hi] with sign change.
template <typename F>
double bisect(F&& h, double lo, double hi) {
    double h_lo = h(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if ((hm <= 0.0) == (h_lo <= 0.0)) {
            lo = mid;
            h_lo = hm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Region probability when (X, Y) lives on a line: (X, Y) = mean + u * xi, xi ~ N(0,1).
double region_cdf_rank1(double c, const Eigen::Vector3d& tw, const Eigen::Vector2d& mean, const Eigen::Vector2d& u) {
    const double l0 = std::log(tw(0)) + mean(0);
    const double l1 = std::log(tw(1)) + mean(1);
    // h is convex in xi; the region is the sublevel set {h <= 0}
    const auto h = [&](double xi) { return log_sum_exp(l0 + u(0) * xi, l1 + u(1) * xi) - c; };
    constexpr double kFar = 40.0;  // N(0,1) mass beyond this is irrelevant
    if (u(0) * u(1) < 0.0) {
        double xi_min = (std::log(-tw(1) * u(1) / (tw(0) * u(0))) + mean(1) - mean(0)) / (u(0) - u(1));
        xi_min = std::clamp(xi_min, -kFar, kFar);
        if (h(xi_min) > 0.0) return 0.0;
        const double left = h(-kFar) <= 0.0 ? -kFar : bisect(h, -kFar, xi_min);
        const double right = h(kFar) <= 0.0 ? kFar : bisect(h, xi_min, kFar);
        return std::max(0.0, normal_cdf(right) - normal_cdf(left));
    }
    const bool increasing = u(0) + u(1) > 0.0;
    const double hl = h(-kFar), hr = h(kFar);
    if (hl <= 0.0 && hr <= 0.0) return 1.0;
    if (hl > 0.0 && hr > 0.0) return 0.0;
    const double root = bisect(h, -kFar, kFar);
    return increasing ? normal_cdf(root) : 1.0 - normal_cdf(root);
}

struct HermiteRule {
    RVector nodes;    // standard normal abscissae
    RVector weights;  // sum to 1
};

/// Golub-Welsch for the probabilists' Hermite weight.
HermiteRule hermite_rule(int n) {
    RMatrix jacobi = RMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<RMatrix> es(jacobi);
    HermiteRule r;
    r.nodes = es.eigenvalues();
    r.weights = es.eigenvectors().row(0).transpose().array().square();
    r.weights /= r.weights.sum();
    return r;
}

/// Symmetric square root factor L with L L^T = V (V PSD).
Eigen::Matrix2d psd_factor(const Eigen::Matrix2d& v) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(v);
    const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

void check_psd(const Eigen::Matrix2d& v) {
    const double scale = std::max({1e-300, std::abs(v(0, 0)), std::abs(v(1, 1))});
    if (v(0, 0) < -1e-12 * scale || v(1, 1) < -1e-12 * scale ||
        v(0, 0) * v(1, 1) - v(0, 1) * v(1, 0) < -1e-10 * scale * scale || std::abs(v(0, 1) - v(1, 0)) > 1e-9 * scale)
        throw NumericFault("bivariate LLR covariance is not positive semi-definite");
}

}  // namespace

Eigen::Vector3d transition_weighted_prior(const Eigen::Vector3d& u_prev, const Eigen::Matrix3d& a) {
    return a.transpose() * u_prev;
}

BivariateLlrParams bivariate_llr_params(const RVector& mu0, const RVector& mu1, const RVector& mu2,
                                        const RMatrix& sigma, const Eigen::Vector3d& u_prev,
                                        const Eigen::Matrix3d& a) {
    const auto d = mu0.size();
    if (mu1.size() != d || mu2.size() != d || sigma.rows() != d || sigma.cols() != d)
        throw DimensionError("bivariate_llr_params: shapes disagree");
    if ((u_prev.array() < 0.0).any() || std::abs(u_prev.sum() - 1.0) > 1e-9)
        throw ConfigError("u_prev must be a distribution");
    const AffineLlrParams p02 = affine_llr_params(mu0, mu2, sigma);
    const AffineLlrParams p12 = affine_llr_params(mu1, mu2, sigma);
    BivariateLlrParams b;
    b.w = {p02.w, p12.w};
    b.kappa = {p02.kappa, p12.kappa};
    const std::array<const RVector*, 3> mus{&mu0, &mu1, &mu2};
    for (std::size_t s = 0; s < 3; ++s)
        b.m_by_state[s] = {p02.w.dot(*mus[s]) + p02.kappa, p12.w.dot(*mus[s]) + p12.kappa};
    const RVector sw02 = sigma * p02.w;
    const RVector sw12 = sigma * p12.w;
    b.v << p02.w.dot(sw02), p02.w.dot(sw12), p12.w.dot(sw02), p12.w.dot(sw12);
    b.t_weights = transition_weighted_prior(u_prev, a);
    return b;
}

Lambda3 lambda_3state(double ell02, double ell12, const Eigen::Vector3d& t_weights) {
    if (t_weights(2) <= 0.0) return {kPosInf, true};
    const double lse = log_sum_exp(safe_log(t_weights(0)) + ell02, safe_log(t_weights(1)) + ell12);
    return {lse - std::log(t_weights(2)), false};
}

double region_cdf(double gamma, const Eigen::Vector3d& tw, const Eigen::Vector2d& mean, const Eigen::Matrix2d& v) {
    check_psd(v);
    if (gamma == kPosInf) return 1.0;
    if (gamma == kNegInf) return 0.0;
    if (tw(2) <= 0.0) return 0.0;                   // statistic is +infinity
    if (tw(0) <= 0.0 && tw(1) <= 0.0) return 1.0;   // statistic is -infinity
    const double c = gamma + std::log(tw(2));
    if (tw(1) <= 0.0) return cdf_1d(c - std::log(tw(0)), mean(0), v(0, 0));
    if (tw(0) <= 0.0) return cdf_1d(c - std::log(tw(1)), mean(1), v(1, 1));

    const double det = v(0, 0) * v(1, 1) - v(0, 1) * v(0, 1);
    const double scale = std::max(v(0, 0) * v(1, 1), 1e-300);
    if (v(0, 0) <= 0.0 || det <= 1e-12 * scale) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(v);
        const double lam = std::max(0.0, es.eigenvalues()(1));
        if (lam <= 0.0) return lambda_3state(mean(0), mean(1), tw).value <= gamma ? 1.0 : 0.0;
        return region_cdf_rank1(c, tw, mean, std::sqrt(lam) * es.eigenvectors().col(1));
    }

    const double sx = std::sqrt(v(0, 0));
    const double slope = v(0, 1) / v(0, 0);
    const double s_cond = std::sqrt(det / v(0, 0));
    const double x_max = c - std::log(tw(0));  // beyond this even Y = -inf violates the bound
    const double y_off = c - std::log(tw(1));
    const double lo = mean(0) - 12.0 * sx;
    const double hi = std::min(mean(0) + 12.0 * sx, x_max);
    if (hi <= lo) return 0.0;
    const auto integrand = [&](double x) {
        if (x >= x_max) return 0.0;
        const double y_b = y_off + std::log(-std::expm1(x - x_max));
        const double inner = normal_cdf((y_b - mean(1) - slope * (x - mean(0))) / s_cond);
        return normal_pdf((x - mean(0)) / sx) / sx * inner;
    };
    using boost::math::quadrature::gauss_kronrod;
    const double p = gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-12);
    return std::clamp(p, 0.0, 1.0);
}

double region_cdf_3state(double gamma, const BivariateLlrParams& params, int s) {
    if (s < 0 || s > 2) throw ConfigError("conditioning state must be 0, 1 or 2");
    return region_cdf(gamma, params.t_weights, params.m_by_state[static_cast<std::size_t>(s)], params.v);
}

DeltaMoments delta_method_moments(const BivariateLlrParams& params, int s) {
    if (s < 0 || s > 2) throw ConfigError("conditioning state must be 0, 1 or 2");
    const Eigen::Vector2d& m = params.m_by_state[static_cast<std::size_t>(s)];
    const auto& tw = params.t_weights;
    if (tw(2) <= 0.0) return {kPosInf, 0.0};
    const double a = safe_log(tw(0)) + m(0);
    const double b = safe_log(tw(1)) + m(1);
    const double lse = log_sum_exp(a, b);
    // gradient (T0 e^x / S, T1 e^y / S); Hessian (T0 T1 e^{x+y} / S^2) [[1,-1],[-1,1]]
    const Eigen::Vector2d grad(std::exp(a - lse), std::exp(b - lse));
    const double curv = grad(0) * grad(1);
    const auto& v = params.v;
    DeltaMoments out;
    out.mean = lse - std::log(tw(2)) + 0.5 * curv * (v(0, 0) - v(0, 1) - v(1, 0) + v(1, 1));
    out.variance = grad.dot(v * grad);
    return out;
}

namespace {

ThreeStateCurve propagate(double gamma0, const HmmModel& model, int horizon, const UGridOptions& opt) {
    const int n = opt.cells;
    const double span = opt.lambda_span;
    const double step = 2.0 * span / n;
    const Eigen::Matrix3d a = model.a;
    const Eigen::Vector3d pi = model.pi;
    const RMatrix sigma = model.emissions[0].regularized();
    const BivariateLlrParams base = bivariate_llr_params(model.emissions[0].mu, model.emissions[1].mu,
                                                         model.emissions[2].mu, sigma, pi, a);
    const Eigen::Matrix2d factor = psd_factor(base.v);
    const HermiteRule gh = hermite_rule(opt.hermite_nodes);

    // per source state: probability mass and mass-weighted within-Alice split per cell
    using Field = std::array<RVector, 3>;
    const auto zero_field = [&] {
        Field f;
        for (auto& x : f) x = RVector::Zero(n);
        return f;
    };
    Field mass = zero_field(), split = zero_field();

    const auto center = [&](int i) { return -span + (i + 0.5) * step; };
    const auto deposit = [&](Field& m, Field& q, int s, double lam, double qv, double w) {
        double p = (lam + span) / step - 0.5;
        p = std::clamp(p, 0.0, static_cast<double>(n - 1));
        const int i0 = std::min(static_cast<int>(p), n - 2);
        const double frac = p - i0;
        const auto su = static_cast<std::size_t>(s);
        m[su](i0) += w * (1.0 - frac);
        m[su](i0 + 1) += w * frac;
        q[su](i0) += w * (1.0 - frac) * qv;
        q[su](i0 + 1) += w * frac * qv;
    };
    // push one (T, S_t = s, weight) source through the bivariate law of (ell02, ell12)
    const auto spread = [&](Field& m, Field& q, const Eigen::Vector3d& tw, int s, double w) {
        const Eigen::Vector2d& mean = base.m_by_state[static_cast<std::size_t>(s)];
        const double lt0 = safe_log(tw(0)), lt1 = safe_log(tw(1)), lt2 = safe_log(tw(2));
        for (int i = 0; i < gh.nodes.size(); ++i)
            for (int j = 0; j < gh.nodes.size(); ++j) {
                const Eigen::Vector2d ell = mean + factor * Eigen::Vector2d(gh.nodes(i), gh.nodes(j));
                const double x = lt0 + ell(0), y = lt1 + ell(1);
                const double lam = log_sum_exp(x, y) - lt2;
                double qv = 0.5;
                if (x != kNegInf || y != kNegInf) qv = sigmoid(x - y);
                deposit(m, q, s, lam, qv, w * gh.weights(i) * gh.weights(j));
            }
    };

    ThreeStateCurve out;
    Eigen::Vector3d rho = pi;
    {
        Eigen::Vector3d f;
        for (int s = 0; s < 3; ++s) {
            f(s) = region_cdf(gamma0, pi, base.m_by_state[static_cast<std::size_t>(s)], base.v);
            if (pi(s) > 0.0) spread(mass, split, pi, s, pi(s));
        }
        out.state_marginals.push_back(rho);
        out.conditional_cdf.push_back(f);
    }

    for (int t = 2; t <= horizon; ++t) {
        Field nm = zero_field(), nq = zero_field();
        Eigen::Vector3d fnum = Eigen::Vector3d::Zero();
        for (int j = 0; j < 3; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            for (int c = 0; c < n; ++c) {
                const double w = mass[ju](c);
                if (w < 1e-15) continue;
                const double lam = center(c);
                const double qbar = std::clamp(split[ju](c) / w, 0.0, 1.0);
                const double pa = sigmoid(lam);
                const Eigen::Vector3d u(pa * qbar, pa * (1.0 - qbar), sigmoid(-lam));
                const Eigen::Vector3d tw = a.transpose() * u;
                for (int s = 0; s < 3; ++s) {
                    const double ws = w * a(j, s);
                    if (ws <= 0.0) continue;
                    fnum(s) += ws * region_cdf(gamma0, tw, base.m_by_state[static_cast<std::size_t>(s)], base.v);
                    spread(nm, nq, tw, s, ws);
                }
            }
        }
        rho = a.transpose() * rho;
        Eigen::Vector3d f;
        for (int s = 0; s < 3; ++s) f(s) = rho(s) > 0.0 ? std::clamp(fnum(s) / rho(s), 0.0, 1.0) : 0.0;
        out.state_marginals.push_back(rho);
        out.conditional_cdf.push_back(f);
        mass = std::move(nm);
        split = std::move(nq);
    }

    for (int t = 1; t <= horizon; ++t) {
        const auto& r = out.state_marginals[static_cast<std::size_t>(t - 1)];
        const auto& f = out.conditional_cdf[static_cast<std::size_t>(t - 1)];
        const double alice = r(0) + r(1);
        const double pfa = alice > 0.0 ? (r(0) * f(0) + r(1) * f(1)) / alice : 0.0;
        out.points.push_back({t, pfa, f(2)});
    }
    return out;
}

}  // namespace

ThreeStateCurve pfa_pd_3state(double gamma0, const HmmModel& model, int horizon, UGridOptions options) {
    model.validate();
    if (model.n_states != 3) throw ConfigError("pfa_pd_3state needs a 3-state model");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (options.cells < 8 || options.hermite_nodes < 2) throw ConfigError("grid too coarse");
    const RMatrix s0 = model.emissions[0].regularized();
    for (int k = 1; k < 3; ++k)
        if ((model.emissions[static_cast<std::size_t>(k)].regularized() - s0).cwiseAbs().maxCoeff() >
            1e-9 * std::max(1.0, s0.cwiseAbs().maxCoeff()))
            throw ConfigError("3-state analysis requires equal emission covariances");
    ThreeStateCurve curve = propagate(gamma0, model, horizon, options);
    if (options.check_refinement) {
        UGridOptions fine = options;
        fine.cells *= 2;
        fine.hermite_nodes += 8;
        const ThreeStateCurve ref = propagate(gamma0, model, horizon, fine);
        double diff = 0.0;
        for (std::size_t i = 0; i < curve.points.size(); ++i)
            diff = std::max({diff, std::abs(curve.points[i].p_fa - ref.points[i].p_fa),
                             std::abs(curve.points[i].p_d - ref.points[i].p_d)});
        if (diff > options.refinement_tolerance)
            throw NumericFault("grid resolution insufficient: refinement moved P_FA/P_D by " + std::to_string(diff));
    }
    return curve;
}

}  // namespace arpla::analysis
