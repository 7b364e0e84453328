// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "arpla/analysis.hpp"

namespace arpla::analysis {

namespace {

constexpr double kKernelCutoff = 12.0;  // kernel entries beyond this many std devs are dropped

}  // namespace

TwoStateRecursion::TwoStateRecursion(const Eigen::Vector2d& pi, const Eigen::Matrix2d& a,
                                     const AffineLlrParams& affine, int horizon, GridOptions options)
    : pi_(pi), a_(a), aff_(affine), horizon_(horizon), opt_(options) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (opt_.points < 16) throw ConfigError("grid needs at least 16 points");
    if (!(aff_.v > 0.0)) throw ConfigError("recursion needs a non-degenerate LLR (v > 0)");
    if (pi.minCoeff() <= 0.0) throw ConfigError("recursion needs pi with both entries positive");
    const double sd = std::sqrt(aff_.v);
    const double m_lo = std::min(aff_.m0, aff_.m1);
    const double m_hi = std::max(aff_.m0, aff_.m1);
    const double prior = std::log(pi(0) / pi(1));

    // support of Lambda_t, propagated through the monotone warp
    double lo = m_lo + prior - opt_.span_sigmas * sd;
    double hi = m_hi + prior + opt_.span_sigmas * sd;
    double g_lo = lo, g_hi = hi;
    for (int t = 2; t <= horizon; ++t) {
        const double f1 = transition_warp(lo, a);
        const double f2 = transition_warp(hi, a);
        lo = m_lo + std::min(f1, f2) - opt_.span_sigmas * sd;
        hi = m_hi + std::max(f1, f2) + opt_.span_sigmas * sd;
        g_lo = std::min(g_lo, lo);
        g_hi = std::max(g_hi, hi);
    }

    const int n = opt_.points;
    const double h = (g_hi - g_lo) / (n - 1);
    RVector grid = RVector::LinSpaced(n, g_lo, g_hi);
    RVector weights = RVector::Constant(n, h);
    weights(0) = weights(n - 1) = 0.5 * h;
    warp_ = grid.unaryExpr([&](double x) { return transition_warp(x, a); });

    const std::array<double, 2> means{aff_.m0, aff_.m1};
    const double inv_sd = 1.0 / sd;
    const double cut = kKernelCutoff * sd;

    // t = 1: Lambda_1 = ell_1 + log(pi0/pi1), ell_1 | S_1 = k ~ N(m_k, v)
    GridDensity first;
    first.t = 1;
    first.grid = grid;
    first.weights = weights;
    for (int k = 0; k < 2; ++k) {
        const double c = means[static_cast<std::size_t>(k)] + prior;
        first.values[static_cast<std::size_t>(k)] =
            grid.unaryExpr([&](double y) { return pi(k) * normal_pdf((y - c) * inv_sd) * inv_sd; });
    }
    first.mass = pi;
    for (int k = 0; k < 2; ++k) {
        const double raw = weights.dot(first.values[static_cast<std::size_t>(k)]);
        first.raw_mass_deficit = std::max(first.raw_mass_deficit, std::abs(raw - pi(k)) / pi(k));
        first.values[static_cast<std::size_t>(k)] *= pi(k) / raw;
    }
    densities_.push_back(std::move(first));

    for (int t = 2; t <= horizon; ++t) {
        const GridDensity& prev = densities_.back();
        GridDensity cur;
        cur.t = t;
        cur.grid = grid;
        cur.weights = weights;
        const Eigen::Vector2d expected = a.transpose() * prev.mass;
        for (int k = 0; k < 2; ++k) {
            // source measure: sum_i a_ik q_{t-1}^(i)(x) dx
            const RVector src =
                (a(0, k) * prev.values[0] + a(1, k) * prev.values[1]).cwiseProduct(weights);
            RVector out = RVector::Zero(n);
            const double mk = means[static_cast<std::size_t>(k)];
            for (int i = 0; i < n; ++i) {
                if (src(i) == 0.0) continue;
                const double c = mk + warp_(i);
                const int j_lo = std::max(0, static_cast<int>(std::floor((c - cut - g_lo) / h)));
                const int j_hi = std::min(n - 1, static_cast<int>(std::ceil((c + cut - g_lo) / h)));
                const double s = src(i) * inv_sd;
                for (int j = j_lo; j <= j_hi; ++j) out(j) += s * normal_pdf((grid(j) - c) * inv_sd);
            }
            const double raw = weights.dot(out);
            if (expected(k) > 0.0) {
                cur.raw_mass_deficit = std::max(cur.raw_mass_deficit, std::abs(raw - expected(k)) / expected(k));
                if (raw <= 0.0) throw NumericFault("grid underflow: density vanished at t=" + std::to_string(t));
                out *= expected(k) / raw;
            }
            cur.values[static_cast<std::size_t>(k)] = std::move(out);
        }
        cur.mass = expected;
        if (cur.raw_mass_deficit > opt_.leak_tolerance)
            throw NumericFault("grid overflow: " + std::to_string(cur.raw_mass_deficit) +
                               " of the mass left the grid at t=" + std::to_string(t));
        densities_.push_back(std::move(cur));
    }
}

double TwoStateRecursion::cdf(int t, int k, double gamma) const {
    if (t < 1 || t > horizon_) throw ConfigError("t outside the computed horizon");
    if (k != 0 && k != 1) throw ConfigError("state must be 0 or 1");
    const double sd = std::sqrt(aff_.v);
    const double mk = k == 0 ? aff_.m0 : aff_.m1;
    if (t == 1) return normal_cdf((gamma - mk - std::log(pi_(0) / pi_(1))) / sd);
    const GridDensity& prev = densities_[static_cast<std::size_t>(t - 2)];
    const RVector src = (a_(0, k) * prev.values[0] + a_(1, k) * prev.values[1]).cwiseProduct(prev.weights);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < src.size(); ++i)
        if (src(i) != 0.0) acc += src(i) * normal_cdf((gamma - mk - warp_(i)) / sd);
    const double mass = densities_[static_cast<std::size_t>(t - 1)].mass(k);
    return std::clamp(acc / mass, 0.0, 1.0);
}

std::vector<OperatingPoint> TwoStateRecursion::operating_curve(double gamma0) const {
    std::vector<OperatingPoint> out;
    for (int t = 1; t <= horizon_; ++t) out.push_back({t, cdf(t, 0, gamma0), cdf(t, 1, gamma0)});
    return out;
}

double TwoStateRecursion::max_raw_mass_deficit() const {
    double m = 0.0;
    for (const auto& d : densities_) m = std::max(m, d.raw_mass_deficit);
    return m;
}

Recursion2StateResult pdf_cdf_recursion_2state(const HmmModel& model, const DecisionThresholds& thresholds,
                                               int horizon, GridOptions options) {
    model.validate();
    const AffineLlrParams aff = affine_llr_params(model);
    TwoStateRecursion rec(model.pi.head<2>(), model.a.topLeftCorner<2, 2>(), aff, horizon, options);
    Recursion2StateResult r;
    for (int t = 1; t <= horizon; ++t) r.densities.push_back(rec.density(t));
    r.curve = rec.operating_curve(thresholds.gamma0);
    return r;
}

}  // namespace arpla::analysis
