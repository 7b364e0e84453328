// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "arpla/auth.hpp"
#include "test_support.hpp"

using namespace arpla;
using namespace arpla::testing;

namespace {

EmissionStats scalar_stats(double mu, double var) {
    return make_stats(RVector::Constant(1, mu), RMatrix::Constant(1, 1, var));
}

Embedding emb(std::initializer_list<double> v, int t = 1) {
    RVector z(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) z(i++) = x;
    return {t, z};
}

// Probability-domain forward pass with per-step renormalization.
RVector prob_forward(const HmmModel& m, const std::vector<Embedding>& zs) {
    RVector alpha;
    for (std::size_t t = 0; t < zs.size(); ++t) {
        RVector lik(m.n_states);
        for (int k = 0; k < m.n_states; ++k) {
            const auto& e = m.emissions[static_cast<std::size_t>(k)];
            const RVector dev = zs[t].z - e.mu;
            const RMatrix inv = e.sigma.inverse();
            lik(k) = std::exp(-0.5 * dev.dot(inv * dev)) / std::sqrt(std::pow(2 * kPi, dev.size()) * e.sigma.determinant());
        }
        alpha = t == 0 ? RVector(m.pi.cwiseProduct(lik)) : RVector((m.a.transpose() * alpha).cwiseProduct(lik));
        alpha /= alpha.sum();
    }
    return alpha;
}

}  // namespace

TEST(GaussianLogPdf, StandardNormalMode) {
    EXPECT_NEAR(gaussian_log_pdf(emb({0.0}), scalar_stats(0.0, 1.0)), -0.5 * std::log(2 * kPi), 1e-14);
}

TEST(GaussianLogPdf, TwoDimensionalHandValue) {
    const EmissionStats s = make_stats(RVector::Zero(2), RMatrix::Identity(2, 2));
    EXPECT_NEAR(gaussian_log_pdf(emb({1.0, 1.0}), s), -std::log(2 * kPi) - 1.0, 1e-14);
}

TEST(GaussianLogPdf, MatchesExplicitInverse) {
    Rng rng(1);
    const int d = 16;
    const EmissionStats s = make_stats(gaussian_vector(d, rng), random_spd(d, rng));
    const Embedding z{1, gaussian_vector(d, rng)};
    const RVector dev = z.z - s.mu;
    const double ref = -0.5 * (d * std::log(2 * kPi) + std::log(s.sigma.determinant()) + dev.dot(s.sigma.inverse() * dev));
    EXPECT_NEAR(gaussian_log_pdf(z, s), ref, 1e-8);
}

TEST(GaussianLogPdf, NonPositiveDefiniteIsFault) {
    EmissionStats s = make_stats(RVector::Zero(2), RMatrix::Zero(2, 2));
    EXPECT_THROW(gaussian_log_pdf(emb({0.0, 0.0}), s), NumericFault);
    s.reg_eps = 1e-6;
    EXPECT_NO_THROW(gaussian_log_pdf(emb({0.0, 0.0}), s));
}

TEST(InstantaneousLlr, IdenticalHypothesesGiveZero) {
    Rng rng(2);
    const EmissionStats s = make_stats(gaussian_vector(4, rng), random_spd(4, rng));
    for (int i = 0; i < 10; ++i) EXPECT_EQ(instantaneous_llr({1, gaussian_vector(4, rng)}, s, s), 0.0);
}

TEST(InstantaneousLlr, ScalarHandValues) {
    const auto s0 = scalar_stats(0.0, 1.0), s1 = scalar_stats(1.0, 1.0);
    EXPECT_NEAR(instantaneous_llr(emb({0.5}), s0, s1), 0.0, 1e-15);
    EXPECT_NEAR(instantaneous_llr(emb({0.0}), s0, s1), 0.5, 1e-15);
}

TEST(InstantaneousLlr, MatchesExplicitExpression) {
    Rng rng(3);
    const int d = 5;
    const EmissionStats s0 = make_stats(gaussian_vector(d, rng), random_spd(d, rng));
    const EmissionStats s1 = make_stats(gaussian_vector(d, rng), random_spd(d, rng));
    const Embedding z{1, gaussian_vector(d, rng)};
    const RVector d0 = z.z - s0.mu, d1 = z.z - s1.mu;
    const double q0 = d0.dot(s0.sigma.inverse() * d0), q1 = d1.dot(s1.sigma.inverse() * d1);
    const double ref = 0.5 * (std::log(s1.sigma.determinant() / s0.sigma.determinant()) - q0 + q1);
    EXPECT_NEAR(instantaneous_llr(z, s0, s1), ref, 1e-10);
}

TEST(WaldThresholds, SymmetricTargets) {
    const DecisionThresholds t = wald_thresholds(0.05, 0.05);
    EXPECT_NEAR(t.gamma1, std::log(19.0), 1e-14);
    EXPECT_NEAR(t.gamma0, -std::log(19.0), 1e-14);
    for (double a : {0.01, 0.1, 0.3, 0.49}) {
        const auto s = wald_thresholds(a, a);
        EXPECT_NEAR(s.gamma0, -s.gamma1, 1e-14);
    }
}

TEST(WaldThresholds, Boundary) {
    const double eps = 1e-9;
    const auto t = wald_thresholds(0.5 - eps, 0.5 - eps);
    EXPECT_LT(t.gamma1, 1e-8);
    EXPECT_GT(t.gamma1, 0.0);
    EXPECT_THROW(wald_thresholds(0.5, 0.1), ConfigError);
    EXPECT_THROW(wald_thresholds(0.1, 0.0), ConfigError);
}

TEST(Decide, TiesAreTerminalAndInteriorContinues) {
    const DecisionThresholds thr{-2.0, 3.0};
    EXPECT_EQ(decide(3.0, 1, thr).verdict, Verdict::Alice);
    EXPECT_EQ(decide(-2.0, 1, thr).verdict, Verdict::Eve);
    EXPECT_EQ(decide(0.5, 1, thr).verdict, Verdict::Continue);
    EXPECT_THROW((DecisionThresholds{0.5, 1.0}.validate()), ConfigError);
}

TEST(Decide, RaisingUpperThresholdNeverCreatesAliceVerdict) {
    Rng rng(4);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int i = 0; i < 1000; ++i) {
        const double lam = u(rng), g1 = std::abs(u(rng)) + 0.01, bump = std::abs(u(rng));
        const DecisionThresholds lo{-3.0, g1}, hi{-3.0, g1 + bump};
        if (decide(lam, 1, lo).verdict == Verdict::Continue) EXPECT_NE(decide(lam, 1, hi).verdict, Verdict::Alice);
    }
}

TEST(SprtStep, ExactUpperThresholdIsAlice) {
    const auto s = scalar_stats(0.0, 1.0);
    const SprtStep st = sprt_step(2.5, emb({0.0}), s, s, {-2.5, 2.5});
    EXPECT_EQ(st.cumulative, 2.5);
    EXPECT_EQ(st.decision.verdict, Verdict::Alice);
}

TEST(SprtStep, AliceStreamDriftsPositive) {
    Rng rng(5);
    const int d = 16;
    const RMatrix sig = random_spd(d, rng);
    const auto s0 = make_stats(gaussian_vector(d, rng, 0.3), sig), s1 = make_stats(gaussian_vector(d, rng, 0.3), sig);
    const GaussianSampler alice(s0.mu, sig);
    double mean_final = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        double cum = 0.0;
        for (int t = 0; t < 200; ++t) cum = sprt_step(cum, {t, alice(rng)}, s0, s1, {-1e9, 1e9}).cumulative;
        mean_final += cum / 200;
    }
    EXPECT_GT(mean_final, 0.0);
}

TEST(Forward, SymmetricEqualEmissionsStayUniform) {
    HmmModel m = default_hmm2(scalar_stats(0, 1), scalar_stats(0, 1));
    m.pi = Eigen::Vector2d(0.5, 0.5);
    Rng rng(6);
    ForwardState f = initial_forward_state(m);
    for (int t = 1; t <= 100; ++t) {
        f = hmm_forward_step(f, m, {t, gaussian_vector(1, rng)});
        EXPECT_NEAR(f.posterior()(0), 0.5, 1e-12);
        EXPECT_NEAR(f.lambda, 0.0, 1e-12);
    }
}

TEST(Forward, IdentityTransitionsReduceToSprt) {
    Rng rng(7);
    HmmModel m = random_hmm(2, 4, rng);
    m.a = RMatrix::Identity(2, 2);
    ForwardState f = initial_forward_state(m);
    double cum = std::log(m.pi(0) / m.pi(1));
    for (int t = 1; t <= 500; ++t) {
        const Embedding z{t, gaussian_vector(4, rng)};
        f = hmm_forward_step(f, m, z);
        cum += instantaneous_llr(z, m.emissions[0], m.emissions[1]);
        ASSERT_NEAR(f.lambda, cum, 1e-9) << t;
    }
}

TEST(Forward, MatchesProbabilityDomainThreeStates) {
    Rng rng(8);
    const HmmModel m = random_hmm(3, 4, rng);
    std::vector<Embedding> zs;
    ForwardState f = initial_forward_state(m);
    for (int t = 1; t <= 50; ++t) {
        zs.push_back({t, gaussian_vector(4, rng, 0.8)});
        f = hmm_forward_step(f, m, zs.back());
        const RVector ref = prob_forward(m, zs);
        EXPECT_LT((f.posterior() - ref).cwiseAbs().maxCoeff(), 1e-9) << t;
        EXPECT_NEAR(f.posterior().sum(), 1.0, 1e-10);
    }
}

TEST(Forward, ImpossibleEmissionIsFault) {
    const RVector log_pi = Eigen::Vector2d(std::log(0.5), std::log(0.5));
    const RMatrix log_a = RMatrix::Constant(2, 2, std::log(0.5));
    ForwardState f;
    f.log_alpha = log_pi;
    EXPECT_THROW(hmm_forward_step(f, log_pi, log_a, Eigen::Vector2d(kNegInf, kNegInf)), NumericFault);
}

TEST(Forward, LabelExchangeNegatesRatio) {
    Rng rng(9);
    const HmmModel m = random_hmm(2, 3, rng);
    HmmModel s = m;
    s.pi = Eigen::Vector2d(m.pi(1), m.pi(0));
    s.a << m.a(1, 1), m.a(1, 0), m.a(0, 1), m.a(0, 0);
    s.emissions = {m.emissions[1], m.emissions[0]};
    ForwardState f = initial_forward_state(m), g = initial_forward_state(s);
    for (int t = 1; t <= 200; ++t) {
        const Embedding z{t, gaussian_vector(3, rng)};
        f = hmm_forward_step(f, m, z);
        g = hmm_forward_step(g, s, z);
        ASSERT_NEAR(f.lambda, -g.lambda, 1e-9);
    }
}

TEST(LogPosteriorRatio, HandValues) {
    EXPECT_NEAR(log_posterior_ratio(Eigen::Vector2d(std::log(0.5), std::log(0.5))), 0.0, 1e-15);
    EXPECT_NEAR(log_posterior_ratio(Eigen::Vector3d(std::log(0.25), std::log(0.25), std::log(0.5))), 0.0, 1e-15);
    EXPECT_NEAR(log_posterior_ratio(Eigen::Vector3d(std::log(0.45), std::log(0.45), std::log(0.1))), std::log(9.0), 1e-12);
    const HmmModel m3 = default_hmm3(scalar_stats(0, 1), scalar_stats(1, 1), scalar_stats(2, 1));
    EXPECT_NEAR(initial_forward_state(m3).lambda, std::log(9.0), 1e-12);
}

TEST(RecursiveLlr, IdentityIsCumulative) {
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    EXPECT_NEAR(recursive_llr_step(1.7, -0.4, id), 1.3, 1e-14);
    for (double x : {-30.0, -2.0, 0.0, 5.0, 40.0}) EXPECT_NEAR(transition_warp(x, id), x, 1e-12 * (1 + std::abs(x)));
}

TEST(RecursiveLlr, SymmetricAtOrigin) {
    Eigen::Matrix2d a;
    a << 0.9, 0.1, 0.1, 0.9;
    EXPECT_NEAR(recursive_llr_step(0.0, 0.8, a), 0.8, 1e-15);
}

TEST(RecursiveLlr, SaturationAndBounds) {
    Eigen::Matrix2d a;
    a << 0.95, 0.05, 0.05, 0.95;
    EXPECT_NEAR(transition_warp(60.0, a), std::log(19.0), 1e-12);
    EXPECT_NEAR(transition_warp(-60.0, a), -std::log(19.0), 1e-12);
    double prev = transition_warp(-20.0, a);
    for (double x = -19.9; x < 20.0; x += 0.1) {
        const double f = transition_warp(x, a);
        EXPECT_GT(f, prev);
        EXPECT_LE(f, std::log(a(0, 0) / a(0, 1)) + 1e-12);
        EXPECT_GE(f, std::log(a(1, 0) / a(1, 1)) - 1e-12);
        prev = f;
    }
}

TEST(RecursiveLlr, MatchesForwardAlgorithm) {
    Rng rng(10);
    for (int rep = 0; rep < 5; ++rep) {
        const HmmModel m = random_hmm(2, 3, rng);
        const Eigen::Matrix2d a = m.a;
        ForwardState f = initial_forward_state(m);
        double lam = 0.0;
        for (int t = 1; t <= 2000; ++t) {
            const Embedding z{t, gaussian_vector(3, rng)};
            f = hmm_forward_step(f, m, z);
            const double ell = instantaneous_llr(z, m.emissions[0], m.emissions[1]);
            lam = t == 1 ? ell + std::log(m.pi(0) / m.pi(1)) : recursive_llr_step(lam, ell, a);
            ASSERT_NEAR(lam, f.lambda, 1e-9) << "rep " << rep << " t " << t;
        }
    }
}

TEST(HmmModel, Validation) {
    HmmModel m = default_hmm2(scalar_stats(0, 1), scalar_stats(1, 1));
    EXPECT_NO_THROW(m.validate());
    m.a(0, 0) = 0.9;
    EXPECT_THROW(m.validate(), ConfigError);
    m = default_hmm2(scalar_stats(0, 1), scalar_stats(1, 1));
    m.pi(0) = 0.8;
    EXPECT_THROW(m.validate(), ConfigError);
    m = default_hmm3(scalar_stats(0, 1), scalar_stats(1, 1), scalar_stats(2, 1));
    EXPECT_NO_THROW(m.validate());
    EXPECT_TRUE(m.is_alice_state(1));
    EXPECT_FALSE(m.is_alice_state(2));
}
