// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "arpla/channel.hpp"

using namespace arpla;

namespace {

ChannelState fresh_state(const ChannelParams& p, std::uint64_t seed = 3) { return init_channel(p, Identity::Alice, seed); }

// vec() stacks columns, matching the Kronecker identity Cov(vec H) = R_t^T (x) R_r.
Eigen::VectorXcd vec_cols(const CMatrix& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
}

}  // namespace

TEST(ExpCorrelation, ZeroIsIdentity) {
    EXPECT_TRUE(exp_correlation_matrix(3, 0.0).isApprox(CMatrix::Identity(3, 3)));
}

TEST(ExpCorrelation, HandValue) {
    const CMatrix r = exp_correlation_matrix(2, 0.5);
    EXPECT_DOUBLE_EQ(r(0, 1).real(), 0.5);
    EXPECT_DOUBLE_EQ(r(1, 0).real(), 0.5);
    EXPECT_DOUBLE_EQ(r(0, 0).real(), 1.0);
}

TEST(ExpCorrelation, PositiveDefinite) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(exp_correlation_matrix(4, 0.7));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(ExpCorrelation, RejectsOutOfRange) {
    EXPECT_THROW(exp_correlation_matrix(3, 1.0), ConfigError);
    EXPECT_THROW(exp_correlation_matrix(3, -0.1), ConfigError);
}

TEST(StepWhitened, FullCorrelationFreezes) {
    ChannelParams p;
    p.rho_t = 1.0;
    Rng rng(1);
    const ChannelState s = fresh_state(p);
    EXPECT_TRUE(step_whitened(s, p, rng).h_w.isApprox(s.h_w));
}

TEST(StepWhitened, MemorylessDrawsAreFresh) {
    ChannelParams p;
    p.rho_t = 0.0;
    Rng rng(1);
    const ChannelState s = fresh_state(p);
    const ChannelState n = step_whitened(s, p, rng);
    EXPECT_GT((n.h_w - s.h_w).norm(), 1e-3);
}

TEST(StepWhitened, LagOneAutocorrelationAndStationaryPower) {
    ChannelParams p;
    p.m_t = p.m_r = 1;
    p.rho_t = 0.7;
    Rng rng(11);
    ChannelState s = fresh_state(p);
    const int n = 100000;
    double num = 0.0, pow = 0.0;
    Complex prev = s.h_w(0, 0);
    for (int i = 0; i < n; ++i) {
        s = step_whitened(s, p, rng);
        const Complex cur = s.h_w(0, 0);
        num += (cur * std::conj(prev)).real();
        pow += std::norm(cur);
        prev = cur;
    }
    EXPECT_NEAR(num / pow, 0.7, 0.02);
    EXPECT_NEAR(pow / n, 1.0, 0.02);
}

TEST(SpatialCorrelation, IdentityFactorsPassThrough) {
    Rng rng(2);
    CMatrix h(3, 2);
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = complex_normal(rng, 1.0);
    EXPECT_TRUE(apply_spatial_correlation(h, CMatrix::Identity(3, 3), CMatrix::Identity(2, 2)).isApprox(h));
}

TEST(SpatialCorrelation, SingleEntryGivesOuterProduct) {
    const CMatrix rx = hermitian_sqrt(exp_correlation_matrix(3, 0.5));
    const CMatrix tx = hermitian_sqrt(exp_correlation_matrix(2, 0.4));
    CMatrix h = CMatrix::Zero(3, 2);
    h(1, 0) = 1.0;
    const CMatrix expect = rx.col(1) * tx.row(0);
    EXPECT_TRUE(apply_spatial_correlation(h, rx, tx).isApprox(expect, 1e-12));
}

TEST(SpatialCorrelation, DimensionMismatch) {
    EXPECT_THROW(apply_spatial_correlation(CMatrix::Zero(3, 2), CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)),
                 DimensionError);
}

TEST(SpatialCorrelation, KroneckerCovariance) {
    const CMatrix r_r = exp_correlation_matrix(2, 0.5);
    const CMatrix r_t = exp_correlation_matrix(2, 0.5);
    const CMatrix rx = hermitian_sqrt(r_r), tx = hermitian_sqrt(r_t);
    Rng rng(5);
    CMatrix acc = CMatrix::Zero(4, 4);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        CMatrix hw(2, 2);
        for (Eigen::Index k = 0; k < 4; ++k) hw(k) = complex_normal(rng, 1.0);
        const Eigen::VectorXcd v = vec_cols(apply_spatial_correlation(hw, rx, tx));
        acc += v * v.adjoint();
    }
    acc /= n;
    EXPECT_LT((acc - kron(r_t.transpose(), r_r)).cwiseAbs().maxCoeff(), 0.02);
}

TEST(StepLos, ZeroDriftLeavesLosUnchanged) {
    ChannelParams p;
    Rng rng(1);
    const ChannelState s = fresh_state(p);
    EXPECT_TRUE(step_los(s, p, rng).h_los.isApprox(s.h_los));
}

TEST(StepLos, NormPreserved) {
    ChannelParams p;
    p.sigma_phi = 0.3;
    Rng rng(1);
    ChannelState s = fresh_state(p);
    const double n0 = s.h_los.norm();
    for (int i = 0; i < 100; ++i) s = step_los(s, p, rng);
    EXPECT_NEAR(s.h_los.norm(), n0, 1e-12);
}

TEST(StepLos, AccumulatedPhaseVariance) {
    ChannelParams p;
    p.m_t = p.m_r = 1;
    p.sigma_phi = 0.1;
    const int steps = 10000, runs = 8000;
    double sum2 = 0.0;
    for (int r = 0; r < runs; ++r) {
        Rng rng(1000 + r);
        ChannelState s = fresh_state(p);
        double unwrapped = 0.0;
        Complex prev = s.h_los(0, 0);
        for (int i = 0; i < steps; ++i) {
            s = step_los(s, p, rng);
            unwrapped += std::arg(s.h_los(0, 0) / prev);
            prev = s.h_los(0, 0);
        }
        sum2 += unwrapped * unwrapped;
    }
    // 8000 runs: relative sd of the estimate is about 1.6%, so 5% is a 3-sigma band
    EXPECT_NEAR(sum2 / runs / (steps * 0.01), 1.0, 0.05);
}

TEST(ComposeRician, BlockedSlotIsNlosOnly) {
    ChannelParams p;
    p.blockage = {{5, 3}};
    const ChannelState s = fresh_state(p);
    const SpatialFactors f = SpatialFactors::from(p);
    const CMatrix nlos = apply_spatial_correlation(s.h_w, f.rx_sqrt, f.tx_sqrt);
    for (int t : {5, 6, 7, 8}) EXPECT_TRUE(compose_rician(s, t, p).isApprox(nlos, 1e-14)) << t;
    EXPECT_FALSE(compose_rician(s, 4, p).isApprox(nlos, 1e-3));
}

TEST(ComposeRician, LosPowerFraction) {
    ChannelParams p;
    ChannelState s = fresh_state(p);
    s.h_w.setZero();
    const CMatrix h = compose_rician(s, 1, p);
    EXPECT_NEAR(h.squaredNorm() / s.h_los.squaredNorm(), 10.0 / 11.0, 1e-12);
}

TEST(ComposeRician, LargeKLimit) {
    ChannelParams p;
    p.k0 = 1e9;
    const ChannelState s = fresh_state(p);
    const CMatrix h = compose_rician(s, 1, p);
    EXPECT_LT((h - s.h_los).norm() / s.h_los.norm(), 1e-4);
}

TEST(ComposeRician, PowerInvariantToK) {
    const auto mean_power = [](double k0) {
        ChannelParams p;
        p.k0 = k0;
        p.rho_t = 0.0;
        ChannelSimulator sim(p, Identity::Alice, 9);
        double acc = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) acc += sim.advance().squaredNorm();
        return acc / n;
    };
    const double p0 = mean_power(0.0), p10 = mean_power(10.0);
    EXPECT_NEAR(p0 / 16.0, 1.0, 0.03);
    EXPECT_NEAR(p10 / p0, 1.0, 0.03);
}

TEST(Observe, NoiselessIsExact) {
    Rng rng(1);
    const CMatrix h = CMatrix::Constant(2, 2, Complex(1.5, -0.5));
    EXPECT_EQ(observe(h, 0.0, rng).h_hat, h);
}

TEST(Observe, NoiseVariance) {
    Rng rng(4);
    const CMatrix h = CMatrix::Zero(1, 1);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acc += std::norm(observe(h, 1.0, rng).h_hat(0, 0));
    EXPECT_NEAR(acc / n, 1.0, 0.02);
}

TEST(Observe, RejectsNegativeVariance) {
    Rng rng(1);
    EXPECT_THROW(observe(CMatrix::Zero(1, 1), -1.0, rng), ConfigError);
}

TEST(Observe, FiveDbNoiseVariance) { EXPECT_NEAR(snr_db_to_noise_var(5.0), 0.316227766, 1e-9); }

TEST(InitChannel, SingleAntennaLos) {
    ChannelParams p;
    p.m_t = p.m_r = 1;
    const ChannelState s = fresh_state(p);
    EXPECT_NEAR(std::abs(s.h_los(0, 0)), 1.0, 1e-15);
}

TEST(InitChannel, LosNormalization) {
    ChannelParams p;
    p.los_departure = 0.3;
    p.los_arrival = -1.1;
    EXPECT_NEAR(fresh_state(p).h_los.squaredNorm(), 16.0, 1e-12);
}

TEST(InitChannel, Deterministic) {
    ChannelParams p;
    const ChannelState a = fresh_state(p, 42), b = fresh_state(p, 42);
    EXPECT_EQ(a.h_w, b.h_w);
    EXPECT_EQ(a.h_los, b.h_los);
}

TEST(InitChannel, EveGeometryDiffers) {
    ChannelParams p;
    const ChannelParams e = make_eve_params(p, 30.0 * kPi / 180.0);
    EXPECT_GT((init_channel(p, Identity::Alice, 1).h_los - init_channel(e, Identity::Eve, 1).h_los).norm(), 1.0);
}

TEST(ChannelSimulator, SameSeedSameTrajectory) {
    ChannelParams p;
    p.sigma_phi = 0.05;
    ChannelSimulator a(p, Identity::Alice, 8), b(p, Identity::Alice, 8);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(a.next().h_hat, b.next().h_hat);
}

TEST(ChannelParams, BlockageNormalizationMergesOverlaps) {
    ChannelParams p;
    p.blockage = {{10, 5}, {3, 2}, {12, 6}};
    const auto n = p.normalized_blockage();
    ASSERT_EQ(n.size(), 2u);
    EXPECT_EQ(n[0].start, 3);
    EXPECT_EQ(n[1].start, 10);
    EXPECT_EQ(n[1].end(), 18);
    EXPECT_TRUE(p.blocked(18));
    EXPECT_FALSE(p.blocked(19));
    EXPECT_DOUBLE_EQ(p.rician_factor(4), 0.0);
    EXPECT_DOUBLE_EQ(p.rician_factor(7), p.k0);
}

TEST(ChannelParams, Validation) {
    ChannelParams p;
    p.rho_t = 1.5;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.noise_var = -1;
    EXPECT_THROW(p.validate(), ConfigError);
    p = {};
    p.m_t = 0;
    EXPECT_THROW(p.validate(), ConfigError);
}
