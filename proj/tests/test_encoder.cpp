// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include <gtest/gtest.h>

#include "arpla/encoder.hpp"

using namespace arpla;

namespace {

CsiObservation random_obs(Rng& rng, int m_r = 4, int m_t = 4) {
    CsiObservation o;
    o.h_hat.resize(m_r, m_t);
    for (Eigen::Index i = 0; i < o.h_hat.size(); ++i) o.h_hat(i) = complex_normal(rng, 1.0);
    return o;
}

EmissionStats stats1d(double mu, double sigma, double beta) {
    EmissionStats s;
    s.mu = RVector::Constant(1, mu);
    s.sigma = RMatrix::Constant(1, 1, sigma);
    s.beta = beta;
    return s;
}

}  // namespace

TEST(EncoderSpec, RandomProjectionIsOrthonormal) {
    const EncoderSpec e = EncoderSpec::random(16, 4, 4, FeatureMode::RealImag, 7);
    EXPECT_LT((e.projection * e.projection.transpose() - RMatrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NO_THROW(e.validate());
}

TEST(EncoderSpec, RejectsOversizedD) {
    EXPECT_THROW(EncoderSpec::random(33, 4, 4, FeatureMode::RealImag, 1), ConfigError);
    EXPECT_THROW(EncoderSpec::from_projection(RMatrix::Constant(2, 4, 1.0), FeatureMode::RealImag), ConfigError);
}

TEST(Encode, ZeroMatrixGivesZero) {
    const EncoderSpec e = EncoderSpec::random(16, 4, 4, FeatureMode::RealImag, 7);
    CsiObservation o;
    o.h_hat = CMatrix::Zero(4, 4);
    EXPECT_EQ(encode(o, e).z, RVector::Zero(16));
}

TEST(Encode, Deterministic) {
    Rng rng(3);
    const CsiObservation o = random_obs(rng);
    const EncoderSpec a = EncoderSpec::random(16, 4, 4, FeatureMode::RealImag, 7);
    const EncoderSpec b = EncoderSpec::random(16, 4, 4, FeatureMode::RealImag, 7);
    EXPECT_EQ(encode(o, a).z, encode(o, b).z);
}

TEST(Encode, FullPermutationIsLossless) {
    Rng rng(4);
    const CsiObservation o = random_obs(rng, 2, 3);
    RMatrix perm = RMatrix::Zero(12, 12);
    for (int i = 0; i < 12; ++i) perm(i, (i * 5) % 12) = 1.0;  // 5 is coprime with 12
    const EncoderSpec e = EncoderSpec::from_projection(perm, FeatureMode::RealImag);
    const RVector z = encode(o, e).z;
    EXPECT_NEAR(z.norm(), o.h_hat.norm(), 1e-12);
    EXPECT_TRUE((perm.transpose() * z).isApprox(flatten_csi(o.h_hat, FeatureMode::RealImag)));
}

TEST(Encode, LinearInRealImagMode) {
    Rng rng(5);
    const CsiObservation x = random_obs(rng), y = random_obs(rng);
    const EncoderSpec e = EncoderSpec::random(16, 4, 4, FeatureMode::RealImag, 2);
    CsiObservation mix;
    mix.h_hat = 2.5 * x.h_hat - 0.75 * y.h_hat;
    EXPECT_TRUE(encode(mix, e).z.isApprox(2.5 * encode(x, e).z - 0.75 * encode(y, e).z, 1e-12));
}

TEST(Encode, MagPhaseFlattening) {
    CMatrix h(1, 2);
    h << Complex(0.0, 2.0), Complex(-1.0, 0.0);
    const RVector v = flatten_csi(h, FeatureMode::MagPhase);
    EXPECT_DOUBLE_EQ(v(0), 2.0);
    EXPECT_DOUBLE_EQ(v(1), 1.0);
    EXPECT_DOUBLE_EQ(v(2), kPi / 2);
    EXPECT_DOUBLE_EQ(v(3), kPi);
}

TEST(Encode, DimensionMismatch) {
    Rng rng(1);
    const EncoderSpec e = EncoderSpec::random(8, 2, 2, FeatureMode::RealImag, 2);
    EXPECT_THROW(encode(random_obs(rng, 4, 4), e), DimensionError);
}

TEST(EmaUpdate, FullForgetting) {
    const EmissionStats s = ema_update(stats1d(3.0, 2.0, 0.0), {0, RVector::Constant(1, 5.0)});
    EXPECT_DOUBLE_EQ(s.mu(0), 5.0);
    EXPECT_DOUBLE_EQ(s.sigma(0, 0), 0.0);
}

TEST(EmaUpdate, HandValueUsesUpdatedMean) {
    const EmissionStats s = ema_update(stats1d(0.0, 4.0, 0.5), {0, RVector::Constant(1, 2.0)});
    EXPECT_DOUBLE_EQ(s.mu(0), 1.0);
    EXPECT_DOUBLE_EQ(s.sigma(0, 0), 0.5 * 4.0 + 0.5 * 1.0);
}

TEST(EmaUpdate, FixedPointContractsCovariance) {
    EmissionStats s = stats1d(1.0, 1.0, 0.9);
    for (int i = 0; i < 10; ++i) s = ema_update(s, {0, RVector::Constant(1, 1.0)});
    EXPECT_DOUBLE_EQ(s.mu(0), 1.0);
    EXPECT_NEAR(s.sigma(0, 0), std::pow(0.9, 10), 1e-14);
}

TEST(EmaUpdate, TracksStationaryStream) {
    const int d = 3;
    RMatrix l(d, d);
    l << 1.0, 0.0, 0.0, 0.4, 0.8, 0.0, -0.3, 0.2, 0.6;
    const RMatrix s_true = l * l.transpose();
    const RVector m_true = (RVector(d) << 1.0, -2.0, 0.5).finished();
    EmissionStats s;
    s.mu = RVector::Zero(d);
    s.sigma = RMatrix::Identity(d, d);
    s.beta = 0.99;
    Rng rng(7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 10000; ++i) {
        RVector e(d);
        for (int k = 0; k < d; ++k) e(k) = g(rng);
        s = ema_update(s, {i, m_true + l * e});
    }
    EXPECT_LT((s.mu - m_true).norm(), 0.3);
    // the EMA window is about 100 samples, so its covariance is noisy; compare on the diagonal scale
    const RVector scale = s_true.diagonal().cwiseSqrt();
    const RMatrix rel = (s.sigma - s_true).cwiseQuotient(scale * scale.transpose());
    EXPECT_LT(rel.cwiseAbs().maxCoeff(), 0.15) << s.sigma;
}

TEST(EmaUpdate, DimensionMismatch) {
    EXPECT_THROW(ema_update(stats1d(0, 1, 0.5), {0, RVector::Zero(2)}), DimensionError);
}

TEST(FitStatsBatch, IdenticalSamplesGiveRegularizer) {
    std::vector<Embedding> v(5, {0, RVector::Constant(2, 1.5)});
    const EmissionStats s = fit_stats_batch(v, 1e-3);
    EXPECT_TRUE(s.sigma.isApprox(1e-3 * RMatrix::Identity(2, 2)));
}

TEST(FitStatsBatch, HandValue) {
    const std::vector<Embedding> v{{0, RVector::Constant(1, 0.0)}, {1, RVector::Constant(1, 2.0)}};
    const EmissionStats s = fit_stats_batch(v, 0.0);
    EXPECT_DOUBLE_EQ(s.mu(0), 1.0);
    EXPECT_DOUBLE_EQ(s.sigma(0, 0), 1.0);
}

TEST(FitStatsBatch, StandardNormalSample) {
    Rng rng(9);
    std::normal_distribution<double> g;
    std::vector<Embedding> v;
    for (int i = 0; i < 10000; ++i) {
        RVector z(16);
        for (int k = 0; k < 16; ++k) z(k) = g(rng);
        v.push_back({i, z});
    }
    const EmissionStats s = fit_stats_batch(v, 1e-6);
    EXPECT_LT((s.sigma - RMatrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 0.05);
    Eigen::LLT<RMatrix> llt(s.regularized());
    EXPECT_EQ(llt.info(), Eigen::Success);
}

TEST(FitStatsBatch, TooFewSamples) {
    std::vector<Embedding> v(3, {0, RVector::Zero(4)});
    EXPECT_THROW(fit_stats_batch(v, 1e-6), ConfigError);
}

TEST(EmbeddingDataset, RoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "arpla_embeddings.jsonl";
    Rng rng(2);
    std::normal_distribution<double> g;
    std::vector<LabeledEmbedding> data;
    for (int i = 0; i < 5; ++i) {
        RVector z(4);
        for (int k = 0; k < 4; ++k) z(k) = g(rng) / 3.0;
        data.push_back({{i + 1, z}, i % 3});
    }
    write_embedding_dataset(path, data, "alice");
    const auto back = read_embedding_dataset(path);
    ASSERT_EQ(back.size(), data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        EXPECT_EQ(back[i].embedding.t, data[i].embedding.t);
        EXPECT_EQ(back[i].embedding.z, data[i].embedding.z);
        EXPECT_EQ(back[i].state_label, data[i].state_label);
    }
    std::filesystem::remove(path);
}
