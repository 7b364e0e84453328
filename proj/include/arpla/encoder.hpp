// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "arpla/channel.hpp"

namespace arpla {

enum class FeatureMode { RealImag, MagPhase };

const char* to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(const std::string& s);

/// Fixed linear feature map: z = P * flatten(H_hat), P with orthonormal rows.
struct EncoderSpec {
    int d = 16;
    FeatureMode mode = FeatureMode::RealImag;
    RMatrix projection;  // d x (2 * m_r * m_t)
    std::uint64_t seed = 0;

    int input_dim() const { return static_cast<int>(projection.cols()); }

    /// Seeded orthonormal random projection (QR of a Gaussian matrix).
    static EncoderSpec random(int d, int m_r, int m_t, FeatureMode mode, std::uint64_t seed);

    /// Explicit projection; rows must be orthonormal.
    static EncoderSpec from_projection(RMatrix projection, FeatureMode mode);

    void validate() const;
};

struct Embedding {
    int t = 0;
    RVector z;
};

/// Gaussian emission statistics for one hidden state plus its EMA settings.
struct EmissionStats {
    RVector mu;
    RMatrix sigma;
    double beta = 0.995;
    double reg_eps = 1e-6;
    int state_label = 0;

    int dim() const { return static_cast<int>(mu.size()); }

    /// sigma + reg_eps * I
    RMatrix regularized() const;
};

/// [Re(vec_row(H)); Im(vec_row(H))] or [|H|; arg H], row-major.
RVector flatten_csi(const CMatrix& h, FeatureMode mode);

Embedding encode(const CsiObservation& obs, const EncoderSpec& spec);

/// mu' = b mu + (1-b) z ; sigma' = b sigma + (1-b)(z-mu')(z-mu')^T with b = stats.beta.
EmissionStats ema_update(const EmissionStats& stats, const Embedding& z);

/// Sample mean and covariance (denominator n) plus reg_eps * I. Needs n >= d+1.
EmissionStats fit_stats_batch(std::span<const Embedding> embeddings, double reg_eps, int state_label = 0,
                              double beta = 0.995);

struct LabeledEmbedding {
    Embedding embedding;
    int state_label = 0;
};

/// Same line-delimited convention as CSI traces:
///   header {"version":1,"d":16,"label":...}, records {"t","z":[...],"state_label"}.
void write_embedding_dataset(const std::filesystem::path& path, std::span<const LabeledEmbedding> data,
                             const std::string& label);
std::vector<LabeledEmbedding> read_embedding_dataset(const std::filesystem::path& path);

}  // namespace arpla
