// SPDX-License-Identifier: Apache-2.0

#include "arpla/encoder.hpp"
#include "arpla/csi_trace.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace arpla {

const char* to_string(FeatureMode mode) { return mode == FeatureMode::RealImag ? "real-imag" : "mag-phase"; }

FeatureMode feature_mode_from_string(const std::string& s) {
    if (s == "real-imag") return FeatureMode::RealImag;
    if (s == "mag-phase") return FeatureMode::MagPhase;
    throw ConfigError("unknown encoder mode '" + s + "'");
}

EncoderSpec EncoderSpec::random(int d, int m_r, int m_t, FeatureMode mode, std::uint64_t seed) {
    const int n = 2 * m_r * m_t;
    if (d < 1 || d > n) throw ConfigError("embedding dimension must lie in [1, 2*m_r*m_t]");
    Rng rng(derive_seed(seed, 0xE4C0DE, 0));
    std::normal_distribution<double> g(0.0, 1.0);
    RMatrix gauss(n, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < n; ++i) gauss(i, j) = g(rng);
    Eigen::HouseholderQR<RMatrix> qr(gauss);
    RMatrix q = qr.householderQ() * RMatrix::Identity(n, d);
    EncoderSpec spec;
    spec.d = d;
    spec.mode = mode;
    spec.projection = q.transpose();
    spec.seed = seed;
    return spec;
}

EncoderSpec EncoderSpec::from_projection(RMatrix projection, FeatureMode mode) {
    EncoderSpec spec;
    spec.d = static_cast<int>(projection.rows());
    spec.mode = mode;
    spec.projection = std::move(projection);
    spec.validate();
    return spec;
}

void EncoderSpec::validate() const {
    if (projection.rows() != d) throw ConfigError("projection row count differs from d");
    if (d > projection.cols()) throw ConfigError("d exceeds the flattened CSI length");
    const RMatrix gram = projection * projection.transpose();
    if ((gram - RMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
        throw ConfigError("projection rows are not orthonormal");
}

RMatrix EmissionStats::regularized() const {
    RMatrix s = sigma;
    s.diagonal().array() += reg_eps;
    return s;
}

RVector flatten_csi(const CMatrix& h, FeatureMode mode) {
    const Eigen::Index n = h.size();
    RVector v(2 * n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j, ++k) {
            if (mode == FeatureMode::RealImag) {
                v(k) = h(i, j).real();
                v(n + k) = h(i, j).imag();
            } else {
                v(k) = std::abs(h(i, j));
                v(n + k) = std::arg(h(i, j));
            }
        }
    return v;
}

Embedding encode(const CsiObservation& obs, const EncoderSpec& spec) {
    if (2 * obs.h_hat.size() != spec.projection.cols())
        throw DimensionError("observation size does not match the encoder projection");
    return {obs.t, spec.projection * flatten_csi(obs.h_hat, spec.mode)};
}

EmissionStats ema_update(const EmissionStats& stats, const Embedding& z) {
    if (z.z.size() != stats.mu.size()) throw DimensionError("embedding and statistics dimensions differ");
    EmissionStats out = stats;
    const double b = stats.beta;
    out.mu = b * stats.mu + (1.0 - b) * z.z;
    const RVector dev = z.z - out.mu;
    out.sigma = b * stats.sigma + (1.0 - b) * (dev * dev.transpose());
    return out;
}

EmissionStats fit_stats_batch(std::span<const Embedding> embeddings, double reg_eps, int state_label, double beta) {
    if (embeddings.empty()) throw ConfigError("fit_stats_batch needs samples");
    const auto d = embeddings.front().z.size();
    const auto n = static_cast<Eigen::Index>(embeddings.size());
    if (n < d + 1) throw ConfigError("fit_stats_batch needs at least d+1 samples");
    if (reg_eps < 0.0) throw ConfigError("reg_eps must be >= 0");
    RVector mu = RVector::Zero(d);
    for (const auto& e : embeddings) {
        if (e.z.size() != d) throw DimensionError("inconsistent embedding dimensions");
        mu += e.z;
    }
    mu /= static_cast<double>(n);
    RMatrix sigma = RMatrix::Zero(d, d);
    for (const auto& e : embeddings) {
        const RVector dev = e.z - mu;
        sigma.noalias() += dev * dev.transpose();
    }
    sigma /= static_cast<double>(n);
    sigma.diagonal().array() += reg_eps;
    return {mu, sigma, beta, reg_eps, state_label};
}

void write_embedding_dataset(const std::filesystem::path& path, std::span<const LabeledEmbedding> data,
                             const std::string& label) {
    using json = nlohmann::ordered_json;
    std::ofstream out(path);
    if (!out) throw TraceError("cannot open '" + path.string() + "' for writing", 0);
    const int d = data.empty() ? 0 : static_cast<int>(data.front().embedding.z.size());
    out << json{{"version", kTraceVersion}, {"d", d}, {"label", label}}.dump() << '\n';
    for (const auto& r : data) {
        std::vector<double> z(r.embedding.z.data(), r.embedding.z.data() + r.embedding.z.size());
        out << json{{"t", r.embedding.t}, {"z", z}, {"state_label", r.state_label}}.dump() << '\n';
    }
    if (!out) throw TraceError("write failed for '" + path.string() + "'", 0);
}

std::vector<LabeledEmbedding> read_embedding_dataset(const std::filesystem::path& path) {
    using json = nlohmann::ordered_json;
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open '" + path.string() + "'", 0);
    std::vector<LabeledEmbedding> out;
    std::string line;
    std::size_t line_no = 0;
    int d = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw TraceError(std::string("parse error: ") + e.what(), line_no);
        }
        if (d < 0) {
            d = j.value("d", -1);
            if (d < 0) throw TraceError("missing 'd' in header", line_no);
            continue;
        }
        const auto z = j.at("z").get<std::vector<double>>();
        if (static_cast<int>(z.size()) != d) throw TraceError("embedding length differs from header d", line_no);
        LabeledEmbedding e;
        e.embedding.t = j.at("t").get<int>();
        e.embedding.z = Eigen::Map<const RVector>(z.data(), d);
        e.state_label = j.value("state_label", 0);
        out.push_back(std::move(e));
    }
    if (d < 0) throw TraceError("missing header record", 1);
    return out;
}

}  // namespace arpla
