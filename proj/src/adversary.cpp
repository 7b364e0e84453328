// SPDX-License-Identifier: Apache-2.0

#include "arpla/adversary.hpp"

#include <algorithm>

namespace arpla {

std::string spoofer_name(const SpooferKind& kind) {
    struct {
        std::string operator()(const NaiveSpoofer&) const { return "naive"; }
        std::string operator()(const MomentMatchingSpoofer&) const { return "moment-matching"; }
        std::string operator()(const TraceSpoofer& t) const { return "trace:" + t.path.string(); }
    } v;
    return std::visit(v, kind);
}

SpoofTrace load_trace(const std::filesystem::path& path) {
    CsiTrace raw = read_csi_trace(path);
    if (raw.records.empty()) throw TraceError("trace '" + path.string() + "' has no records", 0);
    SpoofTrace out;
    out.m_t = raw.header.m_t;
    out.m_r = raw.header.m_r;
    out.metadata = raw.header.meta_json;
    out.records.reserve(raw.records.size());
    for (auto& r : raw.records) out.records.push_back(std::move(r.h_hat));
    return out;
}

Spoofer::Spoofer(SpooferKind kind, std::uint64_t seed, std::shared_ptr<const SpoofTrace> trace)
    : kind_(std::move(kind)), rng_(derive_seed(seed, 0x5900F, 0)), trace_(std::move(trace)) {
    if (const auto* n = std::get_if<NaiveSpoofer>(&kind_)) {
        own_channel_.emplace(n->eve, Identity::Eve, seed);
    } else if (const auto* m = std::get_if<MomentMatchingSpoofer>(&kind_)) {
        if (!(m->beta_e >= 0.0 && m->beta_e < 1.0)) throw ConfigError("beta_e must lie in [0,1)");
        if (m->observation_noise < 0.0) throw ConfigError("eavesdropping noise must be >= 0");
        own_channel_.emplace(m->fallback, Identity::Eve, seed);
    } else {
        const auto& t = std::get<TraceSpoofer>(kind_);
        if (!trace_) trace_ = std::make_shared<const SpoofTrace>(load_trace(t.path));
    }
}

bool Spoofer::warmed_up() const {
    if (const auto* m = std::get_if<MomentMatchingSpoofer>(&kind_))
        return seen_ > 0 && seen_ >= m->fallback.m_t * m->fallback.m_r;
    return true;
}

void Spoofer::seek(std::size_t record) {
    if (!trace_) throw ConfigError("seek is only defined for trace spoofers");
    cursor_ = record % trace_->records.size();
}

CsiObservation Spoofer::naive_draw() { return own_channel_->next(); }

CsiObservation Spoofer::next(const std::optional<CsiObservation>& eavesdropped) {
    ++t_;
    if (std::holds_alternative<NaiveSpoofer>(kind_)) {
        CsiObservation obs = naive_draw();
        obs.t = t_;
        return obs;
    }
    if (const auto* m = std::get_if<MomentMatchingSpoofer>(&kind_)) {
        if (eavesdropped) {
            const CMatrix& x = eavesdropped->h_hat;
            if (seen_ > 0 && (x.rows() != mean_.rows() || x.cols() != mean_.cols()))
                throw DimensionError("eavesdropped CSI changed shape");
            ++seen_;
            // running average until the EMA window is filled, then fixed beta_e
            const double b = std::min(m->beta_e, 1.0 - 1.0 / seen_);
            if (seen_ == 1) {
                mean_ = x;
                var_ = Eigen::MatrixXd::Zero(x.rows(), x.cols());
            } else {
                mean_ = b * mean_ + (1.0 - b) * x;
                var_ = b * var_ + (1.0 - b) * (x - mean_).cwiseAbs2();
            }
        }
        // keep the fallback channel running so it stays time-consistent
        CsiObservation fallback = naive_draw();
        if (!warmed_up()) {
            fallback.t = t_;
            return fallback;
        }
        CsiObservation obs{t_, mean_};
        for (Eigen::Index j = 0; j < obs.h_hat.cols(); ++j)
            for (Eigen::Index i = 0; i < obs.h_hat.rows(); ++i) obs.h_hat(i, j) += complex_normal(rng_, var_(i, j));
        return obs;
    }
    const auto& t = std::get<TraceSpoofer>(kind_);
    if (cursor_ >= trace_->records.size()) {
        if (t.replay == ReplayPolicy::Sequential) throw TraceExhausted();
        cursor_ = 0;
    }
    return {t_, trace_->records[cursor_++]};
}

CsiObservation next_spoofed_csi(Spoofer& spoofer, const std::optional<CsiObservation>& eavesdropped) {
    return spoofer.next(eavesdropped);
}

}  // namespace arpla
