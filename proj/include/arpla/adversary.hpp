// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arpla/channel.hpp"
#include "arpla/csi_trace.hpp"

namespace arpla {

/// Eve transmits from her own position; Bob sees her true channel.
struct NaiveSpoofer {
    ChannelParams eve;
};

/// Online complex Gaussian mimic of Alice: EMA of the entrywise mean and
/// variance of eavesdropped CSI. No cross-entry or temporal correlation.
struct MomentMatchingSpoofer {
    double beta_e = 0.95;
    double observation_noise = 0.31622776601683794;  // Eve's own CSI estimation noise
    ChannelParams fallback;                          // naive channel used until warmed up
};

enum class ReplayPolicy { Sequential, Loop };

/// Replays matrices from a trace file (e.g. a trained generator's output).
struct TraceSpoofer {
    std::filesystem::path path;
    ReplayPolicy replay = ReplayPolicy::Sequential;
};

using SpooferKind = std::variant<NaiveSpoofer, MomentMatchingSpoofer, TraceSpoofer>;

std::string spoofer_name(const SpooferKind& kind);

struct SpoofTrace {
    int m_t = 0;
    int m_r = 0;
    std::string metadata;  // serialized JSON object from the header
    std::vector<CMatrix> records;
};

/// Loads and validates a trace file; rejects empty traces.
SpoofTrace load_trace(const std::filesystem::path& path);

class TraceExhausted : public Error {
  public:
    TraceExhausted() : Error("trace exhausted") {}
};

/// Stateful spoofer session. One instance per Eve session; not thread-safe.
class Spoofer {
  public:
    /// `trace` may be supplied pre-loaded so sessions can share one parsed file.
    Spoofer(SpooferKind kind, std::uint64_t seed, std::shared_ptr<const SpoofTrace> trace = nullptr);

    /// Next spoofed CSI as received by Bob. `eavesdropped` feeds the
    /// moment-matching fit and is ignored by the other variants.
    CsiObservation next(const std::optional<CsiObservation>& eavesdropped);

    /// Number of eavesdropped samples absorbed so far.
    int samples_seen() const { return seen_; }
    bool warmed_up() const;
    /// Trace variant: position the replay cursor (wrapped by the trace length).
    void seek(std::size_t record);

    const CMatrix& fitted_mean() const { return mean_; }
    const Eigen::MatrixXd& fitted_variance() const { return var_; }
    const SpooferKind& kind() const { return kind_; }

  private:
    CsiObservation naive_draw();

    SpooferKind kind_;
    Rng rng_;
    std::optional<ChannelSimulator> own_channel_;
    std::shared_ptr<const SpoofTrace> trace_;
    std::size_t cursor_ = 0;
    int t_ = 0;
    int seen_ = 0;
    CMatrix mean_;
    Eigen::MatrixXd var_;
};

/// Free-function form of Spoofer::next.
CsiObservation next_spoofed_csi(Spoofer& spoofer, const std::optional<CsiObservation>& eavesdropped);

}  // namespace arpla
