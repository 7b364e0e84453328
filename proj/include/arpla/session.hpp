// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arpla/auth.hpp"

namespace arpla {

enum class DetectorKind { Sprt, Hmm2, Hmm3 };
enum class AfterVerdict { Halt, Reset, Continue };
// How the session decides that the LoS path is blocked (selects beta_blockage).
//   oracle:     the slot source's ground-truth flag
//   posterior:  filtered P(S_t = NLoS) > 1/2 (3-state models only)
//   likelihood: the slot is likelier under Alice's calibrated NLoS statistics
//               than under her LoS ones and the spoofer's, for
//               blockage_persistence slots in a row (needs los_reference)
//   automatic:  posterior for 3-state models, likelihood otherwise
enum class BlockageTrigger { None, Oracle, Posterior, Likelihood, Automatic };

const char* to_string(DetectorKind k);
DetectorKind detector_from_string(const std::string& s);
BlockageTrigger trigger_from_string(const std::string& s);
AfterVerdict after_verdict_from_string(const std::string& s);

struct EmaSettings {
    bool enabled = false;
    double beta_normal = 0.995;
    double beta_blockage = 0.99;
    BlockageTrigger trigger = BlockageTrigger::Automatic;
    bool adapt_eve = false;      // also track the spoofer's statistics online
    double min_posterior = 0.0;  // adapt only when the target's filtered posterior reaches this
    int blockage_persistence = 3;  // likelihood trigger: consecutive NLoS-like slots required
    bool oracle_labels = false;  // ablation: adapt the true state's statistics
};

struct SessionConfig {
    DetectorKind detector = DetectorKind::Hmm2;
    /// For Sprt the first two emissions are used (Alice, Eve); pi and a are ignored.
    HmmModel model;
    EmaSettings ema;
    DecisionThresholds thresholds;
    int horizon = 50;
    AfterVerdict after_verdict = AfterVerdict::Continue;
    bool record_trace = false;
    /// Calibrated (LoS, NLoS) statistics of Alice for the likelihood trigger.
    std::optional<std::array<EmissionStats, 2>> los_reference;

    void validate() const;
};

/// What the session sees in one slot. `blocked` and `true_state` are ground
/// truth, used only by the oracle trigger and oracle-labelled ablation.
struct SlotInput {
    CsiObservation obs;
    bool blocked = false;
    int true_state = 0;
};

using SlotSource = std::function<SlotInput(int t)>;

struct LlrRecord {
    int t = 0;
    double lambda = 0.0;
    RVector posterior;  // SPRT reports (sigmoid(L), 1 - sigmoid(L))
    Verdict verdict = Verdict::Continue;
};

using LlrTrace = std::vector<LlrRecord>;

struct SessionResult {
    std::vector<Decision> decisions;  // terminal verdicts in time order
    LlrTrace trace;                   // filled when record_trace is set
    std::optional<Decision> first_decision;
    double final_lambda = 0.0;        // statistic after the last processed slot
    double final_alice_posterior = 0.5;
    int steps = 0;
    bool aborted = false;
    std::string fault;
};

/// Per-slot loop: observe -> encode -> EMA -> forward step -> ratio -> decision.
/// Numeric faults abort the session and are reported in the result.
SessionResult run_session(const SessionConfig& config, const EncoderSpec& encoder, const SlotSource& source);

void write_llr_trace(const std::filesystem::path& path, const LlrTrace& trace);

}  // namespace arpla
