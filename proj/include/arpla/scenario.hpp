// SPDX-License-Identifier: Apache-2.0

// Scenario configuration and the Monte Carlo campaign runner.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arpla/adversary.hpp"
#include "arpla/metrics.hpp"
#include "arpla/session.hpp"

namespace arpla {

struct ThresholdSpec {
    std::optional<std::pair<double, double>> wald;  // (alpha, beta) targets
    DecisionThresholds explicit_thresholds;          // used when wald is unset

    DecisionThresholds resolve() const;
};

struct ScenarioConfig {
    std::string name = "default";
    ChannelParams alice;
    double eve_angle_offset = 30.0 * kPi / 180.0;  // [rad]
    int encoder_d = 16;
    FeatureMode encoder_mode = FeatureMode::RealImag;
    std::uint64_t encoder_seed = 7;
    DetectorKind detector = DetectorKind::Hmm2;
    std::optional<RVector> pi;  // overrides the detector's default prior
    std::optional<RMatrix> a;   // overrides the detector's default transitions
    EmaSettings ema;
    SpooferKind spoofer = NaiveSpoofer{};  // NaiveSpoofer::eve is filled from alice + offset
    // Moment-matching: whether Eve's eavesdropped copy of Alice's channel goes
    // through the same blockage as the Alice-Bob link. Off by default: the
    // obstacle sits on Bob's path, and Eve keeps emitting the distribution she
    // learned while the link was clear.
    bool eavesdrop_blockage = false;
    ThresholdSpec thresholds;
    int horizon = 50;
    int trials = 2000;
    std::uint64_t seed = 1;
    int calibration_slots = 200;
    double reg_eps = 1e-6;
    int threads = 0;  // 0: hardware concurrency
    bool count_decisions = true;  // extra pass with reset-after-verdict

    void validate() const;
    ChannelParams eve_params() const;
    /// The spoofer with the naive channel / fallback resolved from the scenario.
    SpooferKind resolved_spoofer() const;
};

/// Baseline: M = 4, rho_t = 0.7, d = 16, K0 = 10, SNR 5 dB, naive spoofer.
ScenarioConfig default_scenario();

/// Every YAML document in the file is one scenario; missing keys keep defaults.
std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& path);
ScenarioConfig parse_scenario_yaml(const std::string& text);

/// Blockage schedule used by the sweep when the base scenario does not set one.
std::vector<BlockageInterval> default_sweep_blockage();

/// hmm2-los, hmm2-blockage, hmm3-blockage and their EMA variants.
std::vector<ScenarioConfig> six_scenario_sweep(const ScenarioConfig& base);

struct IdentityStats {
    double mean_first_decision_time = 0.0;  // undecided trials count as horizon + 1
    double mean_first_correct_time = 0.0;   // first verdict naming the true identity; censored the same way
    double decided_fraction = 0.0;
    double correct_fraction = 0.0;           // first decision names the true identity
    double mean_decisions_in_horizon = 0.0;  // reset-after-verdict pass, correct verdicts only
};

struct RunReport {
    static constexpr int kSchemaVersion = 1;
    std::string scenario;
    std::string detector;
    std::string spoofer;
    bool ema = false;
    std::uint64_t seed = 0;
    int trials = 0;
    int horizon = 0;
    RocResult roc;
    std::vector<double> scores_alice;  // Lambda at the horizon
    std::vector<double> scores_eve;
    std::vector<double> posterior_alice;  // final P(Alice) samples
    std::vector<double> posterior_eve;
    IdentityStats alice;
    IdentityStats eve;
    std::vector<std::string> faults;  // "<identity> trial <i>: <message>"
};

/// Calibrated emission statistics, indexed like the detector's states.
struct Calibration {
    EncoderSpec encoder;
    EmissionStats alice_los;
    EmissionStats alice_nlos;
    EmissionStats eve;
};

Calibration calibrate(const ScenarioConfig& config);
SessionConfig session_config(const ScenarioConfig& config, const Calibration& cal);

RunReport run_scenario(const ScenarioConfig& config);

/// n Alice observations in the CSI trace format; header carries params and seed.
void export_csi_dataset(const ScenarioConfig& config, int n, const std::filesystem::path& path);

}  // namespace arpla
