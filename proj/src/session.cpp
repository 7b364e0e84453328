// SPDX-License-Identifier: Apache-2.0

#include "arpla/session.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include <json.hpp>

namespace arpla {

const char* to_string(DetectorKind k) {
    switch (k) {
        case DetectorKind::Sprt: return "sprt";
        case DetectorKind::Hmm2: return "hmm2";
        case DetectorKind::Hmm3: break;
    }
    return "hmm3";
}

DetectorKind detector_from_string(const std::string& s) {
    if (s == "sprt") return DetectorKind::Sprt;
    if (s == "hmm2") return DetectorKind::Hmm2;
    if (s == "hmm3") return DetectorKind::Hmm3;
    throw ConfigError("unknown detector '" + s + "'");
}

BlockageTrigger trigger_from_string(const std::string& s) {
    if (s == "none") return BlockageTrigger::None;
    if (s == "oracle") return BlockageTrigger::Oracle;
    if (s == "posterior") return BlockageTrigger::Posterior;
    if (s == "likelihood") return BlockageTrigger::Likelihood;
    if (s == "automatic") return BlockageTrigger::Automatic;
    throw ConfigError("unknown blockage trigger '" + s + "'");
}

AfterVerdict after_verdict_from_string(const std::string& s) {
    if (s == "halt") return AfterVerdict::Halt;
    if (s == "reset") return AfterVerdict::Reset;
    if (s == "continue") return AfterVerdict::Continue;
    throw ConfigError("unknown after-verdict policy '" + s + "'");
}

namespace {

BlockageTrigger effective_trigger(const SessionConfig& c) {
    if (c.ema.trigger != BlockageTrigger::Automatic) return c.ema.trigger;
    return c.detector == DetectorKind::Hmm3 ? BlockageTrigger::Posterior : BlockageTrigger::Likelihood;
}

}  // namespace

void SessionConfig::validate() const {
    thresholds.validate();
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (detector == DetectorKind::Sprt) {
        if (model.emissions.size() < 2) throw ConfigError("SPRT needs Alice and Eve emission statistics");
    } else {
        model.validate();
        const int want = detector == DetectorKind::Hmm2 ? 2 : 3;
        if (model.n_states != want) throw ConfigError("detector and model state counts differ");
    }
    if (ema.enabled) {
        if (!(ema.beta_normal >= 0.0 && ema.beta_normal < 1.0) || !(ema.beta_blockage >= 0.0 && ema.beta_blockage < 1.0))
            throw ConfigError("EMA forgetting factors must lie in [0,1)");
        if (effective_trigger(*this) == BlockageTrigger::Likelihood && !los_reference)
            throw ConfigError("likelihood blockage trigger needs calibrated LoS/NLoS statistics");
        if (ema.blockage_persistence < 1) throw ConfigError("blockage_persistence must be >= 1");
        if (ema.trigger == BlockageTrigger::Posterior && model.n_states != 3)
            throw ConfigError("posterior blockage trigger needs a 3-state model");
    }
}

namespace {

class Detector {
  public:
    explicit Detector(const SessionConfig& cfg) : cfg_(cfg) {
        const bool sprt = cfg.detector == DetectorKind::Sprt;
        n_ = sprt ? 2 : cfg.model.n_states;
        stats_.assign(cfg.model.emissions.begin(), cfg.model.emissions.begin() + n_);
        for (const auto& s : stats_) dens_.emplace_back(s);
        if (!sprt) {
            log_pi_ = cfg.model.pi.unaryExpr([](double p) { return safe_log(p); });
            log_a_ = cfg.model.a.unaryExpr([](double p) { return safe_log(p); });
            fwd_ = initial_forward_state(cfg.model);
        }
    }

    bool sprt() const { return cfg_.detector == DetectorKind::Sprt; }

    /// Distribution of S_t before seeing z_t.
    RVector predictive() const {
        if (sprt()) {
            const double p = sigmoid(cum_);
            return Eigen::Vector2d(p, 1.0 - p);
        }
        if (fwd_.t == 0) return cfg_.model.pi;
        return cfg_.model.a.transpose() * fwd_.posterior();
    }

    RVector posterior() const {
        if (sprt()) {
            const double p = sigmoid(cum_);
            return Eigen::Vector2d(p, 1.0 - p);
        }
        return fwd_.posterior();
    }

    /// Filtered P(S_t = k | z_1..t) under the current statistics, without
    /// committing the step. Used to pick which state's statistics to adapt.
    RVector filtered(const Embedding& z) const {
        RVector lp = predictive().unaryExpr([](double p) { return safe_log(p); });
        for (int k = 0; k < n_; ++k) lp(k) += dens_[static_cast<std::size_t>(k)].log_pdf(z.z);
        const double lse = log_sum_exp(lp);
        if (!std::isfinite(lse)) throw NumericFault("observation impossible under every state");
        return (lp.array() - lse).exp();
    }

    double log_pdf(int state, const Embedding& z) const { return dens_[static_cast<std::size_t>(state)].log_pdf(z.z); }

    void adapt(int state, double beta, const Embedding& z) {
        auto& s = stats_[static_cast<std::size_t>(state)];
        s.beta = beta;
        s = ema_update(s, z);
        dens_[static_cast<std::size_t>(state)] = GaussianDensity(s);
    }

    double step(const Embedding& z) {
        if (sprt()) {
            cum_ += dens_[0].log_pdf(z.z) - dens_[1].log_pdf(z.z);
            return cum_;
        }
        RVector loglik(n_);
        for (int k = 0; k < n_; ++k) loglik(k) = dens_[static_cast<std::size_t>(k)].log_pdf(z.z);
        fwd_ = hmm_forward_step(fwd_, log_pi_, log_a_, loglik);
        return fwd_.lambda;
    }

    void reset() {
        cum_ = 0.0;
        if (!sprt()) fwd_ = initial_forward_state(cfg_.model);
    }

    int n_states() const { return n_; }
    bool is_alice_state(int k) const { return k < n_ - 1; }

  private:
    const SessionConfig& cfg_;
    int n_ = 2;
    std::vector<EmissionStats> stats_;
    std::vector<GaussianDensity> dens_;
    RVector log_pi_;
    RMatrix log_a_;
    ForwardState fwd_;
    double cum_ = 0.0;
};

}  // namespace

SessionResult run_session(const SessionConfig& config, const EncoderSpec& encoder, const SlotSource& source) {
    config.validate();
    SessionResult result;
    std::optional<Detector> det_slot;
    try {
        det_slot.emplace(config);
    } catch (const NumericFault& e) {
        result.aborted = true;
        result.fault = e.what();
        return result;
    }
    Detector& det = *det_slot;
    const BlockageTrigger trigger = config.ema.enabled ? effective_trigger(config) : BlockageTrigger::None;
    std::vector<GaussianDensity> los_nlos;
    int nlos_run = 0;
    double lambda = 0.0;
    try {
        if (trigger == BlockageTrigger::Likelihood)
            for (const auto& s : *config.los_reference) los_nlos.emplace_back(s);
        for (int t = 1; t <= config.horizon; ++t) {
            const SlotInput in = source(t);
            Embedding z = encode(in.obs, encoder);
            z.t = t;

            if (config.ema.enabled) {
                int target = 0;
                const RVector post = det.filtered(z);
                post.maxCoeff(&target);
                bool blockage = false;
                switch (trigger) {
                    case BlockageTrigger::Oracle: blockage = in.blocked; break;
                    case BlockageTrigger::Posterior: blockage = post(1) > 0.5; break;
                    case BlockageTrigger::Likelihood: {
                        // Alice's calibrated NLoS statistics must explain the slot
                        // better than both her LoS statistics and the spoofer's
                        const double l_nlos = los_nlos[1].log_pdf(z.z);
                        const bool nlos_like =
                            l_nlos > los_nlos[0].log_pdf(z.z) && l_nlos > det.log_pdf(det.n_states() - 1, z);
                        nlos_run = nlos_like ? nlos_run + 1 : 0;
                        blockage = nlos_run >= config.ema.blockage_persistence;
                        break;
                    }
                    default: break;
                }
                // a detected blockage is a change of the legitimate link, so it
                // is Alice's NLoS-capable state that follows it
                if (blockage) target = det.n_states() == 3 ? 1 : 0;
                if (config.ema.oracle_labels) target = std::min(in.true_state, det.n_states() - 1);
                const bool confident = blockage || post(target) >= config.ema.min_posterior;
                if (confident && (det.is_alice_state(target) || config.ema.adapt_eve))
                    det.adapt(target, blockage ? config.ema.beta_blockage : config.ema.beta_normal, z);
            }

            lambda = det.step(z);
            const Decision d = decide(lambda, t, config.thresholds);
            result.steps = t;
            if (config.record_trace) result.trace.push_back({t, lambda, det.posterior(), d.verdict});
            if (d.verdict != Verdict::Continue) {
                result.decisions.push_back(d);
                if (!result.first_decision) result.first_decision = d;
                if (config.after_verdict == AfterVerdict::Halt) break;
                if (config.after_verdict == AfterVerdict::Reset) det.reset();
            }
        }
    } catch (const NumericFault& e) {
        result.aborted = true;
        result.fault = e.what();
    }
    result.final_lambda = lambda;
    result.final_alice_posterior = sigmoid(lambda);
    return result;
}

void write_llr_trace(const std::filesystem::path& path, const LlrTrace& trace) {
    using json = nlohmann::ordered_json;
    std::ofstream out(path);
    if (!out) throw TraceError("cannot open '" + path.string() + "' for writing", 0);
    for (const auto& r : trace) {
        std::vector<double> post(r.posterior.data(), r.posterior.data() + r.posterior.size());
        json j;
        j["t"] = r.t;
        j["lambda"] = r.lambda;
        j["posterior"] = post;
        j["verdict"] = to_string(r.verdict);
        out << j.dump() << '\n';
    }
    if (!out) throw TraceError("write failed for '" + path.string() + "'", 0);
}

}  // namespace arpla
