// SPDX-License-Identifier: Apache-2.0

#include "arpla/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

namespace arpla {

namespace {

// seed streams; every random draw in a campaign derives from (master, stream, counter)
constexpr std::uint64_t kStreamCalAliceLos = 0xCA1A;
constexpr std::uint64_t kStreamCalAliceNlos = 0xCA1B;
constexpr std::uint64_t kStreamCalEve = 0xCA1E;
constexpr std::uint64_t kStreamAliceTrial = 0x7A11;
constexpr std::uint64_t kStreamEveTrial = 0x7E7E;
constexpr std::uint64_t kStreamVictim = 0x7F1C;

double deg(double r) { return r * 180.0 / kPi; }
double rad(double d) { return d * kPi / 180.0; }

}  // namespace

DecisionThresholds ThresholdSpec::resolve() const {
    if (wald) return wald_thresholds(wald->first, wald->second);
    explicit_thresholds.validate();
    return explicit_thresholds;
}

ChannelParams ScenarioConfig::eve_params() const { return make_eve_params(alice, eve_angle_offset); }

SpooferKind ScenarioConfig::resolved_spoofer() const {
    SpooferKind k = spoofer;
    if (auto* n = std::get_if<NaiveSpoofer>(&k)) n->eve = eve_params();
    if (auto* m = std::get_if<MomentMatchingSpoofer>(&k)) m->fallback = eve_params();
    return k;
}

void ScenarioConfig::validate() const {
    alice.validate();
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (encoder_d < 1 || encoder_d > 2 * alice.m_t * alice.m_r)
        throw ConfigError("encoder d must lie in [1, 2 * m_t * m_r]");
    if (calibration_slots < encoder_d + 1) throw ConfigError("calibration_slots must exceed the embedding dimension");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (!(reg_eps >= 0.0)) throw ConfigError("reg_eps must be >= 0");
    thresholds.resolve();
    const int n = detector == DetectorKind::Hmm3 ? 3 : 2;
    if (pi && pi->size() != n) throw ConfigError("pi override has the wrong length");
    if (a && (a->rows() != n || a->cols() != n)) throw ConfigError("transition override has the wrong shape");
    if (ema.enabled && (!(ema.beta_normal >= 0.0 && ema.beta_normal < 1.0) ||
                        !(ema.beta_blockage >= 0.0 && ema.beta_blockage < 1.0)))
        throw ConfigError("EMA forgetting factors must lie in [0,1)");
}

ScenarioConfig default_scenario() {
    ScenarioConfig c;
    c.alice.noise_var = snr_db_to_noise_var(5.0);
    return c;
}

std::vector<BlockageInterval> default_sweep_blockage() { return {{21, 29}}; }

std::vector<ScenarioConfig> six_scenario_sweep(const ScenarioConfig& base) {
    std::vector<ScenarioConfig> out;
    const auto blockage = base.alice.blockage.empty() ? default_sweep_blockage() : base.alice.blockage;
    for (bool ema : {false, true}) {
        for (int v = 0; v < 3; ++v) {
            ScenarioConfig c = base;
            c.detector = v == 2 ? DetectorKind::Hmm3 : DetectorKind::Hmm2;
            c.alice.blockage = v == 0 ? std::vector<BlockageInterval>{} : blockage;
            c.ema.enabled = ema;
            c.pi.reset();
            c.a.reset();
            c.name = std::string(v == 2 ? "hmm3" : "hmm2") + (v == 0 ? "-los" : "-blockage") + (ema ? "-ema" : "");
            out.push_back(std::move(c));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// YAML

namespace {

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) throw ConfigError("'" + where + "' must be a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
    if (const auto v = node[key]) {
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(std::string("key '") + key + "' has the wrong type");
        }
    }
}

RVector read_vector(const YAML::Node& n, const char* what) {
    if (!n.IsSequence()) throw ConfigError(std::string(what) + " must be a list");
    RVector v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v(static_cast<Eigen::Index>(i)) = n[i].as<double>();
    return v;
}

RMatrix read_matrix(const YAML::Node& n, const char* what) {
    if (!n.IsSequence() || n.size() == 0) throw ConfigError(std::string(what) + " must be a list of rows");
    const auto rows = static_cast<Eigen::Index>(n.size());
    const auto cols = static_cast<Eigen::Index>(n[0].size());
    RMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const RVector r = read_vector(n[static_cast<std::size_t>(i)], what);
        if (r.size() != cols) throw ConfigError(std::string(what) + " rows differ in length");
        m.row(i) = r.transpose();
    }
    return m;
}

void parse_channel(const YAML::Node& n, ChannelParams& p) {
    check_keys(n, "channel", {"m_t", "m_r", "rho_t", "r_tx", "r_rx", "snr_db", "noise_var", "k0", "sigma_phi",
                              "los_departure_deg", "los_arrival_deg", "blockage"});
    read(n, "m_t", p.m_t);
    read(n, "m_r", p.m_r);
    read(n, "rho_t", p.rho_t);
    read(n, "r_tx", p.r_tx);
    read(n, "r_rx", p.r_rx);
    if (n["snr_db"] && n["noise_var"]) throw ConfigError("give either snr_db or noise_var, not both");
    if (n["snr_db"]) p.noise_var = snr_db_to_noise_var(n["snr_db"].as<double>());
    read(n, "noise_var", p.noise_var);
    read(n, "k0", p.k0);
    read(n, "sigma_phi", p.sigma_phi);
    if (n["los_departure_deg"]) p.los_departure = rad(n["los_departure_deg"].as<double>());
    if (n["los_arrival_deg"]) p.los_arrival = rad(n["los_arrival_deg"].as<double>());
    if (const auto b = n["blockage"]) {
        if (!b.IsSequence()) throw ConfigError("blockage must be a list of {start, length}");
        p.blockage.clear();
        for (const auto& iv : b) {
            check_keys(iv, "blockage interval", {"start", "length"});
            BlockageInterval bi;
            read(iv, "start", bi.start);
            read(iv, "length", bi.length);
            p.blockage.push_back(bi);
        }
    }
}

void parse_spoofer(const YAML::Node& n, SpooferKind& out) {
    check_keys(n, "spoofer", {"kind", "beta_e", "observation_noise", "path", "replay", "eavesdrop_blockage"});
    std::string kind = "naive";
    read(n, "kind", kind);
    if (kind == "naive") {
        out = NaiveSpoofer{};
    } else if (kind == "moment-matching") {
        MomentMatchingSpoofer m;
        read(n, "beta_e", m.beta_e);
        read(n, "observation_noise", m.observation_noise);
        out = m;
    } else if (kind == "trace") {
        TraceSpoofer t;
        std::string path, replay = "loop";
        read(n, "path", path);
        read(n, "replay", replay);
        if (path.empty()) throw ConfigError("trace spoofer needs a path");
        t.path = path;
        if (replay == "loop") {
            t.replay = ReplayPolicy::Loop;
        } else if (replay == "sequential") {
            t.replay = ReplayPolicy::Sequential;
        } else {
            throw ConfigError("unknown replay policy '" + replay + "'");
        }
        out = t;
    } else {
        throw ConfigError("unknown spoofer kind '" + kind + "'");
    }
}

ScenarioConfig parse_node(const YAML::Node& doc) {
    ScenarioConfig c = default_scenario();
    check_keys(doc, "scenario", {"name", "seed", "trials", "horizon", "calibration_slots", "reg_eps", "threads",
                                 "count_decisions", "channel", "eve", "encoder", "detector", "transition", "ema",
                                 "spoofer", "thresholds"});
    read(doc, "name", c.name);
    read(doc, "seed", c.seed);
    read(doc, "trials", c.trials);
    read(doc, "horizon", c.horizon);
    read(doc, "calibration_slots", c.calibration_slots);
    read(doc, "reg_eps", c.reg_eps);
    read(doc, "threads", c.threads);
    read(doc, "count_decisions", c.count_decisions);
    if (const auto n = doc["channel"]) parse_channel(n, c.alice);
    if (const auto n = doc["eve"]) {
        check_keys(n, "eve", {"angle_offset_deg"});
        if (n["angle_offset_deg"]) c.eve_angle_offset = rad(n["angle_offset_deg"].as<double>());
    }
    if (const auto n = doc["encoder"]) {
        check_keys(n, "encoder", {"d", "mode", "seed"});
        read(n, "d", c.encoder_d);
        if (n["mode"]) c.encoder_mode = feature_mode_from_string(n["mode"].as<std::string>());
        read(n, "seed", c.encoder_seed);
    }
    if (doc["detector"]) c.detector = detector_from_string(doc["detector"].as<std::string>());
    if (const auto n = doc["transition"]) {
        check_keys(n, "transition", {"pi", "a"});
        if (n["pi"]) c.pi = read_vector(n["pi"], "transition.pi");
        if (n["a"]) c.a = read_matrix(n["a"], "transition.a");
    }
    if (const auto n = doc["ema"]) {
        check_keys(n, "ema", {"enabled", "beta_normal", "beta_blockage", "trigger", "adapt_eve", "oracle_labels",
                               "min_posterior", "blockage_persistence"});
        read(n, "enabled", c.ema.enabled);
        read(n, "beta_normal", c.ema.beta_normal);
        read(n, "beta_blockage", c.ema.beta_blockage);
        if (n["trigger"]) c.ema.trigger = trigger_from_string(n["trigger"].as<std::string>());
        read(n, "adapt_eve", c.ema.adapt_eve);
        read(n, "oracle_labels", c.ema.oracle_labels);
        read(n, "min_posterior", c.ema.min_posterior);
        read(n, "blockage_persistence", c.ema.blockage_persistence);
    }
    if (const auto n = doc["spoofer"]) {
        parse_spoofer(n, c.spoofer);
        read(n, "eavesdrop_blockage", c.eavesdrop_blockage);
    }
    if (const auto n = doc["thresholds"]) {
        check_keys(n, "thresholds", {"wald_alpha", "wald_beta", "gamma0", "gamma1"});
        const bool wald = n["wald_alpha"] || n["wald_beta"];
        const bool expl = n["gamma0"] || n["gamma1"];
        if (wald && expl) throw ConfigError("thresholds: give Wald targets or explicit gammas, not both");
        if (wald) {
            double a = 0.05, b = 0.05;
            read(n, "wald_alpha", a);
            read(n, "wald_beta", b);
            c.thresholds.wald = {a, b};
        }
        read(n, "gamma0", c.thresholds.explicit_thresholds.gamma0);
        read(n, "gamma1", c.thresholds.explicit_thresholds.gamma1);
    }
    c.validate();
    return c;
}

}  // namespace

ScenarioConfig parse_scenario_yaml(const std::string& text) {
    try {
        const YAML::Node doc = YAML::Load(text);
        if (!doc || doc.IsNull()) return default_scenario();
        return parse_node(doc);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("YAML: ") + e.what());
    }
}

std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::vector<ScenarioConfig> out;
    try {
        for (const auto& doc : YAML::LoadAll(in)) {
            if (!doc || doc.IsNull()) continue;
            out.push_back(parse_node(doc));
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (out.empty()) throw ConfigError("config '" + path.string() + "' holds no scenarios");
    return out;
}

// ---------------------------------------------------------------------------
// Campaign

namespace {

std::vector<Embedding> collect(int n, const EncoderSpec& enc, const std::function<CsiObservation()>& draw) {
    std::vector<Embedding> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(encode(draw(), enc));
    return out;
}

/// Runs fn(i) for i in [0, n) on a small worker pool. Results must be written
/// to slot i by fn so the reduction order never depends on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

Calibration calibrate(const ScenarioConfig& config) {
    config.validate();
    Calibration cal;
    const auto& p = config.alice;
    cal.encoder = EncoderSpec::random(config.encoder_d, p.m_r, p.m_t, config.encoder_mode, config.encoder_seed);
    const int n = config.calibration_slots;
    const double beta = config.ema.beta_normal;

    ChannelParams los = p;
    los.blockage.clear();
    ChannelSimulator los_sim(los, Identity::Alice, derive_seed(config.seed, kStreamCalAliceLos, 0));
    cal.alice_los = fit_stats_batch(collect(n, cal.encoder, [&] { return los_sim.next(); }), config.reg_eps, 0, beta);

    ChannelParams nlos = los;
    nlos.k0 = 0.0;
    ChannelSimulator nlos_sim(nlos, Identity::Alice, derive_seed(config.seed, kStreamCalAliceNlos, 0));
    cal.alice_nlos = fit_stats_batch(collect(n, cal.encoder, [&] { return nlos_sim.next(); }), config.reg_eps, 1, beta);

    const SpooferKind kind = config.resolved_spoofer();
    Spoofer spoofer(kind, derive_seed(config.seed, kStreamCalEve, 0));
    std::optional<ChannelSimulator> victim;
    Rng eaves_rng(derive_seed(config.seed, kStreamCalEve, 1));
    double eaves_noise = 0.0;
    if (const auto* m = std::get_if<MomentMatchingSpoofer>(&kind)) {
        victim.emplace(los, Identity::Alice, derive_seed(config.seed, kStreamCalEve, 2));
        eaves_noise = m->observation_noise;
    }
    const auto draw_eve = [&] {
        std::optional<CsiObservation> e;
        if (victim) {
            victim->advance();
            e = victim->observe_current(eaves_noise, eaves_rng);
        }
        return spoofer.next(e);
    };
    if (victim)
        while (!spoofer.warmed_up()) draw_eve();
    cal.eve = fit_stats_batch(collect(n, cal.encoder, draw_eve), config.reg_eps, 2, beta);
    return cal;
}

SessionConfig session_config(const ScenarioConfig& config, const Calibration& cal) {
    SessionConfig s;
    s.detector = config.detector;
    switch (config.detector) {
        case DetectorKind::Sprt:
            s.model.n_states = 2;
            s.model.emissions = {cal.alice_los, cal.eve};
            s.model.pi = Eigen::Vector2d(0.5, 0.5);
            s.model.a = Eigen::Matrix2d::Identity();
            break;
        case DetectorKind::Hmm2: s.model = default_hmm2(cal.alice_los, cal.eve); break;
        case DetectorKind::Hmm3: s.model = default_hmm3(cal.alice_los, cal.alice_nlos, cal.eve); break;
    }
    if (config.pi) s.model.pi = *config.pi;
    if (config.a) s.model.a = *config.a;
    s.ema = config.ema;
    s.thresholds = config.thresholds.resolve();
    s.horizon = config.horizon;
    s.after_verdict = AfterVerdict::Continue;
    s.los_reference = std::array<EmissionStats, 2>{cal.alice_los, cal.alice_nlos};
    s.validate();
    return s;
}

RunReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    const Calibration cal = calibrate(config);
    const SessionConfig base = session_config(config, cal);
    const SpooferKind kind = config.resolved_spoofer();
    std::shared_ptr<const SpoofTrace> trace;
    if (const auto* t = std::get_if<TraceSpoofer>(&kind)) {
        trace = std::make_shared<const SpoofTrace>(load_trace(t->path));
        if (trace->m_t != config.alice.m_t || trace->m_r != config.alice.m_r)
            throw DimensionError("trace dimensions do not match the scenario's antenna counts");
    }
    const int n_states = base.model.n_states;
    const int eve_state = n_states - 1;
    const int trials = config.trials;

    const auto alice_source = [&](int i) {
        auto sim = std::make_shared<ChannelSimulator>(config.alice, Identity::Alice,
                                                      derive_seed(config.seed, kStreamAliceTrial, static_cast<std::uint64_t>(i)));
        return SlotSource([sim, &config, n_states](int) {
            SlotInput in;
            in.obs = sim->next();
            in.blocked = config.alice.blocked(in.obs.t);
            in.true_state = (n_states == 3 && in.blocked) ? 1 : 0;
            return in;
        });
    };
    const auto eve_source = [&](int i) {
        const auto iu = static_cast<std::uint64_t>(i);
        auto sp = std::make_shared<Spoofer>(kind, derive_seed(config.seed, kStreamEveTrial, iu), trace);
        if (trace) sp->seek(static_cast<std::size_t>(i) * static_cast<std::size_t>(config.horizon));
        std::shared_ptr<ChannelSimulator> victim;
        auto rng = std::make_shared<Rng>(derive_seed(config.seed, kStreamVictim, 2 * iu + 1));
        double noise = 0.0;
        if (const auto* m = std::get_if<MomentMatchingSpoofer>(&kind)) {
            ChannelParams vp = config.alice;
            if (!config.eavesdrop_blockage) vp.blockage.clear();
            victim = std::make_shared<ChannelSimulator>(vp, Identity::Alice,
                                                        derive_seed(config.seed, kStreamVictim, 2 * iu));
            noise = m->observation_noise;
        }
        // Eve listens until her fit is warmed up before she starts transmitting
        while (victim && !sp->warmed_up()) {
            victim->advance();
            sp->next(victim->observe_current(noise, *rng));
        }
        return SlotSource([sp, victim, rng, noise, &config, eve_state](int t) {
            std::optional<CsiObservation> e;
            if (victim) {
                victim->advance();
                e = victim->observe_current(noise, *rng);
            }
            SlotInput in;
            in.obs = sp->next(e);
            in.obs.t = t;
            in.blocked = config.alice.blocked(t);
            in.true_state = eve_state;
            return in;
        });
    };

    struct TrialOut {
        SessionResult main;
        int correct_decisions = 0;
        std::string error;
    };
    std::vector<TrialOut> out_a(static_cast<std::size_t>(trials)), out_e(static_cast<std::size_t>(trials));
    const auto run_one = [&](int i, bool alice, TrialOut& slot) {
        try {
            slot.main = run_session(base, cal.encoder, alice ? alice_source(i) : eve_source(i));
            if (config.count_decisions) {
                SessionConfig reset = base;
                reset.after_verdict = AfterVerdict::Reset;
                const SessionResult r = run_session(reset, cal.encoder, alice ? alice_source(i) : eve_source(i));
                const Verdict want = alice ? Verdict::Alice : Verdict::Eve;
                slot.correct_decisions = static_cast<int>(
                    std::count_if(r.decisions.begin(), r.decisions.end(), [&](const Decision& d) { return d.verdict == want; }));
            }
        } catch (const Error& e) {
            slot.error = e.what();
        }
    };
    parallel_for(2 * trials, config.threads, [&](int k) {
        const int i = k / 2;
        const bool alice = k % 2 == 0;
        run_one(i, alice, alice ? out_a[static_cast<std::size_t>(i)] : out_e[static_cast<std::size_t>(i)]);
    });

    RunReport rep;
    rep.scenario = config.name;
    rep.detector = to_string(config.detector);
    rep.spoofer = spoofer_name(kind);
    rep.ema = config.ema.enabled;
    rep.seed = config.seed;
    rep.trials = trials;
    rep.horizon = config.horizon;

    std::vector<std::string> errors;
    const auto reduce = [&](const std::vector<TrialOut>& outs, bool alice, std::vector<double>& scores,
                            std::vector<double>& post, IdentityStats& st) {
        const char* who = alice ? "alice" : "eve";
        const Verdict want = alice ? Verdict::Alice : Verdict::Eve;
        double time_sum = 0.0, correct_time_sum = 0.0, decided = 0.0, correct = 0.0, count = 0.0;
        for (std::size_t i = 0; i < outs.size(); ++i) {
            const auto& o = outs[i];
            if (!o.error.empty()) {
                errors.push_back(std::string(who) + " trial " + std::to_string(i) + ": " + o.error);
                continue;
            }
            // an aborted session has no meaningful score; it still counts as undecided below
            if (o.main.aborted)
                rep.faults.push_back(std::string(who) + " trial " + std::to_string(i) + ": " + o.main.fault);
            else {
                scores.push_back(o.main.final_lambda);
                post.push_back(o.main.final_alice_posterior);
            }
            if (o.main.first_decision) {
                time_sum += o.main.first_decision->t;
                decided += 1.0;
                if (o.main.first_decision->verdict == want) correct += 1.0;
            } else {
                time_sum += config.horizon + 1;
            }
            const auto hit = std::find_if(o.main.decisions.begin(), o.main.decisions.end(),
                                          [&](const Decision& d) { return d.verdict == want; });
            correct_time_sum += hit != o.main.decisions.end() ? hit->t : config.horizon + 1;
            count += o.correct_decisions;
        }
        const double n = static_cast<double>(outs.size());
        st.mean_first_decision_time = time_sum / n;
        st.mean_first_correct_time = correct_time_sum / n;
        st.decided_fraction = decided / n;
        st.correct_fraction = correct / n;
        st.mean_decisions_in_horizon = count / n;
    };
    reduce(out_a, true, rep.scores_alice, rep.posterior_alice, rep.alice);
    reduce(out_e, false, rep.scores_eve, rep.posterior_eve, rep.eve);
    if (!errors.empty())
        throw Error(std::to_string(errors.size()) + " trial(s) failed in scenario '" + config.name + "'; first: " + errors.front());
    if (rep.scores_alice.empty() || rep.scores_eve.empty())
        throw NumericFault("every " + std::string(rep.scores_alice.empty() ? "alice" : "eve") + " trial faulted in scenario '" +
                           config.name + "'; first: " + rep.faults.front());
    rep.roc = compute_roc_auc(rep.scores_alice, rep.scores_eve);
    return rep;
}

void export_csi_dataset(const ScenarioConfig& config, int n, const std::filesystem::path& path) {
    if (n < 0) throw ConfigError("sample count must be >= 0");
    config.alice.validate();
    CsiTrace trace;
    trace.header.m_t = config.alice.m_t;
    trace.header.m_r = config.alice.m_r;
    trace.header.label = "alice";
    nlohmann::ordered_json meta;
    meta["scenario"] = config.name;
    meta["seed"] = config.seed;
    meta["rho_t"] = config.alice.rho_t;
    meta["r_tx"] = config.alice.r_tx;
    meta["r_rx"] = config.alice.r_rx;
    meta["noise_var"] = config.alice.noise_var;
    meta["k0"] = config.alice.k0;
    meta["sigma_phi"] = config.alice.sigma_phi;
    meta["los_departure_deg"] = deg(config.alice.los_departure);
    meta["los_arrival_deg"] = deg(config.alice.los_arrival);
    nlohmann::ordered_json blk = nlohmann::ordered_json::array();
    for (const auto& b : config.alice.normalized_blockage()) blk.push_back({{"start", b.start}, {"length", b.length}});
    meta["blockage"] = blk;
    trace.header.meta_json = meta.dump();
    ChannelSimulator sim(config.alice, Identity::Alice, config.seed);
    trace.records.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) trace.records.push_back(sim.next());
    write_csi_trace(path, trace);
}

}  // namespace arpla
