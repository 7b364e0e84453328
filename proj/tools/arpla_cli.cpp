// SPDX-License-Identifier: Apache-2.0

// arpla: run scenarios, the six-scenario sweep, analytic-vs-Monte-Carlo
// comparisons, CSI export and trace validation.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "arpla/montecarlo.hpp"
#include "arpla/report.hpp"

namespace fs = std::filesystem;
using namespace arpla;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

SpooferKind parse_spoofer_flag(const std::string& s) {
    if (s == "naive") return NaiveSpoofer{};
    if (s == "moment-matching") return MomentMatchingSpoofer{};
    if (s.rfind("trace:", 0) == 0) {
        TraceSpoofer t;
        t.path = s.substr(6);
        t.replay = ReplayPolicy::Loop;
        return t;
    }
    throw ConfigError("unknown spoofer '" + s + "' (naive, moment-matching, trace:PATH)");
}

struct RunFlags {
    std::string config;
    std::string scenario;
    int trials = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out = "out";
    std::string spoofer;
    std::string format = "both";
    int threads = -1;
};

std::vector<ScenarioConfig> selected_scenarios(const RunFlags& f) {
    std::vector<ScenarioConfig> all = f.config.empty() ? std::vector<ScenarioConfig>{default_scenario()}
                                                       : load_scenarios(f.config);
    if (!f.scenario.empty()) {
        std::vector<ScenarioConfig> pick;
        for (auto& s : all)
            if (s.name == f.scenario) pick.push_back(s);
        if (pick.empty()) throw ConfigError("no scenario named '" + f.scenario + "'");
        all = std::move(pick);
    }
    for (auto& s : all) {
        if (f.trials > 0) s.trials = f.trials;
        if (f.seed_set) s.seed = f.seed;
        if (!f.spoofer.empty()) s.spoofer = parse_spoofer_flag(f.spoofer);
        if (f.threads >= 0) s.threads = f.threads;
        s.validate();
    }
    return all;
}

void write_outputs(const RunReport& rep, const RunFlags& f) {
    fs::create_directories(f.out);
    const fs::path base = fs::path(f.out) / rep.scenario;
    if (f.format == "csv" || f.format == "both") emit_report(rep, ReportFormat::Csv, base.string() + ".csv");
    if (f.format == "json-lines" || f.format == "both")
        emit_report(rep, ReportFormat::JsonLines, base.string() + ".jsonl");
}

void print_summary(const RunReport& r) {
    std::printf("%-20s auc=%.4f  t_alice=%.2f t_eve=%.2f  t_ok alice=%.2f eve=%.2f  dec/T alice=%.2f eve=%.2f  faults=%zu\n",
                r.scenario.c_str(), r.roc.auc, r.alice.mean_first_decision_time, r.eve.mean_first_decision_time,
                r.alice.mean_first_correct_time, r.eve.mean_first_correct_time,
                r.alice.mean_decisions_in_horizon, r.eve.mean_decisions_in_horizon, r.faults.size());
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config, "scenario file (YAML, one document per scenario)");
    cmd->add_option("--trials", f.trials, "trials per identity (overrides the config)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&f](std::uint64_t s) { f.seed = s, f.seed_set = true; }, "master seed (overrides the config)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--spoofer", f.spoofer, "naive | moment-matching | trace:PATH");
    cmd->add_option("--format", f.format, "csv | json-lines | both")->check(CLI::IsMember({"csv", "json-lines", "both"}));
    cmd->add_option("--threads", f.threads, "worker threads (0: all cores)");
}

int cmd_analyze(int states, int horizon, int trials, std::uint64_t seed, double gamma0, const std::string& out) {
    const HmmModel model = synthetic_equal_cov_model(states, 16, states == 2 ? 2.0 : 3.0, seed);
    std::vector<analysis::OperatingPoint> analytic;
    if (states == 2) {
        DecisionThresholds thr;
        thr.gamma0 = gamma0;
        analytic = analysis::pdf_cdf_recursion_2state(model, thr, horizon).curve;
    } else {
        analytic = analysis::pfa_pd_3state(gamma0, model, horizon).points;
    }
    const HmmTrajectories traj = simulate_hmm(model, horizon, trials, derive_seed(seed, 0xA7A1, 0));
    const auto empirical = empirical_operating_curve(traj, model, gamma0);
    std::vector<CurveRecord> recs;
    double worst = 0.0;
    std::printf("%4s %10s %10s %10s %10s\n", "t", "pfa_an", "pfa_mc", "pd_an", "pd_mc");
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const auto& a = analytic[i];
        const auto& e = empirical[i];
        recs.push_back({a.t, a.p_fa, a.p_d, "analytic"});
        recs.push_back({e.t, e.p_fa, e.p_d, "monte-carlo"});
        worst = std::max({worst, std::abs(a.p_fa - e.p_fa), std::abs(a.p_d - e.p_d)});
        std::printf("%4d %10.5f %10.5f %10.5f %10.5f\n", a.t, a.p_fa, e.p_fa, a.p_d, e.p_d);
    }
    std::printf("max |analytic - monte-carlo| = %.5f\n", worst);
    if (!out.empty()) write_curves_jsonl(out, recs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arpla: adversarially robust physical-layer authentication toolkit"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "run scenarios from a config file");
    add_run_flags(run, run_flags);
    run->add_option("--scenario", run_flags.scenario, "scenario name within the config");

    RunFlags sweep_flags;
    int sweep_seeds = 1;
    auto* sweep = app.add_subcommand("sweep", "six-scenario battery (hmm2/hmm3, LoS/blockage, EMA on/off)");
    add_run_flags(sweep, sweep_flags);
    sweep->add_option("--seeds", sweep_seeds, "number of consecutive master seeds to average over")->check(CLI::PositiveNumber);

    int an_states = 2, an_horizon = 20, an_trials = 100000;
    std::uint64_t an_seed = 1;
    double an_gamma0 = -std::log(19.0);
    std::string an_out;
    auto* analyze = app.add_subcommand("analyze", "analytic P_FA/P_D curves against Monte Carlo");
    analyze->add_option("--states", an_states, "2 or 3")->check(CLI::IsMember({2, 3}));
    analyze->add_option("--horizon", an_horizon)->check(CLI::PositiveNumber);
    analyze->add_option("--trials", an_trials)->check(CLI::PositiveNumber);
    analyze->add_option("--seed", an_seed);
    analyze->add_option("--gamma0", an_gamma0);
    analyze->add_option("--out", an_out, "write curves as json-lines");

    std::string ex_config, ex_out;
    int ex_n = 10000;
    auto* exp = app.add_subcommand("export-csi", "export Alice CSI observations as a trace");
    exp->add_option("--config", ex_config, "scenario file; the first document is used");
    exp->add_option("--n", ex_n, "number of observations")->check(CLI::NonNegativeNumber);
    exp->add_option("--out", ex_out)->required();

    std::string vt_path;
    auto* vt = app.add_subcommand("validate-trace", "check a CSI trace file");
    vt->add_option("--path", vt_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) {
            for (const auto& sc : selected_scenarios(run_flags)) {
                const RunReport rep = run_scenario(sc);
                write_outputs(rep, run_flags);
                print_summary(rep);
            }
        } else if (*sweep) {
            RunFlags f = sweep_flags;
            f.scenario.clear();
            const ScenarioConfig base = selected_scenarios(f).front();
            std::vector<double> auc_sum(6, 0.0);
            std::vector<std::string> names;
            for (int k = 0; k < sweep_seeds; ++k) {
                ScenarioConfig b = base;
                b.seed = base.seed + static_cast<std::uint64_t>(k);
                const auto battery = six_scenario_sweep(b);
                for (std::size_t i = 0; i < battery.size(); ++i) {
                    RunReport rep = run_scenario(battery[i]);
                    if (sweep_seeds > 1) rep.scenario += "-seed" + std::to_string(b.seed);
                    write_outputs(rep, f);
                    print_summary(rep);
                    auc_sum[i] += rep.roc.auc;
                    if (k == 0) names.push_back(battery[i].name);
                }
            }
            if (sweep_seeds > 1)
                for (std::size_t i = 0; i < names.size(); ++i)
                    std::printf("%-20s mean auc over %d seeds = %.4f\n", names[i].c_str(), sweep_seeds,
                                auc_sum[i] / sweep_seeds);
        } else if (*analyze) {
            return cmd_analyze(an_states, an_horizon, an_trials, an_seed, an_gamma0, an_out);
        } else if (*exp) {
            const ScenarioConfig sc = ex_config.empty() ? default_scenario() : load_scenarios(ex_config).front();
            export_csi_dataset(sc, ex_n, ex_out);
            std::printf("wrote %d observations to %s\n", ex_n, ex_out.c_str());
        } else if (*vt) {
            const CsiTrace t = read_csi_trace(fs::path(vt_path));
            std::printf("ok: %zu records, %d x %d, label '%s'\n", t.records.size(), t.header.m_r, t.header.m_t,
                        t.header.label.c_str());
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericFault& e) {
        std::cerr << "numeric fault: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
