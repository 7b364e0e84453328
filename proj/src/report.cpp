// SPDX-License-Identifier: Apache-2.0

#include "arpla/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace arpla {

namespace {

using ojson = nlohmann::ordered_json;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::pair<std::string, std::string>> summary_fields(const RunReport& r) {
    const auto ident = [&](const char* who, const IdentityStats& s) {
        const std::string p = std::string(who) + "_";
        return std::vector<std::pair<std::string, std::string>>{
            {p + "mean_first_decision_time", num(s.mean_first_decision_time)},
            {p + "mean_first_correct_time", num(s.mean_first_correct_time)},
            {p + "decided_fraction", num(s.decided_fraction)},
            {p + "correct_fraction", num(s.correct_fraction)},
            {p + "mean_decisions_in_horizon", num(s.mean_decisions_in_horizon)},
        };
    };
    std::vector<std::pair<std::string, std::string>> f{
        {"schema_version", std::to_string(RunReport::kSchemaVersion)},
        {"detector", r.detector},
        {"spoofer", r.spoofer},
        {"ema", r.ema ? "true" : "false"},
        {"seed", std::to_string(r.seed)},
        {"trials", std::to_string(r.trials)},
        {"horizon", std::to_string(r.horizon)},
        {"auc", num(r.roc.auc)},
        {"faults", std::to_string(r.faults.size())},
    };
    for (auto&& kv : ident("alice", r.alice)) f.push_back(kv);
    for (auto&& kv : ident("eve", r.eve)) f.push_back(kv);
    return f;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw TraceError("cannot open '" + path.string() + "' for writing", 0);
    return out;
}

ojson identity_json(const IdentityStats& s) {
    ojson j;
    j["mean_first_decision_time"] = s.mean_first_decision_time;
    j["mean_first_correct_time"] = s.mean_first_correct_time;
    j["decided_fraction"] = s.decided_fraction;
    j["correct_fraction"] = s.correct_fraction;
    j["mean_decisions_in_horizon"] = s.mean_decisions_in_horizon;
    return j;
}

IdentityStats identity_from(const ojson& j) {
    IdentityStats s;
    s.mean_first_decision_time = j.at("mean_first_decision_time").get<double>();
    s.mean_first_correct_time = j.at("mean_first_correct_time").get<double>();
    s.decided_fraction = j.at("decided_fraction").get<double>();
    s.correct_fraction = j.at("correct_fraction").get<double>();
    s.mean_decisions_in_horizon = j.at("mean_decisions_in_horizon").get<double>();
    return s;
}

}  // namespace

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json-lines" || s == "jsonl") return ReportFormat::JsonLines;
    throw ConfigError("unknown report format '" + s + "'");
}

int csv_summary_rows() { return static_cast<int>(summary_fields(RunReport{}).size()); }

void emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path) {
    if (report.roc.roc.empty()) throw ConfigError("report has an empty ROC");
    auto out = open_out(path);
    if (format == ReportFormat::Csv) {
        out << "record,scenario,fpr,tpr,key,value\n";
        const std::string sc = csv_escape(report.scenario);
        for (const auto& [k, v] : summary_fields(report)) out << "summary," << sc << ",,," << k << ',' << csv_escape(v) << '\n';
        for (const auto& p : report.roc.roc) out << "roc," << sc << ',' << num(p.fpr) << ',' << num(p.tpr) << ",,\n";
    } else {
        ojson s;
        s["record"] = "summary";
        s["schema_version"] = RunReport::kSchemaVersion;
        s["scenario"] = report.scenario;
        s["detector"] = report.detector;
        s["spoofer"] = report.spoofer;
        s["ema"] = report.ema;
        s["seed"] = report.seed;
        s["trials"] = report.trials;
        s["horizon"] = report.horizon;
        s["auc"] = report.roc.auc;
        s["alice"] = identity_json(report.alice);
        s["eve"] = identity_json(report.eve);
        s["faults"] = report.faults;
        out << s.dump() << '\n';
        for (const auto& p : report.roc.roc) {
            ojson j;
            j["record"] = "roc";
            j["fpr"] = p.fpr;
            j["tpr"] = p.tpr;
            out << j.dump() << '\n';
        }
        const auto samples = [&](const char* kind, const char* who, const std::vector<double>& v) {
            ojson j;
            j["record"] = kind;
            j["identity"] = who;
            j["values"] = v;
            out << j.dump() << '\n';
        };
        samples("score", "alice", report.scores_alice);
        samples("score", "eve", report.scores_eve);
        samples("posterior", "alice", report.posterior_alice);
        samples("posterior", "eve", report.posterior_eve);
    }
    if (!out) throw TraceError("write failed for '" + path.string() + "'", 0);
}

RunReport read_report_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open '" + path.string() + "'", 0);
    RunReport r;
    std::string line;
    std::size_t n = 0;
    bool have_summary = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const ojson j = ojson::parse(line);
            const auto kind = j.at("record").get<std::string>();
            if (kind == "summary") {
                if (j.at("schema_version").get<int>() != RunReport::kSchemaVersion)
                    throw TraceError("unsupported report schema version", n);
                r.scenario = j.at("scenario").get<std::string>();
                r.detector = j.at("detector").get<std::string>();
                r.spoofer = j.at("spoofer").get<std::string>();
                r.ema = j.at("ema").get<bool>();
                r.seed = j.at("seed").get<std::uint64_t>();
                r.trials = j.at("trials").get<int>();
                r.horizon = j.at("horizon").get<int>();
                r.roc.auc = j.at("auc").get<double>();
                r.alice = identity_from(j.at("alice"));
                r.eve = identity_from(j.at("eve"));
                r.faults = j.at("faults").get<std::vector<std::string>>();
                have_summary = true;
            } else if (kind == "roc") {
                r.roc.roc.push_back({j.at("fpr").get<double>(), j.at("tpr").get<double>()});
            } else if (kind == "score" || kind == "posterior") {
                const bool alice = j.at("identity").get<std::string>() == "alice";
                auto v = j.at("values").get<std::vector<double>>();
                if (kind == "score") {
                    (alice ? r.scores_alice : r.scores_eve) = std::move(v);
                } else {
                    (alice ? r.posterior_alice : r.posterior_eve) = std::move(v);
                }
            } else {
                throw TraceError("unknown record kind '" + kind + "'", n);
            }
        } catch (const nlohmann::json::exception& e) {
            throw TraceError(e.what(), n);
        }
    }
    if (!have_summary) throw TraceError("report has no summary record", 0);
    return r;
}

void write_curves_jsonl(const std::filesystem::path& path, const std::vector<CurveRecord>& records) {
    auto out = open_out(path);
    for (const auto& c : records) {
        ojson j;
        j["t"] = c.t;
        j["p_fa"] = c.p_fa;
        j["p_d"] = c.p_d;
        j["source"] = c.source;
        out << j.dump() << '\n';
    }
    if (!out) throw TraceError("write failed for '" + path.string() + "'", 0);
}

}  // namespace arpla
