// SPDX-License-Identifier: Apache-2.0

#include "arpla/csi_trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace arpla {

using json = nlohmann::ordered_json;

namespace {

std::vector<double> flatten(const CMatrix& m, bool real_part) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v.push_back(real_part ? m(i, j).real() : m(i, j).imag());
    return v;
}

int require_int(const json& j, const char* key, std::size_t line) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) throw TraceError(std::string("missing integer field '") + key + "'", line);
    return j.at(key).get<int>();
}

std::vector<double> require_array(const json& j, const char* key, std::size_t expected, std::size_t line) {
    if (!j.contains(key) || !j.at(key).is_array()) throw TraceError(std::string("missing array field '") + key + "'", line);
    const auto& a = j.at(key);
    if (a.size() != expected)
        throw TraceError(std::string("field '") + key + "' has " + std::to_string(a.size()) + " entries, expected " +
                             std::to_string(expected),
                         line);
    std::vector<double> v;
    v.reserve(expected);
    for (const auto& x : a) {
        if (!x.is_number()) throw TraceError(std::string("non-numeric entry in '") + key + "'", line);
        const double d = x.get<double>();
        if (!std::isfinite(d)) throw TraceError("non-finite CSI entry", line);
        v.push_back(d);
    }
    return v;
}

}  // namespace

void write_csi_trace(std::ostream& out, const CsiTrace& trace) {
    const auto& h = trace.header;
    json head = {{"version", h.version}, {"m_t", h.m_t}, {"m_r", h.m_r}, {"label", h.label}};
    head["meta"] = json::parse(h.meta_json.empty() ? "{}" : h.meta_json);
    out << head.dump() << '\n';
    for (const auto& r : trace.records) {
        if (r.h_hat.rows() != h.m_r || r.h_hat.cols() != h.m_t)
            throw DimensionError("record at t=" + std::to_string(r.t) + " does not match the trace header");
        json rec = {{"t", r.t}, {"re", flatten(r.h_hat, true)}, {"im", flatten(r.h_hat, false)}};
        out << rec.dump() << '\n';
    }
}

void write_csi_trace(const std::filesystem::path& path, const CsiTrace& trace) {
    std::ofstream out(path);
    if (!out) throw TraceError("cannot open '" + path.string() + "' for writing", 0);
    write_csi_trace(out, trace);
    if (!out) throw TraceError("write failed for '" + path.string() + "'", 0);
}

CsiTrace read_csi_trace(std::istream& in) {
    CsiTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw TraceError(std::string("parse error: ") + e.what(), line_no);
        }
        if (!j.is_object()) throw TraceError("expected a JSON object", line_no);
        if (!have_header) {
            auto& h = trace.header;
            h.version = require_int(j, "version", line_no);
            if (h.version != kTraceVersion) throw TraceError("unsupported trace version " + std::to_string(h.version), line_no);
            h.m_t = require_int(j, "m_t", line_no);
            h.m_r = require_int(j, "m_r", line_no);
            if (h.m_t < 1 || h.m_r < 1) throw TraceError("antenna counts must be >= 1", line_no);
            h.label = j.value("label", "");
            h.meta_json = j.contains("meta") ? j.at("meta").dump() : "{}";
            have_header = true;
            continue;
        }
        const auto n = static_cast<std::size_t>(trace.header.m_r * trace.header.m_t);
        CsiObservation obs;
        obs.t = require_int(j, "t", line_no);
        const auto re = require_array(j, "re", n, line_no);
        const auto im = require_array(j, "im", n, line_no);
        obs.h_hat.resize(trace.header.m_r, trace.header.m_t);
        for (int i = 0; i < trace.header.m_r; ++i)
            for (int k = 0; k < trace.header.m_t; ++k) {
                const auto idx = static_cast<std::size_t>(i * trace.header.m_t + k);
                obs.h_hat(i, k) = Complex(re[idx], im[idx]);
            }
        trace.records.push_back(std::move(obs));
    }
    if (!have_header) throw TraceError("missing header record", line_no == 0 ? 1 : line_no);
    return trace;
}

CsiTrace read_csi_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw TraceError("cannot open '" + path.string() + "'", 0);
    return read_csi_trace(in);
}

}  // namespace arpla
