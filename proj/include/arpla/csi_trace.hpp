// SPDX-License-Identifier: Apache-2.0

// Line-delimited CSI trace files.
//
//   line 1:  {"version":1,"m_t":4,"m_r":4,"label":"alice","meta":{...}}
//   line k:  {"t":12,"re":[...m_r*m_t...],"im":[...]}
//
// Arrays are row-major. Numbers are written in shortest round-trip decimal
// form, so export followed by import reproduces every double bit for bit.
// "meta" is optional and free-form (generator metadata, channel params, seed).

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "arpla/channel.hpp"

namespace arpla {

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
    int version = kTraceVersion;
    int m_t = 0;
    int m_r = 0;
    std::string label;
    std::string meta_json = "{}";  // serialized JSON object
};

struct CsiTrace {
    TraceHeader header;
    std::vector<CsiObservation> records;
};

void write_csi_trace(std::ostream& out, const CsiTrace& trace);
void write_csi_trace(const std::filesystem::path& path, const CsiTrace& trace);

/// Parses and validates a trace. Empty record lists are accepted here; callers
/// that need records check for themselves.
CsiTrace read_csi_trace(std::istream& in);
CsiTrace read_csi_trace(const std::filesystem::path& path);

}  // namespace arpla
