#include "tamio/message.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "tamio/error.hpp"

#include <nlohmann/json.hpp>

namespace tamio {

void sort_trace(std::vector<Message>& trace) {
    std::sort(trace.begin(), trace.end(), [](const Message& a, const Message& b) {
        return std::tuple(a.phase, a.round, a.src, a.dst, a.kind) <
               std::tuple(b.phase, b.round, b.src, b.dst, b.kind);
    });
}

void write_trace_jsonl(const std::string& path, const std::vector<Message>& trace) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw config_error("cannot open trace file " + path);
    for (const auto& m : trace) {
        nlohmann::json j{{"phase", to_string(m.phase)}, {"round", m.round},
                         {"src", m.src},               {"dst", m.dst},
                         {"kind", to_string(m.kind)},  {"bytes", m.bytes}};
        out << j.dump() << '\n';
    }
}

const char* to_string(MsgKind kind) { return kind == MsgKind::Metadata ? "metadata" : "data"; }

const char* to_string(MsgPhase phase) { return phase == MsgPhase::Intra ? "intra" : "inter"; }

}  // namespace tamio
