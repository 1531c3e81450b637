#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tamio {

enum class MsgKind { Metadata, Data };
enum class MsgPhase { Intra, Inter };

// One simulated point-to-point transfer. Self-deliveries are tracked in
// counters only and never appear as Messages.
struct Message {
    int src = 0;
    int dst = 0;
    MsgKind kind = MsgKind::Metadata;
    std::uint64_t bytes = 0;
    MsgPhase phase = MsgPhase::Intra;
    int round = 0;

    friend bool operator==(const Message&, const Message&) = default;
};

// Wire size of a request-metadata message: 8-byte count header plus 16 bytes
// per offset-length pair.
inline std::uint64_t metadata_bytes(std::uint64_t pairs) { return 8 + 16 * pairs; }

// Canonical trace order: phase, then (round, src, dst), metadata before data.
void sort_trace(std::vector<Message>& trace);

// One JSON object per line.
void write_trace_jsonl(const std::string& path, const std::vector<Message>& trace);

const char* to_string(MsgKind kind);
const char* to_string(MsgPhase phase);

}  // namespace tamio
