#pragma once

#include "vsg/judge.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace vsg {

/// Bidirectional line-oriented byte stream.
class LineChannel {
public:
    virtual ~LineChannel() = default;
    /// Writes `line` followed by '\n'. Throws IoError.
    virtual void write_line(std::string_view line) = 0;
    /// Next line without its terminator, or nullopt at end of stream.
    virtual std::optional<std::string> read_line() = 0;
};

/// Spawns `/bin/sh -c command` and talks to its stdin/stdout.
std::unique_ptr<LineChannel> spawn_process_channel(const std::string& command);

/// Connects to host:port over TCP.
std::unique_ptr<LineChannel> connect_tcp_channel(const std::string& host, int port);

/// Judge that forwards each query to an external process over the bridge
/// protocol: one JSON object per line,
///     request  {"pred": "...", "gt": "...", "kind": "object|attribute|relation"}
///     response {"tier": "identical|synonym|hypernym_hyponym|semantic_overlap|mismatch"}
/// or {"error": "..."}; exactly one response per request, in order. Any
/// transport failure, error record or unparseable response raises
/// Error(JudgeUnavailable). Calls are serialised internally.
class BridgeJudge final : public Judge {
public:
    explicit BridgeJudge(std::unique_ptr<LineChannel> channel);

    /// Endpoint forms: "exec:<shell command>" or "tcp://host:port".
    static std::unique_ptr<BridgeJudge> connect(std::string_view endpoint);

    MatchTier judge(std::string_view pred, std::string_view gt, LabelKind kind) override;

    std::size_t requests_sent() const;

private:
    mutable std::mutex mutex_;
    std::unique_ptr<LineChannel> channel_;
    std::size_t requests_ = 0;
};

/// Request/response encoders shared by the client and test stubs.
std::string encode_bridge_request(std::string_view pred, std::string_view gt, LabelKind kind);
std::string encode_bridge_response(MatchTier tier);
std::string encode_bridge_error(std::string_view message);

} // namespace vsg
