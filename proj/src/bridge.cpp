#include "vsg/bridge.hpp"

#include "vsg/errors.hpp"

#include <json.hpp>

#include <cerrno>
#include <csignal>
#include <cstring>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace vsg {

namespace {

using nlohmann::json;

// Reads '\n'-terminated lines from a file descriptor.
class FdLineReader {
public:
    explicit FdLineReader(int fd) : fd_(fd) {}

    std::optional<std::string> read_line() {
        for (;;) {
            if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
                std::string line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                return line;
            }
            char chunk[4096];
            const ssize_t n = ::read(fd_, chunk, sizeof(chunk));
            if (n < 0 && errno == EINTR) {
                continue;
            }
            if (n <= 0) {
                if (buffer_.empty()) {
                    return std::nullopt;
                }
                std::string rest = std::move(buffer_);
                buffer_.clear();
                return rest;
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    int fd_;
    std::string buffer_;
};

void write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            throw Error(ErrorKind::IoError, std::string("bridge write failed: ") + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

class ProcessChannel final : public LineChannel {
public:
    explicit ProcessChannel(const std::string& command) {
        // Writing to a dead child must surface as an error, not kill us.
        std::signal(SIGPIPE, SIG_IGN);
        int to_child[2];
        int from_child[2];
        if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
            throw Error(ErrorKind::IoError, "cannot create bridge pipes");
        }
        pid_ = ::fork();
        if (pid_ < 0) {
            throw Error(ErrorKind::IoError, "cannot fork bridge process");
        }
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::close(to_child[0]);
            ::close(to_child[1]);
            ::close(from_child[0]);
            ::close(from_child[1]);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
        reader_.emplace(read_fd_);
    }

    ~ProcessChannel() override {
        ::close(write_fd_);
        ::close(read_fd_);
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }

    void write_line(std::string_view line) override {
        std::string data(line);
        data.push_back('\n');
        write_all(write_fd_, data);
    }

    std::optional<std::string> read_line() override { return reader_->read_line(); }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
    std::optional<FdLineReader> reader_;
};

class SocketChannel final : public LineChannel {
public:
    explicit SocketChannel(int fd) : fd_(fd), reader_(fd) {}
    ~SocketChannel() override { ::close(fd_); }

    void write_line(std::string_view line) override {
        std::string data(line);
        data.push_back('\n');
        write_all(fd_, data);
    }

    std::optional<std::string> read_line() override { return reader_.read_line(); }

private:
    int fd_;
    FdLineReader reader_;
};

} // namespace

std::unique_ptr<LineChannel> spawn_process_channel(const std::string& command) {
    return std::make_unique<ProcessChannel>(command);
}

std::unique_ptr<LineChannel> connect_tcp_channel(const std::string& host, int port) {
    std::signal(SIGPIPE, SIG_IGN);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0) {
        throw Error(ErrorKind::JudgeUnavailable, "cannot resolve bridge host " + host);
    }
    int fd = -1;
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            break;
        }
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(found);
    if (fd < 0) {
        throw Error(ErrorKind::JudgeUnavailable,
                    "cannot connect to bridge at " + host + ":" + service);
    }
    return std::make_unique<SocketChannel>(fd);
}

std::string encode_bridge_request(std::string_view pred, std::string_view gt, LabelKind kind) {
    nlohmann::ordered_json j;
    j["pred"] = std::string(pred);
    j["gt"] = std::string(gt);
    j["kind"] = std::string(to_string(kind));
    return j.dump();
}

std::string encode_bridge_response(MatchTier tier) {
    nlohmann::ordered_json j;
    j["tier"] = std::string(to_string(tier));
    return j.dump();
}

std::string encode_bridge_error(std::string_view message) {
    nlohmann::ordered_json j;
    j["error"] = std::string(message);
    return j.dump();
}

BridgeJudge::BridgeJudge(std::unique_ptr<LineChannel> channel) : channel_(std::move(channel)) {}

std::unique_ptr<BridgeJudge> BridgeJudge::connect(std::string_view endpoint) {
    constexpr std::string_view exec_prefix = "exec:";
    constexpr std::string_view tcp_prefix = "tcp://";
    if (endpoint.starts_with(exec_prefix)) {
        return std::make_unique<BridgeJudge>(
            spawn_process_channel(std::string(endpoint.substr(exec_prefix.size()))));
    }
    if (endpoint.starts_with(tcp_prefix)) {
        const std::string_view rest = endpoint.substr(tcp_prefix.size());
        const auto colon = rest.rfind(':');
        if (colon == std::string_view::npos) {
            throw Error(ErrorKind::ConfigError, "tcp bridge endpoint needs host:port");
        }
        int port = 0;
        try {
            port = std::stoi(std::string(rest.substr(colon + 1)));
        } catch (const std::exception&) {
            throw Error(ErrorKind::ConfigError, "bad port in bridge endpoint");
        }
        return std::make_unique<BridgeJudge>(
            connect_tcp_channel(std::string(rest.substr(0, colon)), port));
    }
    throw Error(ErrorKind::ConfigError,
                "bridge endpoint must start with exec: or tcp://, got " + std::string(endpoint));
}

MatchTier BridgeJudge::judge(std::string_view pred, std::string_view gt, LabelKind kind) {
    std::lock_guard lock(mutex_);
    std::optional<std::string> line;
    try {
        channel_->write_line(encode_bridge_request(pred, gt, kind));
        ++requests_;
        line = channel_->read_line();
    } catch (const Error& e) {
        throw Error(ErrorKind::JudgeUnavailable, e.what());
    }
    if (!line) {
        throw Error(ErrorKind::JudgeUnavailable, "bridge closed the stream");
    }
    const json response = json::parse(*line, nullptr, false);
    if (response.is_discarded() || !response.is_object()) {
        throw Error(ErrorKind::JudgeUnavailable, "unparseable bridge response: " + *line);
    }
    if (response.contains("error")) {
        throw Error(ErrorKind::JudgeUnavailable,
                    "bridge error: " + response["error"].dump());
    }
    const auto it = response.find("tier");
    if (it == response.end() || !it->is_string()) {
        throw Error(ErrorKind::JudgeUnavailable, "bridge response lacks a tier: " + *line);
    }
    const auto tier = parse_match_tier(it->get<std::string>());
    if (!tier) {
        throw Error(ErrorKind::JudgeUnavailable, "bridge returned unknown tier " + it->dump());
    }
    return *tier;
}

std::size_t BridgeJudge::requests_sent() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

} // namespace vsg
