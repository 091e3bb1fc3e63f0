// Copyright 2026 The lightattack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LIGHTATTACK_BRIDGE_CLIENT_HPP
#define LIGHTATTACK_BRIDGE_CLIENT_HPP

// Client side of the classifier bridge protocol: newline-delimited JSON over
// a TCP socket or the stdio of a child process.
//
//   request:  {"id":<uint64>,"ppm_b64":"<base64 of P6 32x32 maxval 255>"}\n
//   response: {"id":<uint64>,"probs":[<one real per label>]}\n
//   error:    {"id":<uint64>,"error":"<message>"}\n

#include <array>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "classifier.hpp"
#include "errors.hpp"
#include "imaging.hpp"

namespace lightattack {

// ---------------------------------------------------------------------------
// Base64 (RFC 4648, with padding)
// ---------------------------------------------------------------------------

inline std::string base64_encode(std::span<const std::uint8_t> bytes)
{
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (i + 1 == bytes.size()) {
        const std::uint32_t v = std::uint32_t{bytes[i]} << 16;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8);
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text)
{
    auto value_of = [](char ch) -> int {
        if (ch >= 'A' && ch <= 'Z')
            return ch - 'A';
        if (ch >= 'a' && ch <= 'z')
            return ch - 'a' + 26;
        if (ch >= '0' && ch <= '9')
            return ch - '0' + 52;
        if (ch == '+')
            return 62;
        if (ch == '/')
            return 63;
        return -1;
    };
    if (text.size() % 4 != 0)
        throw ProtocolViolation("base64 length is not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::array<int, 4> v{};
        int pad = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            const char ch = text[i + k];
            if (ch == '=' && i + 4 == text.size() && k >= 2) {
                v[k] = 0;
                ++pad;
            } else {
                if (pad > 0 || (v[k] = value_of(ch)) < 0)
                    throw ProtocolViolation("invalid base64 character");
            }
        }
        const std::uint32_t word = (static_cast<std::uint32_t>(v[0]) << 18) | (static_cast<std::uint32_t>(v[1]) << 12) |
                                   (static_cast<std::uint32_t>(v[2]) << 6) | static_cast<std::uint32_t>(v[3]);
        out.push_back(static_cast<std::uint8_t>(word >> 16));
        if (pad < 2)
            out.push_back(static_cast<std::uint8_t>(word >> 8));
        if (pad < 1)
            out.push_back(static_cast<std::uint8_t>(word));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

/// Serialized request line, newline included.
inline std::string encode_request(std::uint64_t id, const Image8& img)
{
    check_classifier_size(img);
    nlohmann::json j;
    j["id"] = id;
    j["ppm_b64"] = base64_encode(write_ppm(img));
    return j.dump() + "\n";
}

/// Checks a response line and returns renormalized scores. Sums further than
/// 1e-3 from one are rejected; smaller drift is divided out.
inline ClassScores decode_response(std::string_view line, std::uint64_t expected_id, std::size_t num_labels)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolViolation(std::string("response is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_number_unsigned())
        throw ProtocolViolation("response lacks an unsigned integer id");
    if (j["id"].get<std::uint64_t>() != expected_id)
        throw ProtocolViolation("response id " + j["id"].dump() + " does not match request id " +
                                std::to_string(expected_id));
    if (j.contains("error"))
        throw ProtocolViolation("classifier reported an error: " +
                                (j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump()));
    if (!j.contains("probs") || !j["probs"].is_array())
        throw ProtocolViolation("response lacks a probs array");
    const auto& arr = j["probs"];
    if (arr.size() != num_labels)
        throw ProtocolViolation("probs has " + std::to_string(arr.size()) + " entries, expected " +
                                std::to_string(num_labels));
    ClassScores scores;
    double sum = 0.0;
    for (const auto& v : arr) {
        if (!v.is_number())
            throw ProtocolViolation("probs entry is not a number");
        const double p = v.get<double>();
        if (!std::isfinite(p) || p < 0.0)
            throw ProtocolViolation("probs entry is negative or non-finite");
        scores.probs.push_back(p);
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-3)
        throw NormalizationError("probs sum to " + std::to_string(sum));
    for (double& p : scores.probs)
        p = std::min(1.0, p / sum);
    return scores;
}

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

/// Bidirectional line channel over a pair of file descriptors.
class LineChannel {
public:
    virtual ~LineChannel() = default;

    void write_line(const std::string& line)
    {
        std::size_t off = 0;
        while (off < line.size()) {
            const ssize_t n = send_bytes(line.data() + off, line.size() - off);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                throw TransportError(std::string("write to classifier failed: ") + std::strerror(errno));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    std::string read_line()
    {
        for (;;) {
            const auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            char chunk[4096];
            const ssize_t n = ::read(read_fd(), chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                throw TransportError(std::string("read from classifier failed: ") + std::strerror(errno));
            }
            if (n == 0)
                throw TransportError("classifier closed the connection");
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

protected:
    virtual int read_fd() const = 0;
    virtual ssize_t send_bytes(const char* data, std::size_t len) = 0;

private:
    std::string buffer_;
};

class TcpChannel : public LineChannel {
public:
    TcpChannel(const std::string& host, const std::string& port)
    {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0)
            throw ClassifierUnavailable("cannot resolve " + host + ":" + port + ": " + ::gai_strerror(rc));
        std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
        for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
            const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0)
                continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                fd_ = fd;
                return;
            }
            ::close(fd);
        }
        throw ClassifierUnavailable("cannot connect to classifier at " + host + ":" + port);
    }

    ~TcpChannel() override
    {
        if (fd_ >= 0)
            ::close(fd_);
    }

    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;

protected:
    int read_fd() const override { return fd_; }
    ssize_t send_bytes(const char* data, std::size_t len) override { return ::send(fd_, data, len, MSG_NOSIGNAL); }

private:
    int fd_ = -1;
};

/// Runs `/bin/sh -c command` and talks to it over its stdin/stdout.
class ProcessChannel : public LineChannel {
public:
    explicit ProcessChannel(const std::string& command)
    {
        // A dead child must surface as a TransportError, not kill us.
        std::signal(SIGPIPE, SIG_IGN);
        int to_child[2];
        int from_child[2];
        if (::pipe(to_child) != 0)
            throw ClassifierUnavailable("pipe() failed");
        if (::pipe(from_child) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw ClassifierUnavailable("pipe() failed");
        }
        pid_ = ::fork();
        if (pid_ < 0)
            throw ClassifierUnavailable("fork() failed");
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
    }

    ~ProcessChannel() override
    {
        if (write_fd_ >= 0)
            ::close(write_fd_);
        if (read_fd_ >= 0)
            ::close(read_fd_);
        if (pid_ > 0) {
            int status = 0;
            ::waitpid(pid_, &status, 0);
        }
    }

    ProcessChannel(const ProcessChannel&) = delete;
    ProcessChannel& operator=(const ProcessChannel&) = delete;

protected:
    int read_fd() const override { return read_fd_; }
    ssize_t send_bytes(const char* data, std::size_t len) override { return ::write(write_fd_, data, len); }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
};

/// Endpoint syntax: "tcp:<host>:<port>" or "exec:<shell command>".
inline std::unique_ptr<LineChannel> open_channel(const std::string& endpoint)
{
    if (endpoint.rfind("tcp:", 0) == 0) {
        const std::string rest = endpoint.substr(4);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size())
            throw InvalidArgument("tcp endpoint must look like tcp:<host>:<port>");
        return std::make_unique<TcpChannel>(rest.substr(0, colon), rest.substr(colon + 1));
    }
    if (endpoint.rfind("exec:", 0) == 0) {
        if (endpoint.size() == 5)
            throw InvalidArgument("exec endpoint needs a command");
        return std::make_unique<ProcessChannel>(endpoint.substr(5));
    }
    throw InvalidArgument("unknown classifier endpoint '" + endpoint + "' (expected tcp:HOST:PORT or exec:COMMAND)");
}

/// Classifier speaking the bridge protocol. One request in flight at a time.
class BridgeClassifier : public Classifier {
public:
    BridgeClassifier(std::unique_ptr<LineChannel> channel, LabelSet labels = LabelSet::cifar10())
        : channel_(std::move(channel)), labels_(std::move(labels))
    {
    }

    explicit BridgeClassifier(const std::string& endpoint, LabelSet labels = LabelSet::cifar10())
        : BridgeClassifier(open_channel(endpoint), std::move(labels))
    {
    }

    ClassScores classify(const Image8& img) override
    {
        std::lock_guard lock(mutex_);
        const std::uint64_t id = next_id_++;
        channel_->write_line(encode_request(id, img));
        return decode_response(channel_->read_line(), id, labels_.size());
    }

    const LabelSet& labels() const override { return labels_; }

private:
    std::unique_ptr<LineChannel> channel_;
    LabelSet labels_;
    std::mutex mutex_;
    std::uint64_t next_id_ = 1;
};

inline ClassScores predict_external(const std::string& endpoint, const Image8& img)
{
    BridgeClassifier client(endpoint);
    return client.classify(img);
}

} // namespace lightattack

#endif // LIGHTATTACK_BRIDGE_CLIENT_HPP
