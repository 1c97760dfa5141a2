#pragma once

// External F-systems over a line-delimited JSON protocol.
//
// Request:  {"side":"A","t":5,"k":3}
// Reply:    {"freqs":[1,2,9]}        (sorted, distinct, positive)
//
// One reply per request, in order. Replies are cached per (side, t, k), so a
// plugin that would answer the same query differently is never asked twice.

#include "bifreq/fsystem.hpp"

#include <json.hpp>

#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace bifreq {

/// The plugin misbehaved: transport failure or a reply that breaks the protocol.
class PluginFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PluginTransport {
public:
    virtual ~PluginTransport() = default;
    /// Sends one request line and returns one reply line (without newline).
    virtual std::string exchange(const std::string& request) = 0;
};

/// Child process speaking the protocol on its standard streams.
class ProcessTransport final : public PluginTransport {
public:
    explicit ProcessTransport(const std::string& command)
    {
        int to_child[2], from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0) throw PluginFault("pipe: " + std::string(std::strerror(errno)));
        m_pid = fork();
        if (m_pid < 0) throw PluginFault("fork: " + std::string(std::strerror(errno)));
        if (m_pid == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        m_in = fdopen(to_child[1], "w");
        m_out = fdopen(from_child[0], "r");
        if (!m_in || !m_out) throw PluginFault("fdopen failed");
        std::signal(SIGPIPE, SIG_IGN);
    }

    ProcessTransport(const ProcessTransport&) = delete;
    ProcessTransport& operator=(const ProcessTransport&) = delete;

    ~ProcessTransport() override
    {
        if (m_in) std::fclose(m_in);
        if (m_out) std::fclose(m_out);
        if (m_pid > 0) {
            int status = 0;
            waitpid(m_pid, &status, 0);
        }
    }

    std::string exchange(const std::string& request) override
    {
        if (std::fputs(request.c_str(), m_in) < 0 || std::fputc('\n', m_in) == EOF || std::fflush(m_in) != 0) {
            throw PluginFault("plugin closed its input");
        }
        std::string line;
        int ch;
        while ((ch = std::fgetc(m_out)) != EOF && ch != '\n') line.push_back(static_cast<char>(ch));
        if (ch == EOF && line.empty()) throw PluginFault("plugin closed its output without replying");
        return line;
    }

private:
    pid_t m_pid = -1;
    FILE* m_in = nullptr;
    FILE* m_out = nullptr;
};

/// Decodes one reply; throws PluginFault on any protocol breach.
inline FrequencySet decode_plugin_reply(const std::string& line)
{
    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw PluginFault("malformed reply '" + line + "': " + e.what());
    }
    if (!reply.is_object() || !reply.contains("freqs") || !reply["freqs"].is_array()) {
        throw PluginFault("reply lacks a \"freqs\" array: " + line);
    }
    std::vector<Frequency> freqs;
    std::int64_t prev = 0;
    for (const auto& v : reply["freqs"]) {
        if (!v.is_number_integer()) throw PluginFault("non-integer frequency in reply: " + line);
        const auto n = v.get<std::int64_t>();
        if (n < 1) throw PluginFault("non-positive frequency " + std::to_string(n) + " in reply: " + line);
        if (n <= prev) throw PluginFault("frequencies not strictly increasing in reply: " + line);
        prev = n;
        freqs.push_back({PoolTag::Plain, n});
    }
    return FrequencySet::of(freqs);
}

inline std::string encode_plugin_request(Side c, std::int64_t t, std::int64_t k)
{
    nlohmann::json req = {{"side", std::string(to_string(c))}, {"t", t}, {"k", k}};
    return req.dump();
}

/// Wraps a transport as an F-system. Access to the transport is serialized.
inline FSystemSpec external_system(std::shared_ptr<PluginTransport> transport, std::string name,
                                   GoldenNumber claimed_ratio = GoldenNumber(2), std::int64_t claimed_lambda = 0)
{
    struct State {
        std::shared_ptr<PluginTransport> transport;
        std::mutex mutex;
        std::map<std::tuple<Side, std::int64_t, std::int64_t>, FrequencySet> cache;
    };
    auto state = std::make_shared<State>();
    state->transport = std::move(transport);
    return {std::move(name), std::move(claimed_ratio), claimed_lambda,
            [state](Side c, std::int64_t t, std::int64_t k) {
                std::lock_guard lock(state->mutex);
                const auto key = std::make_tuple(c, t, k);
                if (auto it = state->cache.find(key); it != state->cache.end()) return it->second;
                FrequencySet s = decode_plugin_reply(state->transport->exchange(encode_plugin_request(c, t, k)));
                state->cache.emplace(key, s);
                return s;
            }};
}

inline FSystemSpec plugin_system(const std::string& command, GoldenNumber claimed_ratio = GoldenNumber(2),
                                 std::int64_t claimed_lambda = 0)
{
    return external_system(std::make_shared<ProcessTransport>(command), "plugin:" + command, std::move(claimed_ratio),
                           claimed_lambda);
}

} // namespace bifreq
