#pragma once

#include <httplib.h>

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arthur {

inline constexpr std::string_view kCannedChatbotReply = "I am not sure, tell me more.";
inline constexpr std::string_view kChatbotApology = "Sorry, I cannot answer that right now.";

struct ChatbotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Anything that turns a plain-text utterance into a plain-text reply.
class ChatbotClient {
public:
    virtual ~ChatbotClient() = default;
    virtual std::string reply(const std::string& utterance) = 0;
};

class CannedChatbot final : public ChatbotClient {
public:
    std::string reply(const std::string&) override { return std::string(kCannedChatbotReply); }
};

/// POSTs the utterance as text/plain and returns the response body verbatim.
class HttpChatbot final : public ChatbotClient {
public:
    explicit HttpChatbot(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(3))
        : timeout_(timeout) {
        // Split "http://host:port/path" into the origin httplib wants and the request path.
        const auto scheme = url.find("://");
        const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
        if (path_start == std::string::npos) {
            origin_ = url;
            path_ = "/";
        } else {
            origin_ = url.substr(0, path_start);
            path_ = url.substr(path_start);
        }
        if (origin_.empty()) throw ChatbotError("empty chatbot URL");
    }

    std::string reply(const std::string& utterance) override {
        httplib::Client client(origin_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
        client.set_connection_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
        client.set_read_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
        client.set_write_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
        auto res = client.Post(path_, utterance, "text/plain");
        if (!res) throw ChatbotError("chatbot request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) throw ChatbotError("chatbot returned HTTP " + std::to_string(res->status));
        return res->body;
    }

    const std::string& origin() const { return origin_; }
    const std::string& path() const { return path_; }

private:
    std::string origin_;
    std::string path_;
    std::chrono::milliseconds timeout_;
};

inline std::unique_ptr<ChatbotClient> make_chatbot(const std::string& url, std::chrono::milliseconds timeout) {
    if (url.empty()) return std::make_unique<CannedChatbot>();
    return std::make_unique<HttpChatbot>(url, timeout);
}

}  // namespace arthur
