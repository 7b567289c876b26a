#include <catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "finlm/http_backend.hpp"

using namespace finlm;
using namespace finlm::gen;

namespace {

// In-process server fixture bound to an ephemeral port.
struct TestServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;

    explicit TestServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server.Post("/generate", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~TestServer() {
        server.stop();
        thread.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
};

RetryPolicy fast_policy(int attempts) {
    RetryPolicy policy;
    policy.max_attempts = attempts;
    policy.initial_backoff_ms = 1;
    policy.timeout_ms = 2000;
    policy.log = util::null_log();
    return policy;
}

}  // namespace

TEST_CASE("http_generate posts the wire schema and returns text", "[backend]") {
    nlohmann::json seen_body;
    std::string seen_request_id;
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen_body = nlohmann::json::parse(req.body);
        if (req.has_header("X-Request-Id")) seen_request_id = req.get_header_value("X-Request-Id");
        res.set_content(R"({"text":"ok"})", "application/json");
    });

    GenerationConfig config;
    CHECK(http_generate(server.endpoint(), "/generate", "hello", config, fast_policy(3)) == "ok");
    CHECK(seen_body.at("prompt") == "hello");
    CHECK(seen_body.at("max_new_tokens") == 512);
    CHECK(seen_body.at("sampling") == false);
    CHECK(seen_body.at("top_k") == 50);
    CHECK(seen_body.at("repetition_penalty") == Catch::Approx(1.1));
    CHECK_FALSE(seen_request_id.empty());
}

TEST_CASE("transient failures are retried within the budget", "[backend]") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        if (calls.fetch_add(1) < 2) {
            res.status = 503;
            return;
        }
        res.set_content(R"({"text":"recovered"})", "application/json");
    });

    CHECK(http_generate(server.endpoint(), "/generate", "p", GenerationConfig{}, fast_policy(3)) ==
          "recovered");
    CHECK(calls.load() == 3);
}

TEST_CASE("exhausted budgets raise BackendUnavailable", "[backend]") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        res.status = 500;
    });
    try {
        http_generate(server.endpoint(), "/generate", "p", GenerationConfig{}, fast_policy(3));
        FAIL("expected BackendUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BackendUnavailable);
    }
    CHECK(calls.load() == 3);
}

TEST_CASE("unreachable endpoints raise BackendUnavailable", "[backend]") {
    // Nothing listens on this port.
    try {
        http_generate("http://127.0.0.1:1", "/generate", "p", GenerationConfig{}, fast_policy(2));
        FAIL("expected BackendUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BackendUnavailable);
    }
}

TEST_CASE("malformed responses raise ProtocolError without retry", "[backend]") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        res.set_content("not json", "text/plain");
    });
    try {
        http_generate(server.endpoint(), "/generate", "p", GenerationConfig{}, fast_policy(3));
        FAIL("expected ProtocolError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProtocolError);
    }
    CHECK(calls.load() == 1);

    TestServer missing_field([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"output":"x"})", "application/json");
    });
    CHECK_THROWS_AS(
        http_generate(missing_field.endpoint(), "/generate", "p", GenerationConfig{}, fast_policy(2)),
        Error);
}

TEST_CASE("4xx statuses are protocol errors, not retried", "[backend]") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        res.status = 404;
    });
    try {
        http_generate(server.endpoint(), "/generate", "p", GenerationConfig{}, fast_policy(5));
        FAIL("expected ProtocolError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProtocolError);
    }
    CHECK(calls.load() == 1);
}

TEST_CASE("auth token is forwarded as a bearer header", "[backend]") {
    std::string auth;
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        if (req.has_header("Authorization")) auth = req.get_header_value("Authorization");
        res.set_content(R"({"text":"ok"})", "application/json");
    });
    http_generate(server.endpoint(), "/generate", "p", GenerationConfig{}, fast_policy(1), "secret");
    CHECK(auth == "Bearer secret");
}

TEST_CASE("HttpBackend implements the backend interface", "[backend]") {
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        res.set_content(nlohmann::json{{"text", "echo:" + body.at("prompt").get<std::string>()}}.dump(),
                        "application/json");
    });
    HttpBackend backend(server.endpoint(), "/generate", fast_policy(2));
    CHECK(backend.generate("hi", GenerationConfig{}) == "echo:hi");
    CHECK(backend.identity().find("http:") == 0);
}

TEST_CASE("mock backend is deterministic and counts calls", "[backend]") {
    auto mock = MockBackend::fixed("mock:fixed", "answer");
    CHECK(mock.generate("a", GenerationConfig{}) == "answer");
    CHECK(mock.generate("b", GenerationConfig{}) == "answer");
    CHECK(mock.call_count() == 2);

    auto echo = MockBackend::echo("mock:echo");
    CHECK(echo.generate("xyz", GenerationConfig{}) == "xyz");

    auto mapped = MockBackend::from_map("mock:map", {{"k", "v"}}, "fallback");
    CHECK(mapped.generate("k", GenerationConfig{}) == "v");
    CHECK(mapped.generate("other", GenerationConfig{}) == "fallback");

    auto failing = MockBackend::failing("mock:fail");
    CHECK_THROWS_AS(failing.generate("p", GenerationConfig{}), Error);
}
