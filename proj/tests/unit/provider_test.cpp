#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "judgebench/errors.hpp"
#include "judgebench/provider.hpp"
#include "judgebench/providers.hpp"
#include "test_support.hpp"

namespace judgebench {
namespace {

using Scripted = ScriptedMock;

ChatRequest hello(const std::string& model = "scripted-mock") {
  return ChatRequest{model, {{Role::System, "judge"}, {Role::User, "hello there"}}, 0.0, std::nullopt};
}

RetryPolicy no_sleep(int attempts, std::vector<std::chrono::milliseconds>* waits = nullptr) {
  RetryPolicy p;
  p.max_attempts = attempts;
  p.sleep = [waits](std::chrono::milliseconds d) {
    if (waits) waits->push_back(d);
  };
  return p;
}

TEST(Complete, ScriptedReplyPassesThrough) {
  Scripted mock;
  mock.script({Scripted::Reply{"true", 12, 3}});
  const auto r = complete(mock, hello(), no_sleep(3));
  EXPECT_EQ(r.content, "true");
  EXPECT_EQ(r.input_tokens, 12);
  EXPECT_EQ(r.output_tokens, 3);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_GE(r.latency_ms, 0.0);
}

TEST(Complete, TwoFailuresThenSuccess) {
  Scripted mock;
  mock.script({Scripted::Failure{503}, Scripted::Failure{429}, Scripted::Reply{"ok", 1, 1}});
  std::vector<std::chrono::milliseconds> waits;
  RunLog log;
  CallOptions opts;
  opts.policy = no_sleep(3, &waits);
  opts.log = &log;
  opts.tag = "p-1";
  const auto r = complete(mock, hello(), opts);
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(waits, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500), std::chrono::milliseconds(1000)}));
  const auto entries = log.entries();
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].outcome, "error");
  EXPECT_EQ(entries[0].status, 503);
  EXPECT_EQ(entries[2].outcome, "ok");
  EXPECT_EQ(entries[2].attempt, 3);
  for (const auto& e : entries) {
    EXPECT_EQ(e.tag, "p-1");
    EXPECT_EQ(e.fingerprint, fingerprint(hello()));
  }
}

TEST(Complete, ExhaustionThrowsLastError) {
  Scripted mock;
  mock.script({Scripted::Failure{500}, Scripted::Failure{502}, Scripted::Failure{503}, Scripted::Reply{"late"}});
  try {
    complete(mock, hello(), no_sleep(3));
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(mock.calls(), 3);
}

TEST(Complete, ClientErrorIsNotRetried) {
  Scripted mock;
  mock.script({Scripted::Failure{400, "bad"}, Scripted::Reply{"never"}});
  EXPECT_THROW(complete(mock, hello(), no_sleep(3)), ProviderError);
  EXPECT_EQ(mock.calls(), 1);
}

TEST(Complete, TimeoutIsRetriedAndSurfaces) {
  Scripted mock;
  mock.script({Scripted::TimeoutStep{}, Scripted::Reply{"ok"}});
  EXPECT_EQ(complete(mock, hello(), no_sleep(2)).attempts, 2);
  mock.script({Scripted::TimeoutStep{}});
  EXPECT_THROW(complete(mock, hello(), no_sleep(1)), Timeout);
}

TEST(Complete, CustomRetryablePredicate) {
  Scripted mock;
  mock.script({Scripted::Failure{400}, Scripted::Reply{"ok"}});
  auto p = no_sleep(2);
  p.retryable = [](const std::exception&) { return true; };
  EXPECT_EQ(complete(mock, hello(), p).content, "ok");
}

TEST(Complete, RejectsInvalidRequests) {
  Scripted mock;
  ChatRequest empty{"m", {}, 0.0, std::nullopt};
  EXPECT_THROW(complete(mock, empty, no_sleep(1)), Error);
  ChatRequest assistant_first{"m", {{Role::Assistant, "hi"}}, 0.0, std::nullopt};
  EXPECT_THROW(complete(mock, assistant_first, no_sleep(1)), Error);
  auto hot = hello();
  hot.temperature = -0.1;
  EXPECT_THROW(complete(mock, hot, no_sleep(1)), Error);
  EXPECT_THROW(complete(mock, hello(), no_sleep(0)), ConfigError);
}

TEST(RetryPolicy, ExponentialDelays) {
  RetryPolicy p;
  p.initial_delay = std::chrono::milliseconds(100);
  p.multiplier = 3.0;
  EXPECT_EQ(p.delay_after(1).count(), 100);
  EXPECT_EQ(p.delay_after(2).count(), 300);
  EXPECT_EQ(p.delay_after(3).count(), 900);
}

TEST(IsTransient, StatusClasses) {
  EXPECT_TRUE(is_transient(ProviderError(0, "")));
  EXPECT_TRUE(is_transient(ProviderError(408, "")));
  EXPECT_TRUE(is_transient(ProviderError(429, "")));
  EXPECT_TRUE(is_transient(ProviderError(503, "")));
  EXPECT_TRUE(is_transient(Timeout("x")));
  EXPECT_FALSE(is_transient(ProviderError(401, "")));
  EXPECT_FALSE(is_transient(Error("other")));
}

TEST(Fingerprint, StableAndSensitive) {
  const auto a = fingerprint(hello());
  EXPECT_EQ(a.size(), 16u);
  EXPECT_EQ(a, fingerprint(hello()));
  auto warm = hello();
  warm.temperature = 0.7;
  EXPECT_NE(a, fingerprint(warm));
  auto other = hello();
  other.messages[1].content += "!";
  EXPECT_NE(a, fingerprint(other));
  EXPECT_NE(a, fingerprint(hello("other-model")));
}

TEST(EstimateTokens, CountsWhitespaceWords) {
  EXPECT_EQ(estimate_tokens(""), 0);
  EXPECT_EQ(estimate_tokens("  one two\tthree\nfour "), 4);
  EXPECT_EQ(estimate_tokens(hello()), 3);
}

TEST(Usd, ParseAndFormat) {
  EXPECT_EQ(Usd::parse("0.27").picos(), 270'000'000'000);
  EXPECT_EQ(Usd::parse("10").str(2), "10.00");
  EXPECT_EQ(Usd::parse(".5").str(1), "0.5");
  EXPECT_EQ(Usd::from_picos(1'500'000).str(6), "0.000002");  // half-up
  EXPECT_EQ(Usd::from_picos(1'499'999).str(6), "0.000001");
  EXPECT_THROW(Usd::parse("1.2.3"), Error);
  EXPECT_THROW(Usd::parse("abc"), Error);
  EXPECT_THROW(Usd::parse(""), Error);
}

TEST(CostOf, GptFourTurboThousandInFiveHundredOut) {
  const auto table = CostTable::july_2025();
  const auto usd = cost_of(table, "gpt-4-turbo", 1000, 500);
  // 1000 * 10 / 1e6 + 500 * 30 / 1e6
  EXPECT_EQ(usd.str(6), "0.025000");
  EXPECT_EQ(usd, Usd::parse("0.025"));
}

TEST(CostOf, ZeroTokensAndMistralNemo) {
  const auto table = CostTable::july_2025();
  EXPECT_EQ(cost_of(table, "gpt-4-turbo", 0, 0), Usd{});
  EXPECT_EQ(cost_of(table, "mistral-nemo", 1'000'000, 1'000'000), Usd::parse("0.60"));
  EXPECT_THROW(cost_of(table, "no-such-model", 1, 1), UnknownModel);
}

TEST(CostOf, LinearInEachArgument) {
  const auto table = CostTable::july_2025();
  for (const auto& [model, rate] : table.rates()) {
    for (std::int64_t a : {0, 1, 7, 1234, 999'999})
      for (std::int64_t b : {0, 3, 5000}) {
        EXPECT_EQ(cost_of(table, model, a + b, 0), cost_of(table, model, a, 0) + cost_of(table, model, b, 0));
        EXPECT_EQ(cost_of(table, model, 0, a + b), cost_of(table, model, 0, a) + cost_of(table, model, 0, b));
      }
  }
}

TEST(CostTable, ShippedRatesMatchListPrices) {
  const auto t = CostTable::july_2025();
  auto rate = [&](const std::string& m) { return t.at(m); };
  EXPECT_EQ(rate("gpt-3.5-turbo"), (TokenRate{Usd::parse("0.50"), Usd::parse("1.50")}));
  EXPECT_EQ(rate("o3"), (TokenRate{Usd::parse("10"), Usd::parse("40")}));
  EXPECT_EQ(rate("deepseek-v3"), (TokenRate{Usd::parse("0.27"), Usd::parse("1.10")}));
  EXPECT_EQ(rate("deepseek-r1"), (TokenRate{Usd::parse("0.55"), Usd::parse("2.19")}));
  EXPECT_EQ(rate("llama-3.1-405b"), (TokenRate{Usd::parse("5.33"), Usd::parse("16.00")}));
  EXPECT_EQ(t.rates().size(), 13u);
}

TEST(CostTable, FromJsonAcceptsNumbersAndStrings) {
  const auto t = CostTable::from_json(
      {{"models", {{"a", {{"input_usd_per_1m", 1.25}, {"output_usd_per_1m", "2"}}}}}});
  EXPECT_EQ(t.at("a"), (TokenRate{Usd::parse("1.25"), Usd::parse("2")}));
  EXPECT_THROW(t.at("b"), UnknownModel);
}

TEST(KnownCapabilities, ReasoningModelsDropTemperature) {
  EXPECT_FALSE(known_capabilities("o3").supports_temperature);
  EXPECT_FALSE(known_capabilities("o4-mini").supports_temperature);
  EXPECT_TRUE(known_capabilities("gpt-4o").supports_temperature);
  EXPECT_TRUE(known_capabilities("some-local-model").supports_temperature);
}

TEST(RunLog, WritesJsonLinesAndReadsBack) {
  jbtest::TempDir dir;
  {
    RunLog log(dir / "runlog.jsonl");
    log.append({"p-1", "abc", "m", 1, "error", 503, 2.5, 0, 0, false, "boom"});
    log.append({"p-1", "abc", "m", 2, "ok", 200, 1.0, 10, 4, true, ""});
  }
  const auto back = RunLog::read(dir / "runlog.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].error, "boom");
  EXPECT_EQ(back[1].input_tokens, 10);
  EXPECT_TRUE(back[1].tokens_estimated);
}

TEST(InFlightLimiter, NeverExceedsLimit) {
  InFlightLimiter limiter(3);
  std::atomic<int> active{0}, worst{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 16; ++i)
    threads.emplace_back([&] {
      for (int k = 0; k < 20; ++k) {
        InFlightLimiter::Guard g(&limiter);
        const int now = ++active;
        int w = worst.load();
        while (now > w && !worst.compare_exchange_weak(w, now)) {
        }
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        --active;
      }
    });
  for (auto& t : threads) t.join();
  EXPECT_LE(worst.load(), 3);
  EXPECT_LE(limiter.peak(), 3);
  EXPECT_GE(limiter.peak(), 1);
}

TEST(ScriptedMock, KeyedBySystemPrompt) {
  Scripted mock("m", Scripted::KeyMode::SystemPrompt);
  mock.script("judge", {Scripted::Reply{"a"}});
  mock.script("other", {Scripted::Reply{"b"}});
  EXPECT_EQ(mock.send(hello()).content, "a");
  EXPECT_THROW(mock.send(hello()), Error);
}

TEST(ScriptedMock, KeyedByFingerprint) {
  Scripted mock("m", Scripted::KeyMode::Fingerprint);
  mock.script(fingerprint(hello()), {Scripted::Reply{"x"}});
  EXPECT_EQ(mock.send(hello()).content, "x");
  EXPECT_EQ(mock.requests().size(), 1u);
}

class ChatServer {
 public:
  ChatServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      last_body = nlohmann::json::parse(req.body);
      last_auth = req.get_header_value("Authorization");
      if (status != 200) {
        res.status = status;
        res.set_content("{\"error\":\"nope\"}", "application/json");
        return;
      }
      nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "{\"decision\": true}"}}}}}}};
      if (with_usage) reply["usage"] = {{"prompt_tokens", 321}, {"completion_tokens", 9}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ChatServer() {
    server_.stop();
    thread_.join();
  }
  HttpProviderConfig config(const std::string& model) const {
    HttpProviderConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.model_id = model;
    c.api_key_env = "JUDGEBENCH_TEST_KEY";
    c.timeout_s = 5.0;
    c.capabilities = known_capabilities(model);
    return c;
  }

  std::mutex mu;
  nlohmann::json last_body;
  std::string last_auth;
  int status = 200;
  bool with_usage = true;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpChatProvider, SendsOpenAiShapedRequest) {
  ChatServer srv;
  ::setenv("JUDGEBENCH_TEST_KEY", "k-123", 1);
  HttpChatProvider p(srv.config("gpt-4o"));
  auto req = hello("gpt-4o");
  req.max_output_tokens = 64;
  const auto r = complete(p, req, no_sleep(1));
  EXPECT_EQ(r.content, "{\"decision\": true}");
  EXPECT_EQ(r.input_tokens, 321);
  EXPECT_EQ(r.output_tokens, 9);
  EXPECT_FALSE(r.tokens_estimated);
  std::lock_guard lock(srv.mu);
  EXPECT_EQ(srv.last_auth, "Bearer k-123");
  EXPECT_EQ(srv.last_body["model"], "gpt-4o");
  EXPECT_EQ(srv.last_body["temperature"], 0.0);
  EXPECT_EQ(srv.last_body["max_tokens"], 64);
  ASSERT_EQ(srv.last_body["messages"].size(), 2u);
  EXPECT_EQ(srv.last_body["messages"][0]["role"], "system");
  EXPECT_EQ(srv.last_body["messages"][1]["content"], "hello there");
  ::unsetenv("JUDGEBENCH_TEST_KEY");
}

TEST(HttpChatProvider, OmitsTemperatureForReasoningModel) {
  ChatServer srv;
  HttpChatProvider p(srv.config("o3"));
  EXPECT_FALSE(p.wire_body(hello("o3")).contains("temperature"));
  complete(p, hello("o3"), no_sleep(1));
  std::lock_guard lock(srv.mu);
  EXPECT_FALSE(srv.last_body.contains("temperature"));
}

TEST(HttpChatProvider, EstimatesTokensWithoutUsage) {
  ChatServer srv;
  srv.with_usage = false;
  HttpChatProvider p(srv.config("gpt-4o"));
  const auto r = p.send(hello("gpt-4o"));
  EXPECT_TRUE(r.tokens_estimated);
  EXPECT_EQ(r.input_tokens, 3);
  EXPECT_EQ(r.output_tokens, 2);
}

TEST(HttpChatProvider, StatusCodesBecomeProviderErrors) {
  ChatServer srv;
  srv.status = 503;
  HttpChatProvider p(srv.config("gpt-4o"));
  try {
    complete(p, hello("gpt-4o"), no_sleep(2));
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.status(), 503);
  }
}

TEST(HttpChatProvider, UnreachableHostIsTransient) {
  HttpProviderConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.model_id = "gpt-4o";
  c.timeout_s = 1.0;
  HttpChatProvider p(c);
  try {
    p.send(hello("gpt-4o"));
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_TRUE(is_transient(e));
  }
}

}  // namespace
}  // namespace judgebench
