#include <mutex>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "verbatim/http_provider.hpp"

using namespace verbatim;

namespace {

// Local chat endpoint: fills every "#" with "uh" for the right key.
class FakeEndpoint {
public:
  FakeEndpoint() {
    server_.Post("/v1/chat", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        last_body_ = nlohmann::json::parse(req.body);
        last_auth_ = req.get_header_value("Authorization");
      }
      if (req.get_header_value("Authorization") != "Bearer sekrit") {
        res.status = 401;
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      std::string msg = body["messages"][0]["content"];
      if (msg.find("status500") != std::string::npos) {
        res.status = 500;
        return;
      }
      Prompt p{"", msg, std::nullopt};
      auto reply = StubProvider("uh").send(p);
      nlohmann::json out;
      if (msg.find("choices") != std::string::npos) {
        out["choices"] = {{{"message", {{"content", reply}}}}};
      } else {
        out["text"] = "transcription: " + reply;
      }
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/"; }
  nlohmann::json last_body() const {
    std::lock_guard lock(mu_);
    return last_body_;
  }
  std::string last_auth() const {
    std::lock_guard lock(mu_);
    return last_auth_;
  }

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  nlohmann::json last_body_;
  std::string last_auth_;
};

}  // namespace

TEST(HttpProvider, RequestShapeAndReply) {
  FakeEndpoint ep;
  HttpProvider provider({ep.base_url(), "audio-llm", "sekrit", 5});
  EXPECT_EQ(provider.name(), "http:audio-llm");

  auto r = complete({"u1", "so # yes.", "audio/u1.wav"}, provider, FillerLexicon());
  EXPECT_EQ(r.fillers, std::vector<std::string>{"uh"});
  EXPECT_FALSE(r.fallback);

  auto body = ep.last_body();
  EXPECT_EQ(body["model"], "audio-llm");
  EXPECT_EQ(body["system"], std::string(kCompletionSystemInstruction));
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "transcription: so # yes.");
  EXPECT_EQ(body["attachments"][0]["kind"], "audio");
  EXPECT_EQ(body["attachments"][0]["uri"], "audio/u1.wav");
  EXPECT_EQ(ep.last_auth(), "Bearer sekrit");
}

TEST(HttpProvider, ChoicesReply) {
  FakeEndpoint ep;
  HttpProvider provider({ep.base_url(), "m", "sekrit", 5});
  auto r = complete({"u1", "choices #.", std::nullopt}, provider, FillerLexicon());
  EXPECT_EQ(r.fillers, std::vector<std::string>{"uh"});
  EXPECT_FALSE(ep.last_body().contains("attachments"));
}

TEST(HttpProvider, AuthAndStatusFailures) {
  FakeEndpoint ep;
  Prompt p = build_prompt({"u1", "a #", std::nullopt});
  HttpProvider wrong({ep.base_url(), "m", "nope", 5});
  EXPECT_THROW(wrong.send(p), ProviderError);
  HttpProvider keyless({ep.base_url(), "m", std::nullopt, 5});
  EXPECT_THROW(keyless.send(p), ProviderError);
  EXPECT_EQ(ep.last_auth(), "");

  HttpProvider good({ep.base_url(), "m", "sekrit", 5});
  EXPECT_THROW(good.send(build_prompt({"u1", "status500 #", std::nullopt})), ProviderError);

  // Auth failures exhaust retries and fall back.
  auto r = complete({"u1", "a #", std::nullopt}, wrong, FillerLexicon(), {1, true});
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.attempts, 2);
}

TEST(HttpProvider, UnreachableHost) {
  HttpProvider provider({"http://127.0.0.1:1", "m", "k", 2});
  EXPECT_THROW(provider.send(build_prompt({"u1", "#", std::nullopt})), ProviderError);
}

TEST(HttpProvider, ConfigValidationAndReplies) {
  EXPECT_THROW(HttpProvider({"localhost:8080", "m", std::nullopt, 5}), ValidationError);
  EXPECT_THROW(HttpProvider({"http://h", "", std::nullopt, 5}), ValidationError);
  EXPECT_THROW(HttpProvider({"http://h", "m", std::nullopt, 0}), ValidationError);
  EXPECT_EQ(HttpProvider::response_text(R"({"output_text": "a um"})"), "a um");
  EXPECT_THROW(HttpProvider::response_text("not json"), ProviderError);
  EXPECT_THROW(HttpProvider::response_text(R"({"choices": []})"), ProviderError);
}
