#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "textswarm/language.hpp"
#include "textswarm/perception.hpp"

namespace textswarm {

inline constexpr std::string_view kProviderProtocol = "textswarm-provider/1";

// Request/response transport for remote providers; one JSON document each way.
class JsonChannel {
 public:
  virtual ~JsonChannel() = default;
  virtual nlohmann::json call(const nlohmann::json& request) = 0;
};

// Child process speaking newline-delimited JSON on stdin/stdout.
class SubprocessChannel final : public JsonChannel {
 public:
  explicit SubprocessChannel(const std::string& command);
  ~SubprocessChannel() override;
  SubprocessChannel(const SubprocessChannel&) = delete;
  SubprocessChannel& operator=(const SubprocessChannel&) = delete;

  nlohmann::json call(const nlohmann::json& request) override;

 private:
  int fd_ = -1;
  int pid_ = -1;
  std::string buffer_;
};

// POSTs the request to a URL of the form http://host:port/path.
class HttpChannel final : public JsonChannel {
 public:
  explicit HttpChannel(const std::string& url);
  nlohmann::json call(const nlohmann::json& request) override;

 private:
  std::string origin_;
  std::string path_;
};

// "exec:<command>" or "http://...". Throws ConfigError on anything else.
std::unique_ptr<JsonChannel> open_channel(const std::string& endpoint);

// Shared, serialized access to one channel.
class ProviderClient {
 public:
  explicit ProviderClient(std::unique_ptr<JsonChannel> channel) : channel_(std::move(channel)) {}

  // Sends {protocol, op, ...payload}; throws ProviderError on {"error": ...} or transport failure.
  nlohmann::json request(std::string_view op, nlohmann::json payload);

 private:
  std::mutex mutex_;
  std::unique_ptr<JsonChannel> channel_;
};

// Describer whose text comes from a remote provider. A seed drawn from the
// caller's stream is forwarded so the provider can stay deterministic.
Describer remote_describer(std::shared_ptr<ProviderClient> client);

// Language backend with optional remote embedder and/or summarizer; whichever
// is null falls back to the reference implementation.
class RemoteLanguage final : public LanguageBackend {
 public:
  RemoteLanguage(std::shared_ptr<ProviderClient> embedder,
                 std::shared_ptr<ProviderClient> summarizer,
                 std::size_t dim = kDefaultEmbeddingDim);

  std::size_t dimension() const override { return reference_.dimension(); }
  Embedding embed(std::span<const std::string> tokens) const override;
  std::string summarize(std::span<const DescriptionRecord> members) const override;
  std::string summarize(const SlotTally& tally,
                        std::span<const DescriptionRecord> members) const override;

 private:
  std::shared_ptr<ProviderClient> embedder_;
  std::shared_ptr<ProviderClient> summarizer_;
  ReferenceLanguage reference_;
};

}  // namespace textswarm
