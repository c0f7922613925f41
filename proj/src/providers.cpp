#include "textswarm/providers.hpp"

#include <csignal>
#include <cstring>

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

#include "textswarm/errors.hpp"

namespace textswarm {

SubprocessChannel::SubprocessChannel(const std::string& command) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
    throw ProviderError("socketpair failed: " + std::string(std::strerror(errno)));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw ProviderError("fork failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::close(sv[0]);
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::close(sv[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  fd_ = sv[0];
  pid_ = pid;
}

SubprocessChannel::~SubprocessChannel() {
  if (fd_ >= 0) ::close(fd_);  // EOF on stdin asks the provider to exit
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

nlohmann::json SubprocessChannel::call(const nlohmann::json& request) {
  const std::string line = request.dump() + "\n";
  for (std::size_t sent = 0; sent < line.size();) {
    const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProviderError("provider process closed its input");
    }
    sent += static_cast<std::size_t>(n);
  }
  std::size_t newline;
  while ((newline = buffer_.find('\n')) == std::string::npos) {
    char chunk[4096];
    const ssize_t n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw ProviderError("provider process exited without answering");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string reply = buffer_.substr(0, newline);
  buffer_.erase(0, newline + 1);
  auto doc = nlohmann::json::parse(reply, nullptr, false);
  if (doc.is_discarded()) throw ProviderError("provider answered with invalid JSON: " + reply);
  return doc;
}

HttpChannel::HttpChannel(const std::string& url) {
  constexpr std::string_view scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw ConfigError({url}, "provider URL must start with http://");
  const auto slash = url.find('/', scheme.size());
  origin_ = url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url.substr(slash);
  if (origin_.size() == scheme.size()) throw ConfigError({url}, "provider URL has no host");
}

nlohmann::json HttpChannel::call(const nlohmann::json& request) {
  httplib::Client client(origin_);
  client.set_connection_timeout(5);
  client.set_read_timeout(60);
  const auto res = client.Post(path_, request.dump(), "application/json");
  if (!res) throw ProviderError("HTTP provider unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ProviderError("HTTP provider returned status " + std::to_string(res->status));
  auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) throw ProviderError("HTTP provider answered with invalid JSON");
  return doc;
}

std::unique_ptr<JsonChannel> open_channel(const std::string& endpoint) {
  if (endpoint.rfind("exec:", 0) == 0) return std::make_unique<SubprocessChannel>(endpoint.substr(5));
  if (endpoint.rfind("http://", 0) == 0) return std::make_unique<HttpChannel>(endpoint);
  throw ConfigError({endpoint}, "provider endpoint must be exec:<command> or http://host:port/path");
}

nlohmann::json ProviderClient::request(std::string_view op, nlohmann::json payload) {
  if (!payload.is_object()) payload = nlohmann::json::object();
  payload["protocol"] = kProviderProtocol;
  payload["op"] = op;
  nlohmann::json reply;
  {
    std::lock_guard lock(mutex_);
    reply = channel_->call(payload);
  }
  if (!reply.is_object()) throw ProviderError("provider reply is not a JSON object");
  if (reply.contains("error"))
    throw ProviderError("provider error for '" + std::string(op) + "': " + reply["error"].dump());
  return reply;
}

namespace {

template <class T>
T reply_field(const nlohmann::json& reply, const char* name, std::string_view op) {
  try {
    return reply.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("provider reply to '" + std::string(op) + "' lacks a valid '" + name + "'");
  }
}

}  // namespace

Describer remote_describer(std::shared_ptr<ProviderClient> client) {
  if (!client) throw ContractError("remote_describer needs a client");
  return [client](const PersonAttributes& attributes, const NoiseParams& noise, Rng& rng) {
    const nlohmann::json payload = {
        {"attributes", attributes},
        {"noise", {{"p_drop", noise.p_drop}, {"p_synonym", noise.p_synonym}, {"p_color_confusion", noise.p_color_confusion}}},
        {"seed", rng.next_u64()}};
    return reply_field<std::string>(client->request("describe", payload), "text", "describe");
  };
}

RemoteLanguage::RemoteLanguage(std::shared_ptr<ProviderClient> embedder,
                               std::shared_ptr<ProviderClient> summarizer, std::size_t dim)
    : embedder_(std::move(embedder)), summarizer_(std::move(summarizer)), reference_(dim) {}

Embedding RemoteLanguage::embed(std::span<const std::string> tokens) const {
  if (!embedder_) return reference_.embed(tokens);
  if (tokens.empty()) throw EmptyDescription("cannot embed an empty token list");
  const nlohmann::json payload = {{"tokens", std::vector<std::string>(tokens.begin(), tokens.end())},
                                  {"dim", dimension()}};
  auto values = reply_field<std::vector<double>>(embedder_->request("embed", payload), "embedding", "embed");
  if (values.size() != dimension())
    throw ProviderError("embedder returned " + std::to_string(values.size()) + " values, expected " +
                        std::to_string(dimension()));
  try {
    return Embedding::normalized(std::move(values));
  } catch (const ContractError&) {
    throw ProviderError("embedder returned a zero vector");
  }
}

std::string RemoteLanguage::summarize(std::span<const DescriptionRecord> members) const {
  if (!summarizer_) return reference_.summarize(members);
  if (members.empty()) throw EmptyCluster("cannot summarize an empty cluster");
  std::vector<std::string> texts;
  for (const auto& m : members) texts.push_back(m.text);
  return reply_field<std::string>(summarizer_->request("summarize", {{"descriptions", texts}}), "summary",
                                  "summarize");
}

std::string RemoteLanguage::summarize(const SlotTally& tally, std::span<const DescriptionRecord> members) const {
  if (!summarizer_) return reference_.summarize(tally, members);
  return summarize(members);
}

}  // namespace textswarm
