#include "textswarm/language.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "textswarm/errors.hpp"
#include "textswarm/hashing.hpp"
#include "textswarm/vocabulary.hpp"

namespace textswarm {

namespace {

constexpr std::array<std::string_view, 7> kStopwords = {"a",    "an",      "the", "with",
                                                        "and",  "wearing", "in"};

bool is_stopword(std::string_view w) {
  return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end();
}

// Smallest nonce for which every vocabulary token lands in its own bucket at
// the default dimension; the vocab-report command and a unit test re-check it.
constexpr int kIndexSaltNonce = 4355;

const std::uint64_t kIndexSalt =
    fnv1a64(std::string(kEmbeddingHashVersion) + "/index/" + std::to_string(kIndexSaltNonce));
const std::uint64_t kSignSalt = fnv1a64(std::string(kEmbeddingHashVersion) + "/sign");

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !is_stopword(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      cur.push_back(static_cast<char>(c));
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Embedding Embedding::normalized(std::vector<double> raw) {
  double sq = 0.0;
  for (double v : raw) sq += v * v;
  if (raw.empty() || !(sq > 0.0) || !std::isfinite(sq))
    throw ContractError("cannot normalize an empty or zero vector");
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : raw) v *= inv;
  return Embedding(std::move(raw));
}

FeatureSlot feature_slot(std::string_view feature, std::size_t dim) {
  if (dim == 0) throw ContractError("embedding dimension must be positive");
  const std::uint64_t index = fmix64(fnv1a64(feature, kIndexSalt));
  const std::uint64_t sign = fmix64(fnv1a64(feature, kSignSalt));
  return {static_cast<std::size_t>(index % dim), (sign >> 63) ? -1.0 : 1.0};
}

std::vector<std::string> embedding_features(std::span<const std::string> tokens) {
  std::vector<std::string> features(tokens.begin(), tokens.end());
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
    features.push_back(tokens[i] + " " + tokens[i + 1]);
  return features;
}

Embedding embed(std::span<const std::string> tokens, std::size_t dim) {
  if (tokens.empty()) throw EmptyDescription("cannot embed an empty token list");
  std::vector<double> v(dim, 0.0);
  for (const auto& f : embedding_features(tokens)) {
    const FeatureSlot slot = feature_slot(f, dim);
    v[slot.index] += slot.sign;
  }
  return Embedding::normalized(std::move(v));
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim() || a.empty())
    throw ContractError("cosine requires two non-empty embeddings of equal dimension");
  const auto x = a.values();
  const auto y = b.values();
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return std::clamp(dot, -1.0, 1.0);
}

std::string summarize(std::span<const DescriptionRecord> members) {
  if (members.empty()) throw EmptyCluster("cannot summarize an empty cluster");
  SlotTally tally;
  for (const auto& m : members) tally.add(parse_description(m.text));
  return tally.render();
}

std::vector<HashCollision> vocabulary_collisions(std::size_t dim) {
  std::map<std::size_t, std::vector<std::pair<std::string, double>>> buckets;
  for (const auto& t : vocabulary_tokens()) {
    const auto slot = feature_slot(t, dim);
    buckets[slot.index].emplace_back(t, slot.sign);
  }
  std::vector<HashCollision> out;
  for (const auto& [index, words] : buckets)
    for (std::size_t i = 0; i < words.size(); ++i)
      for (std::size_t j = i + 1; j < words.size(); ++j)
        out.push_back({words[i].first, words[j].first, index, words[i].second == words[j].second});
  return out;
}

ReferenceLanguage::ReferenceLanguage(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ContractError("embedding dimension must be positive");
}

Embedding ReferenceLanguage::embed(std::span<const std::string> tokens) const {
  return textswarm::embed(tokens, dim_);
}

std::string ReferenceLanguage::summarize(std::span<const DescriptionRecord> members) const {
  return textswarm::summarize(members);
}

std::string ReferenceLanguage::summarize(const SlotTally& tally,
                                         std::span<const DescriptionRecord> members) const {
  if (members.empty() || tally.member_count() == 0)
    throw EmptyCluster("cannot summarize an empty cluster");
  return tally.render();
}

std::shared_ptr<const LanguageBackend> reference_language(std::size_t dim) {
  return std::make_shared<const ReferenceLanguage>(dim);
}

}  // namespace textswarm
