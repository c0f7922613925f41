#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textswarm/description_template.hpp"
#include "textswarm/record.hpp"

namespace textswarm {

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

// Lowercase, split on non-alphanumerics, drop {a, an, the, with, and, wearing, in}.
std::vector<std::string> tokenize(std::string_view text);

// Unit-norm dense vector. A default-constructed Embedding is empty (dimension 0)
// and only serves as a placeholder; the zero vector is never produced.
class Embedding {
 public:
  Embedding() = default;

  // L2-normalizes `raw`. Throws ContractError for an empty or all-zero input.
  static Embedding normalized(std::vector<double> raw);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

// Hashed bucket and sign for one feature string.
struct FeatureSlot {
  std::size_t index = 0;
  double sign = 1.0;
};

inline constexpr std::string_view kEmbeddingHashVersion = "textswarm-embed-v1";

FeatureSlot feature_slot(std::string_view feature, std::size_t dim);

// Unigrams followed by adjacent bigrams ("left right").
std::vector<std::string> embedding_features(std::span<const std::string> tokens);

// Signed feature hashing of unigrams and bigrams, L2-normalized.
// Throws EmptyDescription for an empty token list.
Embedding embed(std::span<const std::string> tokens, std::size_t dim = kDefaultEmbeddingDim);

// Dot product clamped to [-1, 1]. Dimensions must agree.
double cosine(const Embedding& a, const Embedding& b);

// Majority-per-slot consensus rendered through the canonical template.
// Throws EmptyCluster for an empty member list.
std::string summarize(std::span<const DescriptionRecord> members);

struct HashCollision {
  std::string first;
  std::string second;
  std::size_t index = 0;
  bool same_sign = false;
};

// Vocabulary tokens sharing a bucket at the given dimension.
std::vector<HashCollision> vocabulary_collisions(std::size_t dim = kDefaultEmbeddingDim);

// The embedder and summarizer used by cluster databases. The reference
// implementation is the hashed embedding and the slot-consensus summarizer.
class LanguageBackend {
 public:
  virtual ~LanguageBackend() = default;

  virtual std::size_t dimension() const = 0;
  virtual Embedding embed(std::span<const std::string> tokens) const = 0;
  virtual std::string summarize(std::span<const DescriptionRecord> members) const = 0;

  // Clusters keep a running tally; backends that can use it skip re-reading members.
  virtual std::string summarize(const SlotTally& tally,
                                std::span<const DescriptionRecord> members) const {
    (void)tally;
    return summarize(members);
  }
};

class ReferenceLanguage final : public LanguageBackend {
 public:
  explicit ReferenceLanguage(std::size_t dim = kDefaultEmbeddingDim);

  std::size_t dimension() const override { return dim_; }
  Embedding embed(std::span<const std::string> tokens) const override;
  std::string summarize(std::span<const DescriptionRecord> members) const override;
  std::string summarize(const SlotTally& tally,
                        std::span<const DescriptionRecord> members) const override;

 private:
  std::size_t dim_;
};

std::shared_ptr<const LanguageBackend> reference_language(std::size_t dim = kDefaultEmbeddingDim);

}  // namespace textswarm
