#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bike/store.hpp"

namespace bike {

inline constexpr std::string_view kDefaultPrompt = "This is a video about {}";
// Identity template; reproduces the prompt-off ablation.
inline constexpr std::string_view kNoPrompt = "{}";

struct ScoredPhrase {
  std::string phrase;
  double score = 0.0;
  std::size_t lexicon_index = 0;
};

// Top-k lexicon phrases by cosine, descending; ties by ascending index.
struct AttributeSet {
  std::vector<ScoredPhrase> phrases;
};

// Normalized mean-pooled video embedding used for lexicon retrieval.
Vec retrieval_embedding(const Mat& frames);

AttributeSet retrieve_attributes(const Vec& video_embedding, const Lexicon& lexicon,
                                 std::size_t k);

// Joins phrases with ", " and substitutes them into the prefix's "{}".
std::string build_attribute_sentence(const AttributeSet& attrs, std::string_view prefix);

struct SurrogateSource {
  std::size_t dim = 0;
  std::uint64_t seed = 0;
};
struct IngestedSource {
  Vec embedding;
};
using AttributeEmbeddingSource = std::variant<SurrogateSource, IngestedSource>;

// e_a for the attribute sentence: surrogate-encoded, or a supplied vector
// re-normalized. Unit-norm either way.
Vec attribute_embedding(const std::string& sentence, const AttributeEmbeddingSource& source);

}  // namespace bike
