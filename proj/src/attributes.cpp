#include "bike/attributes.hpp"

#include <algorithm>
#include <numeric>

#include "bike/surrogate.hpp"

namespace bike {

Vec retrieval_embedding(const Mat& frames) {
  if (frames.rows() == 0) throw EmptyInputError("retrieval_embedding of an empty video");
  Vec mean(frames.cols(), 0.0);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    const auto row = frames.row(t);
    for (std::size_t c = 0; c < frames.cols(); ++c) mean[c] += row[c];
  }
  const double inv_t = 1.0 / static_cast<double>(frames.rows());
  for (double& x : mean) x *= inv_t;
  return l2_normalize(mean);
}

AttributeSet retrieve_attributes(const Vec& video_embedding, const Lexicon& lexicon,
                                 std::size_t k) {
  const std::size_t count = lexicon.embeddings.rows();
  if (k < 1 || k > count) {
    throw BadKError("k must be in [1, " + std::to_string(count) + "], got " +
                    std::to_string(k));
  }
  if (video_embedding.size() != lexicon.embeddings.cols()) {
    throw DimMismatchError("video embedding dimension does not match lexicon");
  }

  Mat query(1, video_embedding.size());
  std::copy(video_embedding.begin(), video_embedding.end(), query.row(0).begin());
  const Mat sims = similarity_matrix(query, lexicon.embeddings, /*normalize=*/true);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  const auto better = [&](std::size_t a, std::size_t b) {
    if (sims.at(0, a) != sims.at(0, b)) return sims.at(0, a) > sims.at(0, b);
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), better);

  AttributeSet out;
  out.phrases.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t idx = order[i];
    out.phrases.push_back({lexicon.phrases[idx], sims.at(0, idx), idx});
  }
  return out;
}

std::string build_attribute_sentence(const AttributeSet& attrs, std::string_view prefix) {
  if (attrs.phrases.empty()) {
    throw EmptyAttributesError("cannot build a sentence from zero attributes");
  }
  const std::size_t slot = prefix.find("{}");
  if (slot == std::string_view::npos) {
    throw MissingPlaceholderError("prefix template lacks the '{}' placeholder");
  }
  std::string joined;
  for (std::size_t i = 0; i < attrs.phrases.size(); ++i) {
    if (i > 0) joined += ", ";
    joined += attrs.phrases[i].phrase;
  }
  std::string out(prefix.substr(0, slot));
  out += joined;
  out += prefix.substr(slot + 2);
  return out;
}

Vec attribute_embedding(const std::string& sentence, const AttributeEmbeddingSource& source) {
  if (tokenize(sentence).empty()) {
    throw EmptyTextError("attribute sentence is blank");
  }
  if (const auto* s = std::get_if<SurrogateSource>(&source)) {
    return surrogate_encode(sentence, s->dim, s->seed);
  }
  return l2_normalize(std::get<IngestedSource>(source).embedding);
}

}  // namespace bike
