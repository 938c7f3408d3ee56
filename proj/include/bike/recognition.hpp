#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bike/attributes.hpp"
#include "bike/concept_spotting.hpp"
#include "bike/store.hpp"

namespace bike {

enum class ScoreBranch { Video, Attributes, Fused };

struct ScoreVector {
  std::vector<double> scores;  // one per category
  ScoreBranch branch = ScoreBranch::Video;
};

// How the attributes branch turns a sentence into e_a when evaluating.
// LexiconPooled feeds the score-weighted sum of the retrieved phrase
// embeddings through the Ingested route; Surrogate encodes the sentence text.
enum class AttributeEncoder { LexiconPooled, Surrogate };

struct EvalConfig {
  double lambda = 0.6;
  double tau_vcs = 0.01;
  Aggregation aggregation = Aggregation::ConceptSpotting;
  bool use_attributes = false;
  std::size_t k_attributes = 5;
  std::string prompt_prefix = std::string(kDefaultPrompt);
  AttributeEncoder attribute_encoder = AttributeEncoder::LexiconPooled;
  std::uint64_t surrogate_seed = 0;
};

// S_V per category. Under ConceptSpotting the video representation is
// recomputed per candidate (saliency conditions on that category's words);
// scoring always uses the sentence-level cls embedding.
ScoreVector video_scores(const Mat& frames, const std::vector<CategoryEntry>& cats,
                         const EvalConfig& cfg);

// S_A per category: cosine of e_a against each cls embedding.
ScoreVector attribute_scores(const Vec& e_a, const std::vector<CategoryEntry>& cats);

// lambda * S_V + (1 - lambda) * S_A, elementwise.
ScoreVector fuse(const ScoreVector& sv, const ScoreVector& sa, double lambda);

// k labels by descending score, ties by ascending label index.
std::vector<int> predict_topk(const ScoreVector& s, std::size_t k);

// e_a for one video under the configured encoder, or std::nullopt when the
// attributes branch is off. Exposed so the CLI and evaluate share one path.
std::optional<Vec> attribute_embedding_for_video(const Mat& frames, const Lexicon& lexicon,
                                                 const EvalConfig& cfg);

// Phrases = category names, embeddings = their cls rows; the default eval
// lexicon when none is supplied.
Lexicon lexicon_from_categories(const std::vector<CategoryEntry>& cats);

struct VideoPrediction {
  std::string video_id;
  int true_label = 0;
  std::vector<int> topk;
};

struct EvalReport {
  double top1 = 0.0;
  double top5 = 0.0;  // computed at k = min(5, K)
  std::size_t num_videos = 0;
  std::size_t num_classes = 0;
  std::vector<VideoPrediction> predictions;
  EvalConfig config;
};

EvalReport evaluate(const DatasetManifest& dataset, const EvalConfig& cfg,
                    const Lexicon* lexicon = nullptr);

struct HalfClassReport {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  std::vector<double> per_repeat;
};

// Each repeat samples floor(K/2) classes without replacement from the seeded
// generator, restricts the dataset, and records top-1.
HalfClassReport half_class_eval(const DatasetManifest& dataset, const EvalConfig& cfg,
                                std::size_t repeats, std::uint64_t seed,
                                const Lexicon* lexicon = nullptr);

}  // namespace bike
