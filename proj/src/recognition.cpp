#include "bike/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bike/rng.hpp"

namespace bike {

namespace {

double cosine(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimMismatchError("cosine over different dimensions");
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na < 1e-300 || nb < 1e-300) throw ZeroVectorError("cosine with a zero vector");
  return dot(a, b) / (na * nb);
}

}  // namespace

ScoreVector video_scores(const Mat& frames, const std::vector<CategoryEntry>& cats,
                         const EvalConfig& cfg) {
  ScoreVector out;
  out.branch = ScoreBranch::Video;
  out.scores.reserve(cats.size());
  if (cfg.aggregation == Aggregation::MeanPool) {
    const VideoRepresentation rep = mean_pool(frames);
    for (const CategoryEntry& cat : cats) {
      out.scores.push_back(cosine(rep.e_v, cat.cls_embedding));
    }
  } else {
    for (const CategoryEntry& cat : cats) {
      const SaliencyVector sal = temporal_saliency(frames, cat.word_embeddings, cfg.tau_vcs);
      const VideoRepresentation rep = aggregate(frames, sal);
      out.scores.push_back(cosine(rep.e_v, cat.cls_embedding));
    }
  }
  return out;
}

ScoreVector attribute_scores(const Vec& e_a, const std::vector<CategoryEntry>& cats) {
  ScoreVector out;
  out.branch = ScoreBranch::Attributes;
  out.scores.reserve(cats.size());
  for (const CategoryEntry& cat : cats) {
    out.scores.push_back(cosine(e_a, cat.cls_embedding));
  }
  return out;
}

ScoreVector fuse(const ScoreVector& sv, const ScoreVector& sa, double lambda) {
  if (sv.scores.size() != sa.scores.size()) {
    throw LengthMismatchError("fusing score vectors of different lengths");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw LambdaOutOfRangeError("fusion weight must lie in [0, 1]");
  }
  ScoreVector out;
  out.branch = ScoreBranch::Fused;
  out.scores.resize(sv.scores.size());
  for (std::size_t i = 0; i < sv.scores.size(); ++i) {
    out.scores[i] = lambda * sv.scores[i] + (1.0 - lambda) * sa.scores[i];
  }
  return out;
}

std::vector<int> predict_topk(const ScoreVector& s, std::size_t k) {
  const std::size_t count = s.scores.size();
  if (k < 1 || k > count) {
    throw BadKError("top-k must satisfy 1 <= k <= " + std::to_string(count));
  }
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](int a, int b) {
                      if (s.scores[static_cast<std::size_t>(a)] !=
                          s.scores[static_cast<std::size_t>(b)]) {
                        return s.scores[static_cast<std::size_t>(a)] >
                               s.scores[static_cast<std::size_t>(b)];
                      }
                      return a < b;
                    });
  order.resize(k);
  return order;
}

Lexicon lexicon_from_categories(const std::vector<CategoryEntry>& cats) {
  Lexicon lex;
  if (cats.empty()) throw EmptyDatasetError("no categories to build a lexicon from");
  lex.embeddings = Mat(cats.size(), cats.front().cls_embedding.size());
  for (std::size_t i = 0; i < cats.size(); ++i) {
    lex.phrases.push_back(cats[i].name);
    if (cats[i].cls_embedding.size() != lex.embeddings.cols()) {
      throw DimMismatchError("categories disagree on embedding dimension");
    }
    std::copy(cats[i].cls_embedding.begin(), cats[i].cls_embedding.end(),
              lex.embeddings.row(i).begin());
  }
  return lex;
}

std::optional<Vec> attribute_embedding_for_video(const Mat& frames, const Lexicon& lexicon,
                                                 const EvalConfig& cfg) {
  if (!cfg.use_attributes) return std::nullopt;
  const Vec vemb = retrieval_embedding(frames);
  const std::size_t k = std::min(cfg.k_attributes, lexicon.embeddings.rows());
  const AttributeSet attrs = retrieve_attributes(vemb, lexicon, k);
  const std::string sentence = build_attribute_sentence(attrs, cfg.prompt_prefix);

  if (cfg.attribute_encoder == AttributeEncoder::Surrogate) {
    return attribute_embedding(sentence,
                               SurrogateSource{lexicon.embeddings.cols(), cfg.surrogate_seed});
  }

  // Score-weighted pooling of the retrieved phrase embeddings stands in for a
  // text encoder; anti-correlated phrases are dropped from the pool.
  Vec pooled(lexicon.embeddings.cols(), 0.0);
  for (const ScoredPhrase& p : attrs.phrases) {
    const double w = std::max(p.score, 0.0);
    const auto row = lexicon.embeddings.row(p.lexicon_index);
    for (std::size_t c = 0; c < pooled.size(); ++c) pooled[c] += w * row[c];
  }
  if (norm2(pooled) < 1e-300) {
    pooled.assign(lexicon.embeddings.cols(), 0.0);
    for (const ScoredPhrase& p : attrs.phrases) {
      const auto row = lexicon.embeddings.row(p.lexicon_index);
      for (std::size_t c = 0; c < pooled.size(); ++c) pooled[c] += row[c];
    }
  }
  return attribute_embedding(sentence, IngestedSource{std::move(pooled)});
}

EvalReport evaluate(const DatasetManifest& dataset, const EvalConfig& cfg,
                    const Lexicon* lexicon) {
  if (dataset.videos.empty() || dataset.categories.empty()) {
    throw EmptyDatasetError("evaluation needs at least one video and one category");
  }
  EvalReport report;
  report.config = cfg;
  report.num_videos = dataset.videos.size();
  report.num_classes = dataset.categories.size();

  Lexicon derived;
  const Lexicon* lex = lexicon;
  if (cfg.use_attributes && lex == nullptr) {
    derived = lexicon_from_categories(dataset.categories);
    lex = &derived;
  }

  const std::size_t k = std::min<std::size_t>(5, dataset.categories.size());
  std::size_t hits1 = 0;
  std::size_t hits5 = 0;
  for (const VideoEntry& entry : dataset.videos) {
    ScoreVector scores = video_scores(entry.video.frames, dataset.categories, cfg);
    if (cfg.use_attributes) {
      const std::optional<Vec> e_a =
          attribute_embedding_for_video(entry.video.frames, *lex, cfg);
      scores = fuse(scores, attribute_scores(*e_a, dataset.categories), cfg.lambda);
    }
    VideoPrediction pred;
    pred.video_id = entry.video.video_id;
    pred.true_label = entry.label;
    pred.topk = predict_topk(scores, k);
    if (pred.topk.front() == entry.label) ++hits1;
    if (std::find(pred.topk.begin(), pred.topk.end(), entry.label) != pred.topk.end()) {
      ++hits5;
    }
    report.predictions.push_back(std::move(pred));
  }
  report.top1 = static_cast<double>(hits1) / static_cast<double>(dataset.videos.size());
  report.top5 = static_cast<double>(hits5) / static_cast<double>(dataset.videos.size());
  return report;
}

HalfClassReport half_class_eval(const DatasetManifest& dataset, const EvalConfig& cfg,
                                std::size_t repeats, std::uint64_t seed,
                                const Lexicon* lexicon) {
  const std::size_t k_classes = dataset.categories.size();
  if (k_classes < 2) {
    throw TooFewClassesError("half-class protocol needs at least two classes");
  }
  if (repeats < 1) throw InvalidArgumentError("need at least one repeat");

  const std::size_t subset_size = k_classes / 2;
  HalfClassReport report;
  report.per_repeat.reserve(repeats);

  for (std::size_t rep = 0; rep < repeats; ++rep) {
    SplitMix64 rng(mix64(seed, rep));
    std::vector<std::size_t> pool(k_classes);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < subset_size; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> chosen(pool.begin(),
                                    pool.begin() + static_cast<std::ptrdiff_t>(subset_size));
    std::sort(chosen.begin(), chosen.end());

    std::vector<int> remap(k_classes, -1);
    DatasetManifest restricted;
    restricted.dim = dataset.dim;
    for (std::size_t new_label = 0; new_label < chosen.size(); ++new_label) {
      CategoryEntry cat = dataset.categories[chosen[new_label]];
      remap[chosen[new_label]] = static_cast<int>(new_label);
      cat.label = static_cast<int>(new_label);
      restricted.categories.push_back(std::move(cat));
    }
    for (const VideoEntry& v : dataset.videos) {
      const int new_label = remap[static_cast<std::size_t>(v.label)];
      if (new_label < 0) continue;
      VideoEntry copy = v;
      copy.label = new_label;
      restricted.videos.push_back(std::move(copy));
    }
    if (restricted.videos.empty()) {
      report.per_repeat.push_back(0.0);
      continue;
    }
    report.per_repeat.push_back(evaluate(restricted, cfg, lexicon).top1);
  }

  double mean = 0.0;
  for (double a : report.per_repeat) mean += a;
  mean /= static_cast<double>(report.per_repeat.size());
  double var = 0.0;
  for (double a : report.per_repeat) var += (a - mean) * (a - mean);
  var /= static_cast<double>(report.per_repeat.size());
  report.mean = mean;
  report.stddev = std::sqrt(var);
  return report;
}

}  // namespace bike
