#pragma once

#include "bike/numerics.hpp"

namespace bike {

enum class Aggregation { MeanPool, ConceptSpotting };

// Per-frame weights for one (video, category) pair; nonnegative, sum to 1.
struct SaliencyVector {
  Vec weights;
  double tau_vcs = 0.01;
};

struct VideoRepresentation {
  Vec e_v;
  Aggregation method = Aggregation::MeanPool;
};

// Category-conditioned temporal saliency: per word, a softmax over frames of
// the word-frame cosines at temperature tau_vcs, averaged over words. Rows of
// both matrices are re-normalized via the cosine, so near-unit inputs land in
// the exact unit-norm regime.
SaliencyVector temporal_saliency(const Mat& frames, const Mat& words, double tau_vcs);

// Saliency-weighted sum of frame rows.
VideoRepresentation aggregate(const Mat& frames, const SaliencyVector& s);

// Arithmetic mean of frame rows.
VideoRepresentation mean_pool(const Mat& frames);

}  // namespace bike
