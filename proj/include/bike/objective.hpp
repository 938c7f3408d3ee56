#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bike/numerics.hpp"

namespace bike {

// One training batch. Rows must be unit-norm (the loss takes raw dot products,
// normalization is the caller's job so gradients stay free of the
// normalization Jacobian).
struct Batch {
  Mat video_embs;                // B x d
  std::optional<Mat> attr_embs;  // B x d, absent when the attributes branch is off
  Mat cat_embs;                  // B x d, row i = embedding of category labels[i]
  std::vector<int> labels;       // length B, nonnegative
  double tau = 0.01;
};

struct LossBreakdown {
  // l_v2c anchors a category row and normalizes over video rows; l_c2v the
  // reverse. Same convention for the attribute pair.
  double l_v2c = 0.0, l_c2v = 0.0, l_v = 0.0;
  double l_a2c = 0.0, l_c2a = 0.0, l_a = 0.0;
  double total = 0.0;
  Mat grad_video, grad_cat;
  std::optional<Mat> grad_attr;
};

// K(i) = indices sharing labels[i]; always contains i, ascending order.
std::vector<std::vector<std::size_t>> positive_sets(const std::vector<int>& labels);

// Entry (i, j) = dot(row_i(x), row_j(y)) / tau.
Mat contrastive_logits(const Mat& x, const Mat& y, double tau);

// Multi-positive cross-entropy for one anchor: logsumexp(logits) minus the
// mean positive logit, evaluated in a fused log1p form that keeps the value
// accurate even when the softmax saturates.
double multipositive_row_loss(std::span<const double> logits,
                              const std::vector<std::size_t>& positives);

struct SymmetricLoss {
  double x2y = 0.0;  // anchors x rows, softmax over y rows
  double y2x = 0.0;
  double sym = 0.0;  // (x2y + y2x) / 2
};

SymmetricLoss symmetric_infonce(const Mat& x, const Mat& y, const std::vector<int>& labels,
                                double tau);

// Both directional pairs plus analytic gradients w.r.t. every embedding row.
LossBreakdown total_loss(const Batch& batch);

// Central finite differences of the total over every embedding coordinate.
// Returns max over coordinates of |numeric - analytic| / max(|analytic|, 1e-8).
double finite_diff_check(const Batch& batch, double epsilon);

}  // namespace bike
