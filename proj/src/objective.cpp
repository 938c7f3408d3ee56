#include "bike/objective.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bike {

namespace {

constexpr double kUnitNormTol = 1e-9;

void require_unit_rows(const Mat& m, const char* what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (std::abs(norm2(m.row(r)) - 1.0) > kUnitNormTol) {
      throw InvalidArgumentError(std::string(what) + " row " + std::to_string(r) +
                                 " is not unit-norm; normalize before the loss");
    }
  }
}

// Value and d(value)/d(logits) of the directional multi-positive loss over a
// full logit matrix: (1/B) sum_i [lse_i - mean_{k in K(i)} z_ik].
struct DirectionalResult {
  double value = 0.0;
  Mat dlogits;  // B x B
};

double row_loss_fused(std::span<const double> z, const std::vector<std::size_t>& positives,
                      Vec* probs_out) {
  const std::size_t m =
      static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  double rest = 0.0;
  if (probs_out) probs_out->assign(z.size(), 0.0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double e = std::exp(z[j] - z[m]);
    if (probs_out) (*probs_out)[j] = e;
    if (j != m) rest += e;
  }
  if (probs_out) {
    const double denom = 1.0 + rest;
    for (double& p : *probs_out) p /= denom;
  }
  double pos_gap = 0.0;  // mean over positives of (z_m - z_k), each term >= 0
  for (std::size_t k : positives) pos_gap += z[m] - z[k];
  pos_gap /= static_cast<double>(positives.size());
  return pos_gap + std::log1p(rest);
}

DirectionalResult directional_loss(const Mat& logits,
                                   const std::vector<std::vector<std::size_t>>& positives,
                                   bool with_grad) {
  const std::size_t b = logits.rows();
  DirectionalResult res;
  if (with_grad) res.dlogits = Mat(b, b);
  Vec probs;
  double acc = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    acc += row_loss_fused(logits.row(i), positives[i], with_grad ? &probs : nullptr);
    if (with_grad) {
      const double inv_b = 1.0 / static_cast<double>(b);
      const double pos_w = 1.0 / static_cast<double>(positives[i].size());
      for (std::size_t j = 0; j < b; ++j) res.dlogits.at(i, j) = inv_b * probs[j];
      for (std::size_t k : positives[i]) res.dlogits.at(i, k) -= inv_b * pos_w;
    }
  }
  res.value = acc / static_cast<double>(b);
  return res;
}

// grad_x += scale/tau * G * y ; grad_y += scale/tau * G^T * x
void accumulate_grads(const Mat& g, const Mat& x, const Mat& y, double tau, double scale,
                      Mat& grad_x, Mat& grad_y) {
  const std::size_t b = x.rows();
  const std::size_t d = x.cols();
  const double s = scale / tau;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double gij = s * g.at(i, j);
      const auto yj = y.row(j);
      const auto xi = x.row(i);
      auto gxi = grad_x.row(i);
      auto gyj = grad_y.row(j);
      for (std::size_t c = 0; c < d; ++c) {
        gxi[c] += gij * yj[c];
        gyj[c] += gij * xi[c];
      }
    }
  }
}

double total_value(const Mat& video, const Mat* attr, const Mat& cat,
                   const std::vector<std::vector<std::size_t>>& positives, double tau) {
  const Mat zc2v = contrastive_logits(video, cat, tau);
  const Mat zv2c = contrastive_logits(cat, video, tau);
  const auto dir_value = [&](const Mat& z) {
    double acc = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
      acc += row_loss_fused(z.row(i), positives[i], nullptr);
    }
    return acc / static_cast<double>(z.rows());
  };
  double total = 0.5 * (dir_value(zv2c) + dir_value(zc2v));
  if (attr) {
    const Mat zc2a = contrastive_logits(*attr, cat, tau);
    const Mat za2c = contrastive_logits(cat, *attr, tau);
    total += 0.5 * (dir_value(za2c) + dir_value(zc2a));
  }
  return total;
}

}  // namespace

std::vector<std::vector<std::size_t>> positive_sets(const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  std::vector<std::vector<std::size_t>> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = by_label[labels[i]];
  return out;
}

Mat contrastive_logits(const Mat& x, const Mat& y, double tau) {
  if (!(tau > 0.0)) {
    throw NonPositiveTemperatureError("logit temperature must be positive");
  }
  if (x.cols() != y.cols()) {
    throw DimMismatchError("contrastive_logits operands disagree on dimension");
  }
  Mat z = similarity_matrix(x, y, /*normalize=*/false);
  for (double& v : z.values()) v /= tau;
  return z;
}

double multipositive_row_loss(std::span<const double> logits,
                              const std::vector<std::size_t>& positives) {
  if (logits.empty() || positives.empty()) {
    throw EmptyInputError("row loss needs logits and at least one positive");
  }
  return row_loss_fused(logits, positives, nullptr);
}

SymmetricLoss symmetric_infonce(const Mat& x, const Mat& y, const std::vector<int>& labels,
                                double tau) {
  if (x.rows() != y.rows() || x.rows() != labels.size()) {
    throw DimMismatchError("symmetric_infonce needs matching row and label counts");
  }
  const auto positives = positive_sets(labels);
  SymmetricLoss out;
  out.x2y = directional_loss(contrastive_logits(x, y, tau), positives, false).value;
  out.y2x = directional_loss(contrastive_logits(y, x, tau), positives, false).value;
  out.sym = 0.5 * (out.x2y + out.y2x);
  return out;
}

LossBreakdown total_loss(const Batch& batch) {
  const std::size_t b = batch.video_embs.rows();
  if (b == 0) throw EmptyInputError("empty batch");
  if (batch.cat_embs.rows() != b || batch.labels.size() != b ||
      (batch.attr_embs && batch.attr_embs->rows() != b)) {
    throw DimMismatchError("batch matrices and labels disagree on batch size");
  }
  if (batch.cat_embs.cols() != batch.video_embs.cols() ||
      (batch.attr_embs && batch.attr_embs->cols() != batch.video_embs.cols())) {
    throw DimMismatchError("batch matrices disagree on embedding dimension");
  }
  if (!(batch.tau > 0.0)) {
    throw NonPositiveTemperatureError("batch temperature must be positive");
  }
  for (int label : batch.labels) {
    if (label < 0) throw InvalidArgumentError("negative label in batch");
  }
  require_unit_rows(batch.video_embs, "video_embs");
  require_unit_rows(batch.cat_embs, "cat_embs");
  if (batch.attr_embs) require_unit_rows(*batch.attr_embs, "attr_embs");

  const auto positives = positive_sets(batch.labels);
  const std::size_t d = batch.video_embs.cols();

  LossBreakdown out;
  out.grad_video = Mat(b, d);
  out.grad_cat = Mat(b, d);

  // Video pair, Eq. 7 structure: l_v2c anchors categories over video columns.
  {
    const DirectionalResult v2c =
        directional_loss(contrastive_logits(batch.cat_embs, batch.video_embs, batch.tau),
                         positives, true);
    const DirectionalResult c2v =
        directional_loss(contrastive_logits(batch.video_embs, batch.cat_embs, batch.tau),
                         positives, true);
    out.l_v2c = v2c.value;
    out.l_c2v = c2v.value;
    out.l_v = 0.5 * (out.l_v2c + out.l_c2v);
    accumulate_grads(v2c.dlogits, batch.cat_embs, batch.video_embs, batch.tau, 0.5,
                     out.grad_cat, out.grad_video);
    accumulate_grads(c2v.dlogits, batch.video_embs, batch.cat_embs, batch.tau, 0.5,
                     out.grad_video, out.grad_cat);
  }

  if (batch.attr_embs) {
    out.grad_attr = Mat(b, d);
    const DirectionalResult a2c =
        directional_loss(contrastive_logits(batch.cat_embs, *batch.attr_embs, batch.tau),
                         positives, true);
    const DirectionalResult c2a =
        directional_loss(contrastive_logits(*batch.attr_embs, batch.cat_embs, batch.tau),
                         positives, true);
    out.l_a2c = a2c.value;
    out.l_c2a = c2a.value;
    out.l_a = 0.5 * (out.l_a2c + out.l_c2a);
    accumulate_grads(a2c.dlogits, batch.cat_embs, *batch.attr_embs, batch.tau, 0.5,
                     out.grad_cat, *out.grad_attr);
    accumulate_grads(c2a.dlogits, *batch.attr_embs, batch.cat_embs, batch.tau, 0.5,
                     *out.grad_attr, out.grad_cat);
  }

  out.total = out.l_v + out.l_a;
  return out;
}

double finite_diff_check(const Batch& batch, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw InvalidArgumentError("epsilon must lie in [1e-7, 1e-3]");
  }
  const LossBreakdown analytic = total_loss(batch);
  const auto positives = positive_sets(batch.labels);

  Mat video = batch.video_embs;
  Mat cat = batch.cat_embs;
  std::optional<Mat> attr = batch.attr_embs;

  const auto value = [&]() {
    return total_value(video, attr ? &*attr : nullptr, cat, positives, batch.tau);
  };

  double max_err = 0.0;
  const auto sweep = [&](Mat& m, const Mat& grad) {
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
      const double saved = m.values()[idx];
      m.values()[idx] = saved + epsilon;
      const double up = value();
      m.values()[idx] = saved - epsilon;
      const double down = value();
      m.values()[idx] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double ana = grad.values()[idx];
      const double err = std::abs(numeric - ana) / std::max(std::abs(ana), 1e-8);
      max_err = std::max(max_err, err);
    }
  };
  sweep(video, analytic.grad_video);
  sweep(cat, analytic.grad_cat);
  if (attr) sweep(*attr, *analytic.grad_attr);
  return max_err;
}

}  // namespace bike
