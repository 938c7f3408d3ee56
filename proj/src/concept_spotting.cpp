#include "bike/concept_spotting.hpp"

namespace bike {

SaliencyVector temporal_saliency(const Mat& frames, const Mat& words, double tau_vcs) {
  if (!(tau_vcs > 0.0)) {
    throw NonPositiveTemperatureError("saliency temperature must be positive");
  }
  if (frames.rows() == 0 || words.rows() == 0) {
    throw EmptyInputError("temporal_saliency needs at least one frame and one word");
  }
  const Mat sims = similarity_matrix(frames, words, /*normalize=*/true);  // T x N

  const std::size_t t_count = frames.rows();
  const std::size_t n_count = words.rows();
  SaliencyVector out;
  out.tau_vcs = tau_vcs;
  out.weights.assign(t_count, 0.0);

  Vec column(t_count);
  for (std::size_t n = 0; n < n_count; ++n) {
    for (std::size_t t = 0; t < t_count; ++t) column[t] = sims.at(t, n);
    const Vec soft = stable_softmax(column, tau_vcs);
    for (std::size_t t = 0; t < t_count; ++t) out.weights[t] += soft[t];
  }
  const double inv_n = 1.0 / static_cast<double>(n_count);
  for (double& w : out.weights) w *= inv_n;
  return out;
}

VideoRepresentation aggregate(const Mat& frames, const SaliencyVector& s) {
  if (s.weights.size() != frames.rows()) {
    throw LengthMismatchError("saliency length does not match frame count");
  }
  VideoRepresentation rep;
  rep.method = Aggregation::ConceptSpotting;
  rep.e_v.assign(frames.cols(), 0.0);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    const auto row = frames.row(t);
    const double w = s.weights[t];
    for (std::size_t c = 0; c < frames.cols(); ++c) rep.e_v[c] += w * row[c];
  }
  return rep;
}

VideoRepresentation mean_pool(const Mat& frames) {
  if (frames.rows() == 0) throw EmptyInputError("mean_pool of an empty frame set");
  VideoRepresentation rep;
  rep.method = Aggregation::MeanPool;
  rep.e_v.assign(frames.cols(), 0.0);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    const auto row = frames.row(t);
    for (std::size_t c = 0; c < frames.cols(); ++c) rep.e_v[c] += row[c];
  }
  const double inv_t = 1.0 / static_cast<double>(frames.rows());
  for (double& x : rep.e_v) x *= inv_t;
  return rep;
}

}  // namespace bike
