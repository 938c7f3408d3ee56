#include "bike/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace bike {

namespace {

constexpr double kZeroNormThreshold = 1e-300;

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NonFiniteError(std::string(what) + " contains a non-finite entry");
    }
  }
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw DimMismatchError("matrix payload size does not match rows*cols");
  }
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Mat m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw DimMismatchError("ragged rows passed to Mat::from_rows");
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

bool Mat::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimMismatchError("dot product over different lengths");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

Vec l2_normalize(const Vec& v) {
  if (v.empty()) throw EmptyInputError("l2_normalize of an empty vector");
  require_finite(v, "l2_normalize input");
  const double n = norm2(v);
  if (n < kZeroNormThreshold) {
    throw ZeroVectorError("cannot normalize a (near-)zero vector");
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

void l2_normalize_rows(Mat& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    require_finite(row, "matrix row");
    const double n = norm2(row);
    if (n < kZeroNormThreshold) {
      throw ZeroVectorError("cannot normalize a (near-)zero matrix row");
    }
    for (double& x : row) x /= n;
  }
}

Mat similarity_matrix(const Mat& a, const Mat& b, bool normalize) {
  if (a.cols() != b.cols()) {
    throw DimMismatchError("similarity_matrix operands disagree on dimension");
  }
  if (!a.all_finite() || !b.all_finite()) {
    throw NonFiniteError("similarity_matrix input contains a non-finite entry");
  }
  std::vector<double> norm_a, norm_b;
  if (normalize) {
    norm_a.resize(a.rows());
    norm_b.resize(b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
      norm_a[i] = norm2(a.row(i));
      if (norm_a[i] < kZeroNormThreshold) {
        throw ZeroVectorError("cosine against a zero row");
      }
    }
    for (std::size_t j = 0; j < b.rows(); ++j) {
      norm_b[j] = norm2(b.row(j));
      if (norm_b[j] < kZeroNormThreshold) {
        throw ZeroVectorError("cosine against a zero row");
      }
    }
  }
  Mat out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ra = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double d = dot(ra, b.row(j));
      if (normalize) d /= norm_a[i] * norm_b[j];
      out.at(i, j) = d;
    }
  }
  return out;
}

Vec stable_softmax(std::span<const double> x, double tau) {
  if (!(tau > 0.0)) {
    throw NonPositiveTemperatureError("softmax temperature must be positive");
  }
  if (x.empty()) throw EmptyInputError("softmax of an empty vector");
  require_finite(x, "softmax input");

  Vec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] / tau;
  const double m = *std::max_element(z.begin(), z.end());
  double denom = 0.0;
  Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - m);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  return out;
}

Vec stable_softmax(const Vec& x, double tau) {
  return stable_softmax(std::span<const double>(x), tau);
}

double logsumexp(std::span<const double> x) {
  if (x.empty()) throw EmptyInputError("logsumexp of an empty vector");
  require_finite(x, "logsumexp input");
  const double m = *std::max_element(x.begin(), x.end());
  if (x.size() == 1) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

double logsumexp(const Vec& x) { return logsumexp(std::span<const double>(x)); }

}  // namespace bike
