#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bike/errors.hpp"

namespace bike {

using Vec = std::vector<double>;

// Dense row-major matrix of 64-bit reals. All internal math runs in double
// even when files carry 32-bit payloads.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  Mat(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Mat from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;

  bool operator==(const Mat& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

// Unit-norm copy of v. Throws ZeroVectorError when the norm is below 1e-300.
Vec l2_normalize(const Vec& v);

// Normalizes every row of m in place. Throws ZeroVectorError on a zero row.
void l2_normalize_rows(Mat& m);

// Entry (i, j) is row_i(a) . row_j(b), cosine when `normalize` is set.
Mat similarity_matrix(const Mat& a, const Mat& b, bool normalize);

// Max-subtraction softmax of x / tau. Safe for |x / tau| up to 1e4 and beyond.
Vec stable_softmax(const Vec& x, double tau);
Vec stable_softmax(std::span<const double> x, double tau);

// Shift-stabilized log(sum(exp(x))). Exact for a single element.
double logsumexp(std::span<const double> x);
double logsumexp(const Vec& x);

}  // namespace bike
