#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace safemut::ad {

/// Row-major dense matrix. Rows are batch entries, columns are units.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A batch of equal-length sequences stored timestep-major: step(t) is a
/// batch x width matrix. Feed-forward data is a sequence of length 1.
class SequenceBatch {
 public:
  SequenceBatch() = default;
  SequenceBatch(std::size_t length, std::size_t batch, std::size_t width);
  explicit SequenceBatch(std::vector<Matrix> steps);

  /// One sequence (batch of 1) from a list of per-timestep vectors.
  static SequenceBatch from_sequence(const std::vector<std::vector<double>>& sequence);
  /// Length-1 batch whose rows are the given vectors.
  static SequenceBatch from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t length() const { return steps_.size(); }
  std::size_t batch() const { return steps_.empty() ? 0 : steps_.front().rows(); }
  std::size_t width() const { return steps_.empty() ? 0 : steps_.front().cols(); }

  Matrix& step(std::size_t t) { return steps_[t]; }
  const Matrix& step(std::size_t t) const { return steps_[t]; }
  const std::vector<Matrix>& steps() const { return steps_; }

  /// Sequences at the given batch rows, in the given order.
  SequenceBatch select_rows(std::span<const std::size_t> rows) const;

  /// Sum over all entries of a*b; shapes must match.
  friend double dot(const SequenceBatch& a, const SequenceBatch& b);

  bool operator==(const SequenceBatch&) const = default;

 private:
  std::vector<Matrix> steps_;
};

}  // namespace safemut::ad
