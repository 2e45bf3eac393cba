#include "safemut/ad/tensor.hpp"

#include <string>

#include "safemut/errors.hpp"

namespace safemut::ad {

SequenceBatch::SequenceBatch(std::size_t length, std::size_t batch, std::size_t width)
    : steps_(length, Matrix(batch, width)) {}

SequenceBatch::SequenceBatch(std::vector<Matrix> steps) : steps_(std::move(steps)) {
  for (const auto& m : steps_) {
    if (m.rows() != steps_.front().rows() || m.cols() != steps_.front().cols()) {
      throw ConfigError("sequence batch steps must share one shape");
    }
  }
}

SequenceBatch SequenceBatch::from_sequence(const std::vector<std::vector<double>>& sequence) {
  std::vector<Matrix> steps;
  steps.reserve(sequence.size());
  for (const auto& v : sequence) {
    Matrix m(1, v.size());
    std::copy(v.begin(), v.end(), m.data());
    steps.push_back(std::move(m));
  }
  return SequenceBatch(std::move(steps));
}

SequenceBatch SequenceBatch::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t width = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) throw ConfigError("ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return SequenceBatch(std::vector<Matrix>{std::move(m)});
}

SequenceBatch SequenceBatch::select_rows(std::span<const std::size_t> rows) const {
  std::vector<Matrix> steps;
  steps.reserve(steps_.size());
  for (const auto& m : steps_) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] >= m.rows()) throw ConfigError("row index out of range");
      auto src = m.row(rows[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    steps.push_back(std::move(out));
  }
  return SequenceBatch(std::move(steps));
}

double dot(const SequenceBatch& a, const SequenceBatch& b) {
  if (a.length() != b.length() || a.batch() != b.batch() || a.width() != b.width()) {
    throw ConfigError("dot: sequence batch shapes differ");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < a.length(); ++t) {
    auto x = a.step(t).flat();
    auto y = b.step(t).flat();
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  }
  return sum;
}

}  // namespace safemut::ad
