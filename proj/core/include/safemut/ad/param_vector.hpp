#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace safemut::ad {

/// Flat vector of every evolvable weight and bias of a network. The mapping
/// from (layer, block, row, column) to a flat index is given by param_layout().
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  const double* data() const { return values_.data(); }

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
};

/// params + delta, elementwise. Throws ConfigError on length mismatch.
ParamVector add(const ParamVector& params, std::span<const double> delta);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace safemut::ad
