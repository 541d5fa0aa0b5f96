// SPDX-License-Identifier: Apache-2.0
#include "xlt/num/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xlt/error.hpp"

namespace xlt::num {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  for (std::size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape_));
  }
  data_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  for (std::size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape_));
  }
  if (shape_numel(shape_) != data_.size()) {
    throw ShapeError("shape " + shape_str(shape_) + " does not match " + std::to_string(data_.size()) +
                     " values");
  }
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape_.size() < 2) return 1;
  return shape_numel(shape_) / shape_.back();
}

std::size_t Tensor::cols() const { return shape_.empty() ? 1 : shape_.back(); }

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item() needs a one-element tensor, got shape " + shape_str(shape_));
  }
  return data_[0];
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace xlt::num
