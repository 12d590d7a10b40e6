#include "airink/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "airink/error.hpp"

namespace airink {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  if (shape_size(shape_) != data_.size()) {
    throw ShapeError("shape " + shape_string(shape_) + " does not match " +
                     std::to_string(data_.size()) + " values");
  }
}

RowMatrixMap Tensor::matrix() {
  const auto rows = shape_.empty() ? 1 : static_cast<Eigen::Index>(shape_[0]);
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(data_.size()) / rows;
  return {data_.data(), rows, cols};
}

ConstRowMatrixMap Tensor::matrix() const {
  const auto rows = shape_.empty() ? 1 : static_cast<Eigen::Index>(shape_[0]);
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(data_.size()) / rows;
  return {data_.data(), rows, cols};
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

Tensor& ParameterSet::add(std::string name, Tensor value) {
  if (contains(name)) throw InvalidArgument("duplicate parameter '" + name + "'");
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return values_.back();
}

Tensor& ParameterSet::at(const std::string& name) {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidArgument("no parameter named '" + name + "'");
  return values_[static_cast<std::size_t>(it - names_.begin())];
}

const Tensor& ParameterSet::at(const std::string& name) const {
  return const_cast<ParameterSet*>(this)->at(name);
}

bool ParameterSet::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  for (std::size_t i = 0; i < size(); ++i) out.add(names_[i], airink::zeros_like(values_[i]));
  return out;
}

void ParameterSet::set_zero() {
  for (auto& t : values_) t.fill(0.0);
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : values_) n += t.size();
  return n;
}

std::vector<double> ParameterSet::flatten() const {
  std::vector<double> out;
  out.reserve(scalar_count());
  for (const auto& t : values_) out.insert(out.end(), t.values().begin(), t.values().end());
  return out;
}

void ParameterSet::assign(std::span<const double> flat) {
  if (flat.size() != scalar_count()) throw ShapeError("flat parameter length mismatch");
  std::size_t offset = 0;
  for (auto& t : values_) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), t.size(), t.data().begin());
    offset += t.size();
  }
}

}  // namespace airink
