#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace airink {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixMap = Eigen::Map<RowMatrix>;
using ConstRowMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

/// Dense row-major float64 tensor.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);
  Tensor(std::initializer_list<std::size_t> shape) : Tensor(Shape(shape)) {}

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Row-major matrix view: first dimension by the product of the rest.
  RowMatrixMap matrix();
  ConstRowMatrixMap matrix() const;
  VectorMap vector() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
  ConstVectorMap vector() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

  void fill(double v);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  // Fixed alignment keeps Eigen's vectorised reductions bitwise reproducible.
  Shape shape_;
  std::vector<double, Eigen::aligned_allocator<double>> data_;
};

Tensor zeros_like(const Tensor& t);

/// Ordered named parameter collection. Gradient and velocity stores reuse it
/// with identical names and shapes.
class ParameterSet {
 public:
  Tensor& add(std::string name, Tensor value);

  std::size_t size() const noexcept { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Tensor& operator[](std::size_t i) { return values_[i]; }
  const Tensor& operator[](std::size_t i) const { return values_[i]; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::span<Tensor> tensors() noexcept { return values_; }
  std::span<const Tensor> tensors() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  ParameterSet zeros_like() const;
  void set_zero();
  std::size_t scalar_count() const;

  /// Flattened copy of every scalar in declaration order, and the inverse.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
};

}  // namespace airink
