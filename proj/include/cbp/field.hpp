#pragma once

#include <cassert>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

namespace cbp {

using Field = std::vector<double>;

template <class L>
concept Line = requires(const L& l, std::size_t i) {
  { l.size() } -> std::convertible_to<std::size_t>;
  { l[i] } -> std::convertible_to<double>;
};

template <class L>
concept MutableLine = Line<L> && requires(L& l, std::size_t i, double v) { l[i] = v; };

/// Non-owning view of every `stride`-th element; used for x-direction sweeps of 2D data.
template <class T>
class StridedLine {
 public:
  StridedLine(T* data, std::size_t size, std::ptrdiff_t stride = 1) : data_(data), size_(size), stride_(stride) {}

  T& operator[](std::size_t i) const { return data_[static_cast<std::ptrdiff_t>(i) * stride_]; }
  std::size_t size() const noexcept { return size_; }

 private:
  T* data_;
  std::size_t size_;
  std::ptrdiff_t stride_;
};

/// Nx x Ny grid function, row-major with y contiguous: (i, j) -> data[i * Ny + j].
class Field2D {
 public:
  Field2D() = default;
  Field2D(std::size_t nx, std::size_t ny, double dx, double dy, double fill = 0.0)
      : nx_(nx), ny_(ny), dx_(dx), dy_(dy), data_(nx * ny, fill) {}

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * ny_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * ny_ + j]; }

  Field& values() noexcept { return data_; }
  const Field& values() const noexcept { return data_; }

  /// Line along x at fixed j (strided).
  StridedLine<double> x_line(std::size_t j) { return {data_.data() + j, nx_, static_cast<std::ptrdiff_t>(ny_)}; }
  StridedLine<const double> x_line(std::size_t j) const {
    return {data_.data() + j, nx_, static_cast<std::ptrdiff_t>(ny_)};
  }
  /// Line along y at fixed i (contiguous).
  StridedLine<double> y_line(std::size_t i) { return {data_.data() + i * ny_, ny_, 1}; }
  StridedLine<const double> y_line(std::size_t i) const { return {data_.data() + i * ny_, ny_, 1}; }

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double dx_ = 0.0;
  double dy_ = 0.0;
  Field data_;
};

}  // namespace cbp
