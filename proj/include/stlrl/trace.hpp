#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace stlrl {

/// A discrete-time signal: a sequence of fixed-dimension real states stored
/// row-major in one contiguous buffer.
class Trace {
 public:
  explicit Trace(std::size_t dim = 0) : dim_(dim) {}

  Trace(std::size_t dim, std::initializer_list<std::initializer_list<double>> rows) : dim_(dim) {
    for (const auto& row : rows) push_back(std::vector<double>(row));
  }

  /// Scalar signal from a list of samples.
  static Trace scalar(std::initializer_list<double> samples) {
    Trace t(1);
    for (double v : samples) t.push_back(std::span<const double>(&v, 1));
    return t;
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t k) const {
    return {data_.data() + k * dim_, dim_};
  }
  std::span<double> operator[](std::size_t k) { return {data_.data() + k * dim_, dim_}; }

  void push_back(std::span<const double> state) {
    if (state.size() != dim_) throw std::invalid_argument("Trace: state dimension mismatch");
    data_.insert(data_.end(), state.begin(), state.end());
  }

  /// Drops the oldest state.
  void pop_front() { data_.erase(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(dim_)); }

  /// States [first, first + count) as a new trace.
  Trace slice(std::size_t first, std::size_t count) const {
    Trace out(dim_);
    out.data_.assign(data_.begin() + static_cast<std::ptrdiff_t>(first * dim_),
                     data_.begin() + static_cast<std::ptrdiff_t>((first + count) * dim_));
    return out;
  }

  const std::vector<double>& data() const { return data_; }

  bool operator==(const Trace&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

}  // namespace stlrl
