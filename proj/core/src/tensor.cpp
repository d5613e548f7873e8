#include "vipr/tensor.hpp"

#include <functional>
#include <numeric>

namespace vipr {

std::size_t shape_numel(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void expect_shape(const Shape& got, const Shape& expected, const std::string& what) {
  if (got != expected) {
    fail(ErrorKind::kShape, what + ": expected " + shape_to_string(expected) + ", got " + shape_to_string(got));
  }
}

}  // namespace vipr
