#include "qgsaddle/grid.hpp"

#include <string>

namespace qgsaddle {

namespace {
void check_points(int n) {
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("grid size must be even and >= 8, got " + std::to_string(n));
}
}  // namespace

Grid2D::Grid2D(int n) : n_(n) { check_points(n); }

Field2D::Field2D(Grid2D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DimensionError("Field2D: " + std::to_string(values_.size()) + " values for a " +
                         std::to_string(grid_.n()) + "^2 grid");
}

Field1D::Field1D(int n) : n_(n), values_(static_cast<std::size_t>(n), 0.0) { check_points(n); }

Field1D::Field1D(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  check_points(n);
  if (values_.size() != static_cast<std::size_t>(n))
    throw DimensionError("Field1D: " + std::to_string(values_.size()) + " values for n=" +
                         std::to_string(n));
}

}  // namespace qgsaddle
