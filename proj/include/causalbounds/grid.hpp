#pragma once

#include <Eigen/Dense>

#include "causalbounds/errors.hpp"

namespace causalbounds {

// Discrete (A, Y, W, U) grid. Cells are flattened row-major with u fastest:
// flat(i,j,k,l) = ((i*n_y + j)*n_w + k)*n_u + l.
struct GridSpec {
  int n_a = 0;
  int n_y = 0;
  int n_w = 0;
  int n_u = 0;
  Eigen::VectorXd y_values;  // outcome value attached to each y index

  int cells() const { return n_a * n_y * n_w * n_u; }
  int ayw_cells() const { return n_a * n_y * n_w; }

  int flat(int i, int j, int k, int l) const {
    return ((i * n_y + j) * n_w + k) * n_u + l;
  }
  int flat_ayw(int i, int j, int k) const { return (i * n_y + j) * n_w + k; }

  void validate() const {
    if (n_a < 1 || n_y < 1 || n_w < 1 || n_u < 1)
      throw config_error("grid: all axis sizes must be >= 1");
    if (y_values.size() != n_y)
      throw config_error("grid: y_values length must equal n_y");
  }

  bool operator==(const GridSpec& o) const {
    return n_a == o.n_a && n_y == o.n_y && n_w == o.n_w && n_u == o.n_u &&
           y_values == o.y_values;
  }
};

// A joint density over the grid cells (entries sum to 1 for proper densities;
// relaxed-set samples may deviate within the slack).
struct JointDensity {
  GridSpec grid;
  Eigen::VectorXd p;

  double at(int i, int j, int k, int l) const { return p[grid.flat(i, j, k, l)]; }
  double& at(int i, int j, int k, int l) { return p[grid.flat(i, j, k, l)]; }
};

}  // namespace causalbounds
