#pragma once

// Worked examples and small negative collections shared by the test binaries.

#include <vector>

#include "sdc/collection.hpp"

namespace fixtures {

using sdc::Matrix;

inline Matrix<double> mat(int n, std::initializer_list<double> values) {
  Matrix<double> m(n, n);
  auto it = values.begin();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = *it++;
  return m;
}

// Four 5x5 nonsingular-anchor matrices, SDC.
inline std::vector<Matrix<double>> five_by_five() {
  return {
      mat(5, {2, 4, -6, -8, -14, 4, 10, -14, -20, -38, -6, -14, 22, 22, 18, -8, -20, 22, 60, 186,
              -14, -38, 18, 186, 761}),
      mat(5, {5, 10, -15, -20, -35, 10, 25, -35, -50, -95, -15, -35, 55, 55, 45, -20, -50, 55, 150, 465,
              -35, -95, 45, 465, 1900}),
      mat(5, {-1, -2, 3, 4, 7, -2, -5, 7, 10, 19, 3, 7, -11, -11, -9, 4, 10, -11, -25, -73,
              7, 19, -9, -73, -295}),
      mat(5, {1, 2, -3, -4, -7, 2, 5, -7, -10, -19, -3, -7, 17, -7, -93, -4, -10, -7, 83, 395,
              -7, -19, -93, 395, 2104}),
  };
}

// Block-diagonalizing transform for five_by_five(): R^T C^1 R = diag(2, [[2,4],[4,10]], 2, 3).
inline Matrix<double> five_by_five_R() {
  return mat(5, {1, 1, 0, 3, 2, 1, 0, 1, 5, 2, 1, 0, 0, 3, 5, 0, 0, 0, 1, -4, 0, 0, 0, 0, 1});
}

// Three singular 4x4 matrices, SDC.
inline std::vector<Matrix<double>> four_by_four() {
  return {
      mat(4, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
      mat(4, {0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0.25, 0, 0, 0, 0, 0}),
      mat(4, {5, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1}),
  };
}

inline Matrix<double> four_by_four_Q() { return mat(4, {1, 0, 0, 0, 0, 1, 1, 0, 0, -1, 4, 0, -1, 0, 0, 1}); }

inline std::vector<Matrix<double>> jordan_pair() { return {mat(2, {0, 1, 1, 0}), mat(2, {1, 0, 0, 0})}; }

inline std::vector<Matrix<double>> noncommuting_triple() {
  return {mat(2, {1, 0, 0, 1}), mat(2, {1, 0, 0, 2}), mat(2, {0, 1, 1, 0})};
}

inline std::vector<Matrix<double>> coupled_pair() {
  return {mat(3, {1, 0, 0, 0, 0, 0, 0, 0, 0}), mat(3, {0, 0, 1, 0, 0, 0, 1, 0, 0})};
}

}  // namespace fixtures
