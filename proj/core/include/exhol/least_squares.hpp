#pragma once

#include <vector>

#include "exhol/tensor.hpp"

namespace exhol {

/// Dense linear map between flattened correction space (columns) and
/// flattened obstruction space (rows), always measured numerically by probing
/// the actual pipeline, never transcribed from closed-form constants.
struct UpdateMatrix {
  int rows = 0, cols = 0;
  std::vector<double> m;  // row-major

  UpdateMatrix() = default;
  UpdateMatrix(int r, int c) : rows(r), cols(c), m(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return m[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return m[static_cast<std::size_t>(r) * cols + c]; }
};

struct RemoveResult {
  std::vector<JetSeries> A;         // minimum-norm least-squares correction
  std::vector<JetSeries> residual;  // F + U A
  int rank = 0;                     // numerical rank of U
  double residual_norm = 0.0;       // max-norm over residual jet coefficients
};

/// Minimize ||F + U A||_2 over A, jet-coefficient-wise (every coefficient slot
/// is an independent real system sharing the same matrix). Rank-deficient
/// systems return the minimum-norm solution together with the nonzero
/// residual; this is expected behavior, not an error.
RemoveResult remove_correctable(const std::vector<JetSeries>& F, const UpdateMatrix& U,
                                double rank_threshold = 1e-9);

/// Null-space basis vectors of U (directions of correction that do not move
/// the obstruction), as columns.
std::vector<std::vector<double>> update_null_space(const UpdateMatrix& U,
                                                   double rank_threshold = 1e-9);

/// det(U) for square U; used for the solvability assertions on measured
/// trace systems.
double update_determinant(const UpdateMatrix& U);

}  // namespace exhol
