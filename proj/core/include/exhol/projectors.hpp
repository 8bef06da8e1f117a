#pragma once

#include "exhol/tensor.hpp"

namespace exhol {

/// Symmetry classes used for correction templates and projector dispatch.
struct SymmetryClass {
  enum class Tag { sym, antisym2, window22, pistol31, generalized_window };
  Tag tag;
  int order = 0;                // for sym(m) / generalized_window(m)
  std::vector<int> positions;   // slot positions the class applies to
};

/// Unit-normalized symmetrization / antisymmetrization over positions.
Tensor symmetrize(const Tensor& t, const std::vector<int>& positions);
Tensor antisymmetrize(const Tensor& t, const std::vector<int>& positions);

/// The [2,2] window projector on a rank-4 normal-frame tensor (16-term form).
Tensor project_window22(const Tensor& f);

/// The [3,1] projector on a rank-4 normal-frame tensor (12-term form).
Tensor project_pistol31(const Tensor& f);

/// Total symmetrization over all four slots of a rank-4 tensor.
Tensor project_sym4(const Tensor& f);

/// Window projector in the 8-term form valid on tensors already symmetric in
/// the pairs (0,1) and (2,3).
Tensor project_window22_pair_symmetric(const Tensor& f);

Tensor apply_projector(const SymmetryClass& cls, const Tensor& t);

}  // namespace exhol
