#include "exhol/least_squares.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace exhol {

namespace {

Eigen::MatrixXd to_eigen(const UpdateMatrix& U) {
  Eigen::MatrixXd M(U.rows, U.cols);
  for (int r = 0; r < U.rows; ++r)
    for (int c = 0; c < U.cols; ++c) M(r, c) = U.at(r, c);
  return M;
}

}  // namespace

RemoveResult remove_correctable(const std::vector<JetSeries>& F, const UpdateMatrix& U,
                                double rank_threshold) {
  if (static_cast<int>(F.size()) != U.rows)
    throw std::invalid_argument("remove_correctable: F size does not match update map rows");
  if (F.empty()) return {};

  const TablePtr& table = F[0].table();
  const auto& base = F[0].base_point();
  int known = F[0].known_order();
  for (const auto& f : F) known = std::min(known, f.known_order());
  const int ncoeff = table->size();

  Eigen::MatrixXd M = to_eigen(U);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  cod.setThreshold(rank_threshold);

  Eigen::MatrixXd rhs(U.rows, ncoeff);
  for (int r = 0; r < U.rows; ++r)
    for (int p = 0; p < ncoeff; ++p) rhs(r, p) = F[static_cast<std::size_t>(r)].coeff_at(p);

  Eigen::MatrixXd A = -cod.solve(rhs);
  Eigen::MatrixXd res = rhs + M * A;

  RemoveResult out;
  out.rank = static_cast<int>(cod.rank());
  out.A.assign(static_cast<std::size_t>(U.cols), JetSeries::zero(table, base).with_known_order(known));
  out.residual.assign(static_cast<std::size_t>(U.rows),
                      JetSeries::zero(table, base).with_known_order(known));
  for (int c = 0; c < U.cols; ++c)
    for (int p = 0; p < ncoeff; ++p) out.A[static_cast<std::size_t>(c)].coeff_ref(p) = A(c, p);
  for (int r = 0; r < U.rows; ++r)
    for (int p = 0; p < ncoeff; ++p)
      out.residual[static_cast<std::size_t>(r)].coeff_ref(p) = res(r, p);
  for (auto& j : out.A) j = j.with_known_order(known);
  for (auto& j : out.residual) j = j.with_known_order(known);
  out.residual_norm = 0.0;
  for (const auto& j : out.residual)
    out.residual_norm = std::max(out.residual_norm, j.max_abs_coeff());
  return out;
}

std::vector<std::vector<double>> update_null_space(const UpdateMatrix& U, double rank_threshold) {
  Eigen::MatrixXd M = to_eigen(U);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  svd.setThreshold(rank_threshold);
  const auto rank = svd.rank();
  std::vector<std::vector<double>> null;
  for (int c = static_cast<int>(rank); c < U.cols; ++c) {
    std::vector<double> v(static_cast<std::size_t>(U.cols));
    for (int r = 0; r < U.cols; ++r) v[static_cast<std::size_t>(r)] = svd.matrixV()(r, c);
    null.push_back(std::move(v));
  }
  return null;
}

double update_determinant(const UpdateMatrix& U) {
  if (U.rows != U.cols) throw std::invalid_argument("update_determinant: matrix must be square");
  return to_eigen(U).determinant();
}

}  // namespace exhol
