#include "rbfpu/sparse_path.hpp"

#include <stdexcept>

namespace rbfpu {

namespace {

SparseMatrix select(const SparseMatrix& m, const std::vector<int>& rows, const std::vector<int>& col_map,
                    Eigen::Index new_cols) {
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (SparseMatrix::InnerIterator it(m, rows[r]); it; ++it) {
      const int c = col_map[static_cast<std::size_t>(it.col())];
      if (c >= 0) trip.emplace_back(static_cast<int>(r), c, it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), new_cols);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

}  // namespace

SparseSystem::SparseSystem(std::shared_ptr<const Discretization> disc) : disc_(std::move(disc)) {
  if (!disc_) throw std::invalid_argument("SparseSystem: null discretization");
  const Pointset& ps = disc_->pointset();
  const LinearBlock lb = assemble_linear_block(*disc_);
  const int n = static_cast<int>(ps.size());

  // A row is a Dirichlet row if it has a single unit entry; it fixes that unknown.
  std::vector<int> col_map(static_cast<std::size_t>(3 * n), 0);
  dirichlet_ = Eigen::VectorXd::Zero(3 * n);
  std::vector<int> kept_rows;
  for (Eigen::Index r = 0; r < lb.lin.rows(); ++r) {
    const int nnz = lb.lin.outerIndexPtr()[r + 1] - lb.lin.outerIndexPtr()[r];
    SparseMatrix::InnerIterator it(lb.lin, r);
    if (nnz == 1 && it.value() == 1.0) {
      col_map[static_cast<std::size_t>(it.col())] = -1;
      dirichlet_(it.col()) = lb.g(r);
    } else {
      kept_rows.push_back(static_cast<int>(r));
    }
  }
  int next = 0;
  for (int c = 0; c < 3 * n; ++c) {
    if (col_map[static_cast<std::size_t>(c)] >= 0) {
      col_map[static_cast<std::size_t>(c)] = next++;
      retained_cols_.push_back(c);
    }
  }
  std::vector<int> all_cols(static_cast<std::size_t>(3 * n));
  for (int c = 0; c < 3 * n; ++c) all_cols[static_cast<std::size_t>(c)] = c;
  lin_rows_ = select(lb.lin, kept_rows, all_cols, 3 * n);
  g_rows_.resize(static_cast<Eigen::Index>(kept_rows.size()));
  for (std::size_t r = 0; r < kept_rows.size(); ++r) g_rows_(static_cast<Eigen::Index>(r)) = lb.g(kept_rows[r]);
  lin_reduced_ = select(lb.lin, kept_rows, col_map, next);

  const Eigen::Index eqs = lin_reduced_.rows() + 2 * static_cast<Eigen::Index>(ps.n_interior);
  if (eqs != next) throw AssemblyError("sparse system is not square");
}

Eigen::VectorXd SparseSystem::state(const Eigen::VectorXd& xr) const {
  if (xr.size() != dim()) throw std::invalid_argument("SparseSystem::state: wrong length");
  Eigen::VectorXd x = dirichlet_;
  for (std::size_t k = 0; k < retained_cols_.size(); ++k) x(retained_cols_[k]) = xr(static_cast<Eigen::Index>(k));
  return x;
}

Eigen::VectorXd SparseSystem::restrict(const Eigen::VectorXd& x) const {
  if (x.size() != dirichlet_.size()) throw std::invalid_argument("SparseSystem::restrict: wrong length");
  Eigen::VectorXd xr(dim());
  for (std::size_t k = 0; k < retained_cols_.size(); ++k) xr(static_cast<Eigen::Index>(k)) = x(retained_cols_[k]);
  return xr;
}

Eigen::VectorXd SparseSystem::residual(const Eigen::VectorXd& xr, double re) const {
  const Eigen::VectorXd x = state(xr);
  Eigen::VectorXd e(dim());
  const Eigen::Index nl = lin_rows_.rows();
  e.head(nl) = lin_rows_ * x - g_rows_;
  e.tail(dim() - nl) = momentum_residual(*disc_, x, re);
  return e;
}

SparseMatrix SparseSystem::jacobian(const Eigen::VectorXd& xr, double re) const {
  const SparseMatrix jh = jacobian_hat(*disc_, state(xr), re);
  std::vector<int> col_map(static_cast<std::size_t>(jh.cols()), -1);
  for (std::size_t k = 0; k < retained_cols_.size(); ++k) col_map[static_cast<std::size_t>(retained_cols_[k])] = static_cast<int>(k);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(lin_reduced_.nonZeros() + jh.nonZeros()));
  for (Eigen::Index r = 0; r < lin_reduced_.rows(); ++r) {
    for (SparseMatrix::InnerIterator it(lin_reduced_, r); it; ++it) {
      trip.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
    }
  }
  const auto off = static_cast<int>(lin_reduced_.rows());
  for (Eigen::Index r = 0; r < jh.rows(); ++r) {
    for (SparseMatrix::InnerIterator it(jh, r); it; ++it) {
      const int c = col_map[static_cast<std::size_t>(it.col())];
      if (c >= 0) trip.emplace_back(off + static_cast<int>(r), c, it.value());
    }
  }
  SparseMatrix j(dim(), dim());
  j.setFromTriplets(trip.begin(), trip.end());
  j.makeCompressed();
  return j;
}

SparseMatrix sparse_jacobian_alternative(const FlowProblem& problem, const Eigen::VectorXd& x) {
  problem.validate();
  const SparseSystem sys(problem.disc);
  return sys.jacobian(sys.restrict(x), problem.re);
}

double sparsity_ratio(const SparseMatrix& a) {
  const double n = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  return n > 0.0 ? static_cast<double>(a.nonZeros()) / n : 0.0;
}

}  // namespace rbfpu
