// Inverse multiquadric kernels, per-patch cardinal interpolation and the
// global RBF-PU differentiation matrices.

#ifndef RBFPU_RBF_HPP
#define RBFPU_RBF_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SparseCore>

#include "rbfpu/geometry.hpp"
#include "rbfpu/pum.hpp"

namespace rbfpu {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct KernelParams {
  double epsilon = 2.0;

  void validate() const;
};

/// Value and Cartesian partials of a 2-D function at a point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;
};

/// (1 + eps^2 r^2)^(-1/2)
double imq(double r, const KernelParams& k);

/// Partials of the kernel centred at `centre`, taken with respect to q.
Jet imq_partials(Point2 q, Point2 centre, const KernelParams& k);

enum class Operator { Identity = 0, Dxi = 1, Dphi = 2, Dxixi = 3, Dphiphi = 4 };

inline constexpr std::array<Operator, 5> kAllOperators = {
    Operator::Identity, Operator::Dxi, Operator::Dphi, Operator::Dxixi, Operator::Dphiphi};

const char* to_string(Operator op) noexcept;

/// Factorized kernel matrix of one patch. Cardinal functions are obtained by
/// solving against kernel-evaluation vectors; the inverse is never formed.
/// The factorization is kept in extended precision: at the default shape
/// parameter the kernel matrices of fine patches reach condition numbers
/// near 1e16, and double-precision solves lose the cardinal property.
class LocalInterpolant {
public:
  LocalInterpolant(std::vector<Point2> nodes, const KernelParams& k, std::size_t patch_index = 0);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t patch_index() const noexcept { return patch_; }
  const Eigen::MatrixXd& gram() const noexcept { return gram_; }

  /// Reciprocal condition estimate (1-norm) of the kernel matrix.
  double rcond() const noexcept { return rcond_; }
  /// True when the Cholesky factorization failed and pivoted QR was used.
  bool used_fallback() const noexcept { return qr_.has_value(); }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  /// psi_k(q) for every member k.
  Eigen::VectorXd cardinal(Point2 q) const;

  /// Columns: psi, d/dxi psi, d/dphi psi, d2/dxi2 psi, d2/dphi2 psi.
  Eigen::Matrix<double, Eigen::Dynamic, 5> cardinal_jet(Point2 q) const;

  /// Same, for several evaluation points at once: block c of 5 columns per point.
  Eigen::MatrixXd cardinal_jets(std::span<const Point2> qs) const;

private:
  std::vector<Point2> nodes_;
  KernelParams kernel_;
  std::size_t patch_;
  Eigen::MatrixXd gram_;
  using WideMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::LLT<WideMatrix> llt_;
  std::optional<Eigen::ColPivHouseholderQR<WideMatrix>> qr_;
  double rcond_ = 0.0;
};

LocalInterpolant local_interp_factorization(std::span<const Point2> nodes, const KernelParams& k,
                                            std::size_t patch_index = 0);

/// Identity and first/second partial operators acting on nodal vectors.
struct DiffOperators {
  SparseMatrix id;
  SparseMatrix dxi;
  SparseMatrix dphi;
  SparseMatrix dxixi;
  SparseMatrix dphiphi;

  const SparseMatrix& get(Operator op) const;
  Eigen::Index size() const noexcept { return id.rows(); }
};

/// Rows Q(1) < ... < Q(#Q) of M.
SparseMatrix restrict_rows(const SparseMatrix& m, std::span<const std::size_t> rows);

/// Coefficients of a single point: the value of each operator at q is
/// sum_k coeff(k, op) * nodal[node(k)].
struct PointStencil {
  std::vector<std::size_t> nodes;
  Eigen::Matrix<double, Eigen::Dynamic, 5> coeff;

  /// All five operators applied to one nodal field.
  std::array<double, 5> apply(const Eigen::VectorXd& nodal) const;
};

/// Value and partials of one field at a point.
struct FieldJet {
  double value = 0.0;
  double dxi = 0.0;
  double dphi = 0.0;
  double dxixi = 0.0;
  double dphiphi = 0.0;

  static FieldJet from(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
};

/// The RBF-PU approximation space: pointset, cover, and one factorized local
/// interpolant per patch. Immutable after construction.
class PuInterpolator {
public:
  PuInterpolator(const Pointset& ps, Cover cover, const KernelParams& k);

  const Cover& cover() const noexcept { return cover_; }
  const std::vector<Point2>& points() const noexcept { return points_; }
  const LocalInterpolant& local(std::size_t patch) const { return locals_[patch]; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Sparse matrices; entry (m, n) is nonzero only when q_m and q_n share a patch.
  DiffOperators assemble() const;

  PointStencil stencil(Point2 q) const;

  double evaluate(const Eigen::VectorXd& nodal, Point2 q, Operator op) const;
  FieldJet evaluate_jet(const Eigen::VectorXd& nodal, Point2 q) const;

  /// max over patches and member pairs of |psi_i(q_j) - delta_ij|.
  double max_cardinal_defect() const;

private:
  std::vector<Point2> points_;
  Cover cover_;
  KernelParams kernel_;
  std::vector<LocalInterpolant> locals_;
  std::vector<std::string> warnings_;
};

DiffOperators assemble_diff_matrices(const Pointset& ps, const Cover& cover, const KernelParams& k);

}  // namespace rbfpu

#endif  // RBFPU_RBF_HPP
