#include "rbfpu/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rbfpu {

void KernelParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("shape parameter epsilon must be > 0");
}

double imq(double r, const KernelParams& k) {
  const double er = k.epsilon * r;
  return 1.0 / std::sqrt(1.0 + er * er);
}

Jet imq_partials(Point2 q, Point2 centre, const KernelParams& k) {
  const double e2 = k.epsilon * k.epsilon;
  const double d1 = q.x - centre.x;
  const double d2 = q.y - centre.y;
  const double s = 1.0 + e2 * (d1 * d1 + d2 * d2);
  const double is = 1.0 / s;
  const double v = std::sqrt(is);       // s^-1/2
  const double v3 = v * is;             // s^-3/2
  const double v5 = v3 * is;            // s^-5/2
  Jet j;
  j.value = v;
  j.d1 = -e2 * d1 * v3;
  j.d2 = -e2 * d2 * v3;
  j.d11 = -e2 * v3 + 3.0 * e2 * e2 * d1 * d1 * v5;
  j.d22 = -e2 * v3 + 3.0 * e2 * e2 * d2 * d2 * v5;
  j.d12 = 3.0 * e2 * e2 * d1 * d2 * v5;
  return j;
}

const char* to_string(Operator op) noexcept {
  switch (op) {
    case Operator::Identity:
      return "id";
    case Operator::Dxi:
      return "dxi";
    case Operator::Dphi:
      return "dphi";
    case Operator::Dxixi:
      return "dxixi";
    case Operator::Dphiphi:
      return "dphiphi";
  }
  return "?";
}

LocalInterpolant::LocalInterpolant(std::vector<Point2> nodes, const KernelParams& k,
                                   std::size_t patch_index)
    : nodes_(std::move(nodes)), kernel_(k), patch_(patch_index) {
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  if (n == 0) throw AssemblyError("local interpolant needs at least one node");
  gram_.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    gram_(a, a) = 1.0;
    for (Eigen::Index b = 0; b < a; ++b) {
      const double r = std::hypot(nodes_[a].x - nodes_[b].x, nodes_[a].y - nodes_[b].y);
      if (r == 0.0) {
        std::ostringstream os;
        os << "patch " << patch_ << ": coincident nodes " << b << " and " << a;
        throw AssemblyError(os.str());
      }
      gram_(a, b) = gram_(b, a) = imq(r, kernel_);
    }
  }
  const WideMatrix wide = gram_.cast<long double>();
  llt_.compute(wide);
  if (llt_.info() == Eigen::Success) {
    rcond_ = static_cast<double>(llt_.rcond());
  } else {
    qr_.emplace(wide);
    // crude estimate from the pivoted R diagonal
    const auto& r = qr_->matrixR();
    const double hi = static_cast<double>(std::abs(r(0, 0)));
    const double lo = static_cast<double>(std::abs(r(n - 1, n - 1)));
    rcond_ = hi > 0.0 ? lo / hi : 0.0;
    if (!(lo > 0.0)) {
      std::ostringstream os;
      os << "patch " << patch_ << ": kernel matrix is numerically singular";
      throw AssemblyError(os.str());
    }
  }
}

Eigen::MatrixXd LocalInterpolant::solve(const Eigen::MatrixXd& rhs) const {
  const WideMatrix b = rhs.cast<long double>();
  if (qr_) return qr_->solve(b).cast<double>();
  return llt_.solve(b).cast<double>();
}

Eigen::VectorXd LocalInterpolant::cardinal(Point2 q) const {
  return cardinal_jet(q).col(0);
}

Eigen::Matrix<double, Eigen::Dynamic, 5> LocalInterpolant::cardinal_jet(Point2 q) const {
  Eigen::MatrixXd z = cardinal_jets(std::span<const Point2>(&q, 1));
  return z;
}

Eigen::MatrixXd LocalInterpolant::cardinal_jets(std::span<const Point2> qs) const {
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  const auto m = static_cast<Eigen::Index>(qs.size());
  Eigen::MatrixXd rhs(n, 5 * m);
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Jet j = imq_partials(qs[p], nodes_[k], kernel_);
      rhs(k, 5 * p + 0) = j.value;
      rhs(k, 5 * p + 1) = j.d1;
      rhs(k, 5 * p + 2) = j.d2;
      rhs(k, 5 * p + 3) = j.d11;
      rhs(k, 5 * p + 4) = j.d22;
    }
  }
  Eigen::MatrixXd z = solve(rhs);
  // cardinality at member nodes holds exactly; snap the round-off away
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (nodes_[k] == qs[p]) {
        z.col(5 * p).setZero();
        z(k, 5 * p) = 1.0;
        break;
      }
    }
  }
  return z;
}

LocalInterpolant local_interp_factorization(std::span<const Point2> nodes, const KernelParams& k,
                                            std::size_t patch_index) {
  return LocalInterpolant(std::vector<Point2>(nodes.begin(), nodes.end()), k, patch_index);
}

const SparseMatrix& DiffOperators::get(Operator op) const {
  switch (op) {
    case Operator::Identity:
      return id;
    case Operator::Dxi:
      return dxi;
    case Operator::Dphi:
      return dphi;
    case Operator::Dxixi:
      return dxixi;
    case Operator::Dphiphi:
      return dphiphi;
  }
  return id;
}

SparseMatrix restrict_rows(const SparseMatrix& m, std::span<const std::size_t> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(m.rows())) {
      throw DomainError("restrict_rows: row index out of range");
    }
    if (i > 0 && rows[i] <= rows[i - 1]) throw DomainError("restrict_rows: indices must increase");
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  Eigen::VectorXi nnz(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    nnz[static_cast<Eigen::Index>(i)] = static_cast<int>(m.innerVector(static_cast<Eigen::Index>(rows[i])).nonZeros());
  }
  out.reserve(nnz);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (SparseMatrix::InnerIterator it(m, static_cast<Eigen::Index>(rows[i])); it; ++it) {
      out.insert(static_cast<Eigen::Index>(i), it.col()) = it.value();
    }
  }
  out.makeCompressed();
  return out;
}

std::array<double, 5> PointStencil::apply(const Eigen::VectorXd& nodal) const {
  std::array<double, 5> out{};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double v = nodal[static_cast<Eigen::Index>(nodes[k])];
    for (int c = 0; c < 5; ++c) out[static_cast<std::size_t>(c)] += coeff(static_cast<Eigen::Index>(k), c) * v;
  }
  return out;
}

namespace {

// Leibniz rule: operators applied to w * psi.
inline std::array<double, 5> leibniz(const WeightJet& w, double psi, double p1, double p2, double p11,
                                     double p22) {
  return {w.w * psi,
          w.d1 * psi + w.w * p1,
          w.d2 * psi + w.w * p2,
          w.d11 * psi + 2.0 * w.d1 * p1 + w.w * p11,
          w.d22 * psi + 2.0 * w.d2 * p2 + w.w * p22};
}

}  // namespace

PuInterpolator::PuInterpolator(const Pointset& ps, Cover cover, const KernelParams& k)
    : cover_(std::move(cover)), kernel_(k) {
  kernel_.validate();
  points_.reserve(ps.size());
  for (const Node& n : ps.nodes) points_.push_back(n.point());
  if (cover_.node_patches.size() != points_.size()) {
    throw AssemblyError("cover was built for a different pointset");
  }
  locals_.reserve(cover_.patches.size());
  for (std::size_t j = 0; j < cover_.patches.size(); ++j) {
    std::vector<Point2> local;
    local.reserve(cover_.patches[j].members.size());
    for (std::size_t m : cover_.patches[j].members) local.push_back(points_[m]);
    locals_.emplace_back(std::move(local), kernel_, j);
    const LocalInterpolant& li = locals_.back();
    if (li.used_fallback() || li.rcond() < 1e-14) {
      std::ostringstream os;
      os << "patch " << j << ": kernel matrix condition estimate "
         << (li.rcond() > 0 ? 1.0 / li.rcond() : INFINITY)
         << (li.used_fallback() ? " (pivoted QR fallback)" : "");
      warnings_.push_back(os.str());
    }
  }
}

DiffOperators PuInterpolator::assemble() const {
  const std::size_t n_nodes = points_.size();

  // weight jets at every node, keyed by position in node_patches
  std::vector<std::vector<WeightJet>> weights(n_nodes);
  for (std::size_t m = 0; m < n_nodes; ++m) {
    weights[m] = shepard_weight_derivatives(points_[m], cover_, cover_.node_patches[m]);
  }

  std::array<std::vector<Eigen::Triplet<double>>, 5> trip;
  std::size_t estimate = 0;
  for (const Patch& p : cover_.patches) estimate += p.members.size() * p.members.size();
  for (auto& t : trip) t.reserve(estimate);

  for (std::size_t j = 0; j < cover_.patches.size(); ++j) {
    const Patch& patch = cover_.patches[j];
    const LocalInterpolant& li = locals_[j];
    std::vector<Point2> eval;
    eval.reserve(patch.members.size());
    for (std::size_t m : patch.members) eval.push_back(points_[m]);
    const Eigen::MatrixXd z = li.cardinal_jets(eval);

    for (std::size_t a = 0; a < patch.members.size(); ++a) {
      const std::size_t m = patch.members[a];
      const auto& wl = weights[m];
      const auto wit = std::find_if(wl.begin(), wl.end(), [j](const WeightJet& w) { return w.patch == j; });
      const WeightJet& w = *wit;
      const auto col = static_cast<Eigen::Index>(5 * a);
      for (std::size_t b = 0; b < patch.members.size(); ++b) {
        const auto kb = static_cast<Eigen::Index>(b);
        const auto c = leibniz(w, z(kb, col), z(kb, col + 1), z(kb, col + 2), z(kb, col + 3),
                               z(kb, col + 4));
        for (int op = 0; op < 5; ++op) {
          trip[static_cast<std::size_t>(op)].emplace_back(static_cast<int>(m),
                                                         static_cast<int>(patch.members[b]),
                                                         c[static_cast<std::size_t>(op)]);
        }
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(n_nodes);
  DiffOperators ops;
  SparseMatrix* targets[5] = {&ops.id, &ops.dxi, &ops.dphi, &ops.dxixi, &ops.dphiphi};
  for (int op = 0; op < 5; ++op) {
    targets[op]->resize(n, n);
    targets[op]->setFromTriplets(trip[static_cast<std::size_t>(op)].begin(),
                                 trip[static_cast<std::size_t>(op)].end());
    targets[op]->makeCompressed();
  }
  return ops;
}

PointStencil PuInterpolator::stencil(Point2 q) const {
  const std::vector<std::size_t> covering = cover_.covering(q);
  if (covering.empty()) {
    std::ostringstream os;
    os << "point (" << q.x << ", " << q.y << ") is not covered";
    throw DomainError(os.str());
  }
  const std::vector<WeightJet> wj = shepard_weight_derivatives(q, cover_, covering);

  std::vector<std::size_t> nodes;
  for (std::size_t j : covering) {
    nodes.insert(nodes.end(), cover_.patches[j].members.begin(), cover_.patches[j].members.end());
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  PointStencil st;
  st.nodes = nodes;
  st.coeff.setZero(static_cast<Eigen::Index>(nodes.size()), 5);
  for (std::size_t c = 0; c < covering.size(); ++c) {
    const Patch& patch = cover_.patches[covering[c]];
    const Eigen::Matrix<double, Eigen::Dynamic, 5> z = locals_[covering[c]].cardinal_jet(q);
    for (std::size_t b = 0; b < patch.members.size(); ++b) {
      const auto kb = static_cast<Eigen::Index>(b);
      const auto row = static_cast<Eigen::Index>(
          std::lower_bound(nodes.begin(), nodes.end(), patch.members[b]) - nodes.begin());
      const auto v = leibniz(wj[c], z(kb, 0), z(kb, 1), z(kb, 2), z(kb, 3), z(kb, 4));
      for (int op = 0; op < 5; ++op) st.coeff(row, op) += v[static_cast<std::size_t>(op)];
    }
  }
  return st;
}

double PuInterpolator::evaluate(const Eigen::VectorXd& nodal, Point2 q, Operator op) const {
  return stencil(q).apply(nodal)[static_cast<std::size_t>(op)];
}

FieldJet PuInterpolator::evaluate_jet(const Eigen::VectorXd& nodal, Point2 q) const {
  return FieldJet::from(stencil(q).apply(nodal));
}

double PuInterpolator::max_cardinal_defect() const {
  double worst = 0.0;
  for (const LocalInterpolant& li : locals_) {
    // solve against the kernel matrix itself: column j is psi(q_j)
    const Eigen::MatrixXd z = li.solve(li.gram());
    const Eigen::MatrixXd defect = z - Eigen::MatrixXd::Identity(z.rows(), z.cols());
    worst = std::max(worst, defect.cwiseAbs().maxCoeff());
  }
  return worst;
}

DiffOperators assemble_diff_matrices(const Pointset& ps, const Cover& cover, const KernelParams& k) {
  return PuInterpolator(ps, cover, k).assemble();
}

}  // namespace rbfpu
