#include "rbfpu/system.hpp"

#include <cmath>
#include <sstream>

namespace rbfpu {

void DiscretizationParams::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("h must be > 0");
  if (!(patch_radius > 0.0) || !std::isfinite(patch_radius)) throw DomainError("patch radius must be > 0");
  transform.validate();
  kernel.validate();
  cluster.validate();
}

namespace {

Cover default_cover(const DiscretizationParams& p, const Pointset& ps) {
  p.validate();
  CoverParams cp;
  cp.patch_radius = p.patch_radius;
  cp.transform = p.transform;
  cp.cluster = p.cluster;
  return build_cover(ps, p.shape, cp);
}

DiffOperators top_rows(const DiffOperators& ops, Eigen::Index rows) {
  DiffOperators out;
  out.id = ops.id.topRows(rows);
  out.dxi = ops.dxi.topRows(rows);
  out.dphi = ops.dphi.topRows(rows);
  out.dxixi = ops.dxixi.topRows(rows);
  out.dphiphi = ops.dphiphi.topRows(rows);
  for (SparseMatrix* m : {&out.id, &out.dxi, &out.dphi, &out.dxixi, &out.dphiphi}) m->makeCompressed();
  return out;
}

// The Jacobian assembly walks the five operators in lockstep.
void check_shared_pattern(const DiffOperators& ops) {
  const SparseMatrix& ref = ops.id;
  for (Operator op : kAllOperators) {
    const SparseMatrix& m = ops.get(op);
    bool same = m.nonZeros() == ref.nonZeros() && m.rows() == ref.rows();
    for (Eigen::Index i = 0; same && i <= ref.rows(); ++i) same = m.outerIndexPtr()[i] == ref.outerIndexPtr()[i];
    for (Eigen::Index k = 0; same && k < ref.nonZeros(); ++k) same = m.innerIndexPtr()[k] == ref.innerIndexPtr()[k];
    if (!same) throw AssemblyError(std::string("operator ") + to_string(op) + " has a different sparsity pattern");
  }
}

}  // namespace

Discretization::Discretization(const DiscretizationParams& params)
    : Discretization(params, generate_pointset(params.shape, params.h, params.transform, params.cluster)) {}

Discretization::Discretization(const DiscretizationParams& params, const Pointset& ps)
    : Discretization(params.shape, ps, default_cover(params, ps), params.transform, params.kernel) {}

Discretization::Discretization(ObstacleShape shape, const Pointset& ps, Cover cover, TransformParams t,
                               KernelParams k)
    : shape_(shape),
      transform_(t),
      ps_(ps),
      interp_(ps, std::move(cover), k) {
  ps_.check_invariants();
  ops_ = interp_.assemble();
  check_shared_pattern(ops_);
  interior_ = top_rows(ops_, static_cast<Eigen::Index>(ps_.n_interior));
}

void FlowProblem::validate() const {
  if (!(re > 0.0) || !std::isfinite(re)) throw DomainError("Reynolds number must be > 0");
  if (!disc) throw DomainError("flow problem has no discretization");
}

LinearBlock assemble_linear_block(const Discretization& disc) {
  const Pointset& ps = disc.pointset();
  const DiffOperators& ops = disc.ops();
  const double ell = disc.transform().ell;
  const auto n = static_cast<int>(ps.size());
  const std::size_t rows = ps.n_interior + 3 * ps.n_boundary();

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
  int row = 0;

  auto identity_row = [&](std::size_t node, Field f) {
    trip.emplace_back(row, static_cast<int>(f) * n + static_cast<int>(node), 1.0);
  };
  auto operator_row = [&](const SparseMatrix& m, std::size_t node, Field f, double scale, double shift) {
    for (SparseMatrix::InnerIterator it(m, static_cast<Eigen::Index>(node)); it; ++it) {
      double v = scale * it.value();
      if (it.col() == static_cast<Eigen::Index>(node)) v += shift;
      trip.emplace_back(row, static_cast<int>(f) * n + static_cast<int>(it.col()), v);
    }
  };

  const std::size_t far0 = ps.far_begin();
  const std::size_t cyl0 = ps.cyl_begin();
  const std::size_t axis0 = ps.axis_begin();

  for (Field f : {Field::Vxi, Field::Vphi, Field::P}) {
    for (std::size_t k = far0; k < far0 + ps.n_far; ++k) {
      identity_row(k, f);
      const double phi = ps.nodes[k].phi;
      g(row) = f == Field::Vxi ? std::cos(phi) : (f == Field::Vphi ? -std::sin(phi) : 0.0);
      ++row;
    }
  }
  for (Field f : {Field::Vxi, Field::Vphi}) {
    for (std::size_t k = cyl0; k < cyl0 + ps.n_cyl; ++k) {
      identity_row(k, f);
      ++row;
    }
  }
  // symmetry line: v_phi is odd, v_xi and p are even in phi
  for (std::size_t k = axis0; k < axis0 + ps.n_axis; ++k, ++row) operator_row(ops.dphi, k, Field::Vxi, 1.0, 0.0);
  for (std::size_t k = axis0; k < axis0 + ps.n_axis; ++k, ++row) identity_row(k, Field::Vphi);
  for (std::size_t k = axis0; k < axis0 + ps.n_axis; ++k, ++row) operator_row(ops.dphi, k, Field::P, 1.0, 0.0);
  const std::size_t n_bc = static_cast<std::size_t>(row);

  // continuity: v_xi + (ell - xi) d_xi v_xi + d_phi v_phi
  auto continuity = [&](std::size_t k) {
    const double s = ell - ps.nodes[k].xi;
    operator_row(ops.dxi, k, Field::Vxi, s, 1.0);
    operator_row(ops.dphi, k, Field::Vphi, 1.0, 0.0);
    ++row;
  };
  for (std::size_t k = 0; k < ps.n_interior; ++k) continuity(k);
  for (std::size_t k = cyl0; k < cyl0 + ps.n_cyl; ++k) continuity(k);

  LinearBlock lb;
  lb.lin.resize(static_cast<Eigen::Index>(rows), 3 * n);
  lb.lin.setFromTriplets(trip.begin(), trip.end());
  lb.lin.makeCompressed();
  lb.g = std::move(g);
  lb.n_bc = n_bc;
  return lb;
}

Reduction::Reduction(const LinearBlock& lb, double rank_tol) : qr_(Eigen::MatrixXd(lb.lin.transpose())) {
  const Eigen::Index m = lb.lin.rows();
  const Eigen::Index big_n = lb.lin.cols();
  const Eigen::Index rank = qr_.rank(rank_tol);
  if (rank < m) {
    std::ostringstream os;
    os << "linear block is rank deficient: rank " << rank << " < " << m << " rows (" << (m - rank)
       << " dependent rows; duplicate or mistagged nodes?)";
    throw AssemblyError(os.str());
  }
  // P^T g, then R^T w = P^T g
  Eigen::VectorXd pg(m);
  for (Eigen::Index k = 0; k < m; ++k) pg(k) = lb.g(qr_.perm()[static_cast<std::size_t>(k)]);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(big_n, 1);
  w.topRows(m) = qr_.solve_r_transpose(pg);
  qr_.apply_q(w);
  xp_ = w.col(0);
  o2_ = qr_.q_columns(m, big_n - m);
}

Eigen::MatrixXd Reduction::o1() const { return qr_.q_columns(0, qr_.cols()); }

Eigen::VectorXd Reduction::state(const Eigen::VectorXd& y) const {
  if (y.size() != o2_.cols()) throw std::invalid_argument("Reduction::state: wrong length");
  Eigen::VectorXd x = xp_;
  x.noalias() += o2_ * y;
  return x;
}

Reduction reduce_linear(const LinearBlock& lb) { return Reduction(lb); }

std::array<double, 3> pointwise_residual(double xi, const NodalJets& f, double re, double ell) {
  const double s = ell - xi;
  const double half = 0.5 * re;
  const FieldJet& a = f.vxi;
  const FieldJet& b = f.vphi;
  const double w1 = half * (s * a.value * a.dxi + b.value * a.dphi - b.value * b.value + s * f.p.dxi)
                    - s * s * s / ell * a.dxixi - s / ell * a.dphiphi + s * s / ell * a.dxi
                    + 2.0 * s / ell * b.dphi + s / ell * a.value;
  const double w2 = half * (s * a.value * b.dxi + b.value * b.dphi + a.value * b.value + f.p.dphi)
                    - s * s * s / ell * b.dxixi - s / ell * b.dphiphi + s * s / ell * b.dxi
                    - 2.0 * s / ell * a.dphi + s / ell * b.value;
  const double w3 = s * a.dxi + b.dphi + a.value;
  return {w1, w2, w3};
}

FrechetCoefficients frechet_coefficients(double xi, const NodalJets& f, double re, double ell) {
  const double s = ell - xi;
  const double half = 0.5 * re;
  const FieldJet& a = f.vxi;
  const FieldJet& b = f.vphi;
  FrechetCoefficients c;
  auto set = [&c](int eq, Field fld, Operator op, double v) {
    c.coeff[static_cast<std::size_t>(eq)][static_cast<std::size_t>(fld)][static_cast<std::size_t>(op)] = v;
  };
  const double visc2 = -s * s * s / ell;
  const double viscphi = -s / ell;
  const double conv = half * s * a.value + s * s / ell;

  set(0, Field::Vxi, Operator::Identity, half * s * a.dxi + s / ell);
  set(0, Field::Vxi, Operator::Dxi, conv);
  set(0, Field::Vxi, Operator::Dphi, half * b.value);
  set(0, Field::Vxi, Operator::Dxixi, visc2);
  set(0, Field::Vxi, Operator::Dphiphi, viscphi);
  set(0, Field::Vphi, Operator::Identity, half * (a.dphi - 2.0 * b.value));
  set(0, Field::Vphi, Operator::Dphi, 2.0 * s / ell);
  set(0, Field::P, Operator::Dxi, half * s);

  set(1, Field::Vphi, Operator::Identity, half * (a.value + b.dphi) + s / ell);
  set(1, Field::Vphi, Operator::Dxi, conv);
  set(1, Field::Vphi, Operator::Dphi, half * b.value);
  set(1, Field::Vphi, Operator::Dxixi, visc2);
  set(1, Field::Vphi, Operator::Dphiphi, viscphi);
  set(1, Field::Vxi, Operator::Identity, half * (s * b.dxi + b.value));
  set(1, Field::Vxi, Operator::Dphi, -2.0 * s / ell);
  set(1, Field::P, Operator::Dphi, half);
  return c;
}

NodalJets InteriorJets::at(Eigen::Index i) const {
  NodalJets out;
  FieldJet* fields[3] = {&out.vxi, &out.vphi, &out.p};
  for (std::size_t f = 0; f < 3; ++f) {
    *fields[f] = {d[f][0](i), d[f][1](i), d[f][2](i), d[f][3](i), d[f][4](i)};
  }
  return out;
}

InteriorJets interior_jets(const Discretization& disc, const Eigen::VectorXd& x) {
  const auto n = static_cast<Eigen::Index>(disc.n());
  if (x.size() != 3 * n) throw std::invalid_argument("state vector must have length 3N");
  InteriorJets j;
  for (std::size_t f = 0; f < 3; ++f) {
    const auto field = x.segment(static_cast<Eigen::Index>(f) * n, n);
    for (Operator op : kAllOperators) {
      j.d[f][static_cast<std::size_t>(op)] = disc.interior_ops().get(op) * field;
    }
  }
  return j;
}

Eigen::VectorXd momentum_residual(const Discretization& disc, const Eigen::VectorXd& x, double re) {
  const InteriorJets j = interior_jets(disc, x);
  const auto ni = static_cast<Eigen::Index>(disc.n_interior());
  const double ell = disc.transform().ell;
  Eigen::VectorXd e(2 * ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const auto w = pointwise_residual(disc.pointset().nodes[static_cast<std::size_t>(i)].xi, j.at(i), re, ell);
    e(i) = w[0];
    e(ni + i) = w[1];
  }
  return e;
}

SparseMatrix jacobian_hat(const Discretization& disc, const Eigen::VectorXd& x, double re) {
  const InteriorJets j = interior_jets(disc, x);
  const DiffOperators& ops = disc.interior_ops();
  const auto ni = static_cast<Eigen::Index>(disc.n_interior());
  const auto n = static_cast<Eigen::Index>(disc.n());
  const double ell = disc.transform().ell;
  const int* outer = ops.id.outerIndexPtr();
  const int* inner = ops.id.innerIndexPtr();
  const double* vals[5] = {ops.id.valuePtr(), ops.dxi.valuePtr(), ops.dphi.valuePtr(), ops.dxixi.valuePtr(),
                           ops.dphiphi.valuePtr()};

  SparseMatrix jh(2 * ni, 3 * n);
  Eigen::VectorXi per_row(2 * ni);
  for (Eigen::Index i = 0; i < ni; ++i) per_row(i) = per_row(ni + i) = 3 * (outer[i + 1] - outer[i]);
  jh.reserve(per_row);
  for (int eq = 0; eq < 2; ++eq) {
    for (Eigen::Index i = 0; i < ni; ++i) {
      const auto c = frechet_coefficients(disc.pointset().nodes[static_cast<std::size_t>(i)].xi, j.at(i), re, ell);
      const Eigen::Index row = eq * ni + i;
      for (std::size_t f = 0; f < 3; ++f) {
        const auto& cf = c.coeff[static_cast<std::size_t>(eq)][f];
        for (int k = outer[i]; k < outer[i + 1]; ++k) {
          double v = 0.0;
          for (std::size_t op = 0; op < 5; ++op) {
            if (cf[op] != 0.0) v += cf[op] * vals[op][k];
          }
          jh.insert(row, static_cast<Eigen::Index>(f) * n + inner[k]) = v;
        }
      }
    }
  }
  jh.makeCompressed();
  return jh;
}

ReducedSystem::ReducedSystem(std::shared_ptr<const Discretization> disc, std::shared_ptr<const Reduction> red)
    : disc_(std::move(disc)), red_(std::move(red)) {
  if (!disc_ || !red_) throw std::invalid_argument("ReducedSystem: null input");
}

ReducedSystem::ReducedSystem(std::shared_ptr<const Discretization> disc)
    : ReducedSystem(disc, std::make_shared<const Reduction>(assemble_linear_block(*disc))) {}

Eigen::VectorXd ReducedSystem::residual(const Eigen::VectorXd& y, double re) const {
  return momentum_residual(*disc_, state(y), re);
}

Eigen::MatrixXd ReducedSystem::jacobian(const Eigen::VectorXd& y, double re) const {
  return sparse_times_dense(jacobian_hat(*disc_, state(y), re), red_->o2());
}

Eigen::VectorXd residual(const FlowProblem& problem, const Reduction& red, const Eigen::VectorXd& y) {
  problem.validate();
  return momentum_residual(*problem.disc, red.state(y), problem.re);
}

Eigen::MatrixXd jacobian(const FlowProblem& problem, const Reduction& red, const Eigen::VectorXd& y) {
  problem.validate();
  return sparse_times_dense(jacobian_hat(*problem.disc, red.state(y), problem.re), red.o2());
}

}  // namespace rbfpu
