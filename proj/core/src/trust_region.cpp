#include "rbfpu/trust_region.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rbfpu/geometry.hpp"

namespace rbfpu {

void TrustRegionConfig::validate() const {
  auto bad = [](const char* what) { throw DomainError(std::string("trust region: ") + what); };
  if (!(delta0 > 0.0)) bad("delta0 must be > 0");
  if (!(delta_max >= delta0)) bad("delta_max must be >= delta0");
  if (!(eta_accept > 0.0 && eta_accept < 0.25)) bad("eta_accept must lie in (0, 0.25)");
  if (!(shrink > 0.0 && shrink < 1.0)) bad("shrink must lie in (0, 1)");
  if (!(grow > 1.0)) bad("grow must be > 1");
  if (!(tol_residual > 0.0)) bad("tol_residual must be > 0");
  if (!(tol_step >= 0.0)) bad("tol_step must be >= 0");
  if (max_iters < 1) bad("max_iters must be >= 1");
}

DenseLinearization::DenseLinearization(Eigen::MatrixXd j) : j_(std::move(j)), lu_(j_) {}

Eigen::VectorXd DenseLinearization::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = lu_.solve(b);
  if (!x.allFinite()) throw SingularMatrixError("Jacobian solve produced non-finite values");
  return x;
}

SparseLinearization::SparseLinearization(Matrix j) : j_(std::move(j)) {
  j_.makeCompressed();
  lu_.compute(j_);
  if (lu_.info() != Eigen::Success) throw SingularMatrixError("sparse LU failed: " + lu_.lastErrorMessage());
}

Eigen::VectorXd SparseLinearization::solve(const Eigen::VectorXd& b) const {
  // SparseLU::solve is logically const but not declared so
  auto& lu = const_cast<Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>>&>(lu_);
  Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw SingularMatrixError("sparse Jacobian solve produced non-finite values");
  return x;
}

const char* to_string(StepKind k) noexcept {
  switch (k) {
    case StepKind::Zero:
      return "zero";
    case StepKind::GaussNewton:
      return "gauss-newton";
    case StepKind::Dogleg:
      return "dogleg";
    case StepKind::SteepestDescent:
      return "steepest-descent";
  }
  return "?";
}

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::Converged:
      return "converged";
    case StopReason::SmallStep:
      return "small-step";
    case StopReason::MaxIterations:
      return "max-iterations";
  }
  return "?";
}

namespace {

double model_reduction(const Linearization& j, const Eigen::VectorXd& g, const Eigen::VectorXd& p) {
  const Eigen::VectorXd jp = j.apply(p);
  return -(g.dot(p) + 0.5 * jp.squaredNorm());
}

class MatrixView final : public Linearization {
public:
  explicit MatrixView(const Eigen::MatrixXd& j) : j_(j), lu_(j) {}
  Eigen::Index size() const override { return j_.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const override { return j_ * v; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& v) const override { return j_.transpose() * v; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const override {
    Eigen::VectorXd x = lu_.solve(b);
    if (!x.allFinite()) throw SingularMatrixError("Jacobian solve produced non-finite values");
    return x;
  }

private:
  const Eigen::MatrixXd& j_;
  DenseLu lu_;
};

}  // namespace

DoglegStep dogleg_step(const Linearization& j, const Eigen::VectorXd& e, double delta) {
  if (!(delta > 0.0)) throw DomainError("dogleg: radius must be > 0");
  if (e.size() != j.size()) throw std::invalid_argument("dogleg: size mismatch");
  DoglegStep out;
  if (e.squaredNorm() == 0.0) {
    out.step = Eigen::VectorXd::Zero(e.size());
    return out;
  }
  const Eigen::VectorXd g = j.apply_transpose(e);
  const Eigen::VectorXd p_gn = -j.solve(e);
  const double gn_norm = p_gn.norm();
  if (gn_norm <= delta) {
    out.step = p_gn;
    out.kind = StepKind::GaussNewton;
  } else {
    const double gg = g.squaredNorm();
    const double jgjg = j.apply(g).squaredNorm();
    const Eigen::VectorXd p_c = -(gg / jgjg) * g;
    const double c_norm = p_c.norm();
    if (c_norm >= delta) {
      out.step = -(delta / std::sqrt(gg)) * g;
      out.kind = StepKind::SteepestDescent;
    } else {
      // |p_c + tau (p_gn - p_c)| = delta, tau in (0, 1)
      const Eigen::VectorXd d = p_gn - p_c;
      const double a = d.squaredNorm();
      const double b = 2.0 * p_c.dot(d);
      const double c = c_norm * c_norm - delta * delta;
      const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
      // cancellation-free root of the quadratic with c < 0
      const double tau = b >= 0.0 ? (2.0 * -c) / (b + disc) : (-b + disc) / (2.0 * a);
      out.step = p_c + tau * d;
      out.kind = StepKind::Dogleg;
    }
  }
  out.predicted_reduction = model_reduction(j, g, out.step);
  return out;
}

DoglegStep dogleg_step(const Eigen::MatrixXd& j, const Eigen::VectorXd& e, double delta) {
  if (j.rows() != j.cols()) throw std::invalid_argument("dogleg: Jacobian must be square");
  return dogleg_step(MatrixView(j), e, delta);
}

SolveReport solve(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd y0,
                  const TrustRegionConfig& cfg) {
  cfg.validate();
  SolveReport rep;
  Eigen::VectorXd y = std::move(y0);
  Eigen::VectorXd e = residual(y);
  if (e.size() != y.size()) throw std::invalid_argument("solve: residual and unknowns differ in length");
  double merit = 0.5 * e.squaredNorm();
  double delta = cfg.delta0;
  rep.merit_history.push_back(merit);
  std::unique_ptr<Linearization> lin;

  rep.reason = StopReason::MaxIterations;
  while (true) {
    if (e.lpNorm<Eigen::Infinity>() < cfg.tol_residual) {
      rep.reason = StopReason::Converged;
      break;
    }
    if (rep.iterations >= cfg.max_iters) break;
    if (!lin) {
      lin = jacobian(y);
      ++rep.jacobian_evaluations;
    }
    const DoglegStep st = dogleg_step(*lin, e, delta);
    ++rep.iterations;
    IterationRecord rec;
    rec.iteration = rep.iterations;
    rec.delta = delta;
    rec.kind = st.kind;
    rec.step_norm = st.step.norm();
    if (rec.step_norm < cfg.tol_step) {
      rec.merit = merit;
      rec.residual_inf = e.lpNorm<Eigen::Infinity>();
      rep.log.push_back(rec);
      rep.merit_history.push_back(merit);
      rep.reason = StopReason::SmallStep;
      break;
    }

    const Eigen::VectorXd y_try = y + st.step;
    const Eigen::VectorXd e_try = residual(y_try);
    const double merit_try = e_try.allFinite() ? 0.5 * e_try.squaredNorm() : std::numeric_limits<double>::infinity();
    const double actual = merit - merit_try;
    const double ratio = st.predicted_reduction > 0.0 ? actual / st.predicted_reduction
                                                       : -std::numeric_limits<double>::infinity();
    rec.ratio = ratio;

    if (ratio < 0.25) {
      delta = cfg.shrink * std::min(delta, rec.step_norm);
    } else if (ratio > 0.75 && rec.step_norm >= delta * (1.0 - 1e-12)) {
      delta = std::min(cfg.grow * delta, cfg.delta_max);
    }
    if (ratio > cfg.eta_accept && merit_try < merit) {
      y = y_try;
      e = e_try;
      merit = merit_try;
      lin.reset();
      rec.accepted = true;
    }
    rec.merit = merit;
    rec.residual_inf = e.lpNorm<Eigen::Infinity>();
    rep.log.push_back(rec);
    rep.merit_history.push_back(merit);

    if (!rec.accepted && delta < cfg.tol_step) {
      rep.reason = StopReason::SmallStep;
      break;
    }
  }

  rep.converged = rep.reason == StopReason::Converged;
  rep.final_residual_inf = e.lpNorm<Eigen::Infinity>();
  rep.y_final = std::move(y);
  return rep;
}

void validate_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw DomainError("Reynolds schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || !std::isfinite(schedule[i])) throw DomainError("Reynolds numbers must be > 0");
    if (i > 0 && !(schedule[i] > schedule[i - 1])) throw DomainError("Reynolds schedule must be strictly increasing");
  }
}

ContinuationReport continuation(const std::function<NonlinearSystem(double)>& factory,
                                const std::vector<double>& schedule, const TrustRegionConfig& cfg,
                                Eigen::VectorXd y0) {
  validate_schedule(schedule);
  cfg.validate();
  ContinuationReport out;
  Eigen::VectorXd y = std::move(y0);
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const NonlinearSystem sys = factory(schedule[s]);
    if (y.size() == 0) y = Eigen::VectorXd::Zero(sys.dim);
    if (y.size() != sys.dim) throw std::invalid_argument("continuation: stage dimension changed");
    StageReport st;
    st.re = schedule[s];
    try {
      st.report = solve(sys.residual, sys.jacobian, y, cfg);
    } catch (const SingularMatrixError& err) {
      st.report.y_final = y;
      st.report.converged = false;
      out.stages.push_back(std::move(st));
      out.failed_stage = s;
      out.failure = std::string("singular Jacobian: ") + err.what();
      out.y_final = y;
      return out;
    }
    y = st.report.y_final;
    const bool ok = st.report.converged;
    const double res = st.report.final_residual_inf;
    const StopReason why = st.report.reason;
    out.stages.push_back(std::move(st));
    if (!ok) {
      std::ostringstream os;
      os << "stage " << (s + 1) << " (Re = " << schedule[s] << ") did not converge: " << to_string(why)
         << ", residual " << res;
      out.failed_stage = s;
      out.failure = os.str();
      out.y_final = y;
      return out;
    }
  }
  out.converged = true;
  out.y_final = y;
  return out;
}

}  // namespace rbfpu
