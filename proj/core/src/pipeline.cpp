#include "rbfpu/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "rbfpu/sparse_path.hpp"

namespace rbfpu {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

void config_line(std::ostream& os, const RunConfig& cfg) { os << "# config: " << describe_line(cfg) << '\n'; }

json metrics_json(const FlowMetrics& m) {
  json j;
  j["c_p"] = m.drag.c_p;
  j["c_omega"] = m.drag.c_omega;
  j["c_d"] = m.drag.c_d;
  j["wake_length"] = m.wake_length;
  if (m.eddy) {
    j["eddy"] = {{"a", m.eddy->x}, {"b", m.eddy->y}};
  } else {
    j["eddy"] = nullptr;
  }
  j["warnings"] = m.warnings;
  return j;
}

// One member of the Re family, in either formulation.
struct Formulation {
  std::function<NonlinearSystem(double)> factory;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> state;
  Eigen::Index dim = 0;
};

Formulation reduced_dense(std::shared_ptr<const Discretization> disc) {
  auto sys = std::make_shared<const ReducedSystem>(disc);
  Formulation f;
  f.dim = sys->dim();
  f.state = [sys](const Eigen::VectorXd& y) { return sys->state(y); };
  f.factory = [sys](double re) {
    NonlinearSystem ns;
    ns.dim = sys->dim();
    ns.residual = [sys, re](const Eigen::VectorXd& y) { return sys->residual(y, re); };
    ns.jacobian = [sys, re](const Eigen::VectorXd& y) -> std::unique_ptr<Linearization> {
      return std::make_unique<DenseLinearization>(sys->jacobian(y, re));
    };
    return ns;
  };
  return f;
}

Formulation sparse_alternative(std::shared_ptr<const Discretization> disc) {
  auto sys = std::make_shared<const SparseSystem>(disc);
  Formulation f;
  f.dim = sys->dim();
  f.state = [sys](const Eigen::VectorXd& xr) { return sys->state(xr); };
  f.factory = [sys](double re) {
    NonlinearSystem ns;
    ns.dim = sys->dim();
    ns.residual = [sys, re](const Eigen::VectorXd& xr) { return sys->residual(xr, re); };
    ns.jacobian = [sys, re](const Eigen::VectorXd& xr) -> std::unique_ptr<Linearization> {
      return std::make_unique<SparseLinearization>(SparseLinearization::Matrix(sys->jacobian(xr, re)));
    };
    return ns;
  };
  return f;
}

}  // namespace

void write_metrics_json(const std::filesystem::path& path, const RunConfig& cfg, const RunOutcome& out) {
  json j;
  json c = json::object();
  for (const auto& [k, v] : describe(cfg)) c[k] = v;
  j["config"] = c;
  j["converged"] = out.exit_code == 0;
  if (!out.message.empty()) j["failure"] = out.message;
  if (out.solution) {
    j["nodes"] = out.solution->disc->n();
    j["interior_nodes"] = out.solution->disc->n_interior();
  }
  json stages = json::array();
  for (const StageResult& s : out.stages) {
    json st;
    st["re"] = s.re;
    st["converged"] = s.report.converged;
    st["iterations"] = s.report.iterations;
    st["jacobian_evaluations"] = s.report.jacobian_evaluations;
    st["final_residual_inf"] = s.report.final_residual_inf;
    st["stop_reason"] = to_string(s.report.reason);
    st["merit_history"] = s.report.merit_history;
    if (s.metrics) {
      st["metrics"] = metrics_json(*s.metrics);
      st["c_d"] = s.metrics->drag.c_d;
    }
    stages.push_back(std::move(st));
  }
  j["stages"] = stages;
  for (auto it = out.stages.rbegin(); it != out.stages.rend(); ++it) {
    if (!it->metrics) continue;
    json fin = metrics_json(*it->metrics);
    fin["re"] = it->re;
    j["final"] = fin;
    j["c_d"] = it->metrics->drag.c_d;
    break;
  }
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

void write_surface_csv(const std::filesystem::path& path, const RunConfig& cfg, const FlowSolution& sol) {
  const SurfaceProfile s = surface_profiles(sol);
  auto f = open_out(path);
  config_line(f, cfg);
  f << "phi_plot,x,y,p,omega\n";
  // front stagnation point first
  for (std::size_t k = s.phi.size(); k-- > 0;) {
    f << num(s.phi_plot[k]) << ',' << num(s.x[k]) << ',' << num(s.y[k]) << ',' << num(s.pressure[k]) << ','
      << num(s.omega[k]) << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const RunConfig& cfg, const FlowSolution& sol) {
  const double ell = sol.disc->transform().ell;
  auto f = open_out(path);
  config_line(f, cfg);
  f << "x,y,inside,u,v,p,omega\n";
  for (const Point2& pt : evaluation_grid()) {
    f << num(pt.x) << ',' << num(pt.y) << ',';
    const auto q = flow_coords(*sol.disc, pt);
    if (!q) {
      f << "1,nan,nan,nan,nan\n";
      continue;
    }
    const NodalJets j = evaluate_jets(sol, *q);
    const Velocity v = physical_velocity(q->y, j.vxi.value, j.vphi.value);
    f << "0," << num(v.u) << ',' << num(v.v) << ',' << num(2.0 * j.p.value) << ',' << num(vorticity(q->x, j, ell))
      << '\n';
  }
}

void write_residuals_csv(const std::filesystem::path& path, const RunConfig& cfg, const FlowSolution& sol) {
  const ResidualReport r = residual_report(sol);
  auto f = open_out(path);
  config_line(f, cfg);
  f << "equation,rms,max,samples\n";
  for (std::size_t e = 0; e < 3; ++e) {
    f << 'R' << (e + 1) << ',' << num(r.eq[e].rms) << ',' << num(r.eq[e].max) << ',' << r.samples << '\n';
  }
}

RunOutcome run(const RunConfig& cfg, std::ostream* log) {
  RunOutcome out;
  std::shared_ptr<const Discretization> disc;
  Formulation form;
  try {
    cfg.validate();
    if (log) *log << "config: " << describe_line(cfg) << '\n';
    disc = std::make_shared<const Discretization>(cfg.disc);
    if (log) {
      *log << "nodes " << disc->n() << " (interior " << disc->n_interior() << ")\n";
      for (const auto& w : disc->warnings()) *log << "warning: " << w << '\n';
    }
    form = cfg.jacobian_mode == JacobianMode::ReducedDense ? reduced_dense(disc) : sparse_alternative(disc);
    if (log) *log << "unknowns after elimination " << form.dim << '\n';
  } catch (const ConfigError& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  } catch (const DomainError& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  } catch (const AssemblyError& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  }

  ContinuationReport cont;
  try {
    cont = continuation(form.factory, cfg.re_schedule, cfg.solver);
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  }

  for (StageReport& st : cont.stages) {
    StageResult sr;
    sr.re = st.re;
    sr.report = std::move(st.report);
    if (log) {
      *log << "Re " << sr.re << ": " << to_string(sr.report.reason) << " after " << sr.report.iterations
           << " iterations, |E|_inf " << sr.report.final_residual_inf << '\n';
    }
    if (sr.report.converged) {
      FlowSolution sol{disc, form.state(sr.report.y_final), sr.re};
      try {
        sr.metrics = compute_metrics(sol);
      } catch (const std::exception& e) {
        if (log) *log << "  post-processing failed: " << e.what() << '\n';
      }
      if (log && sr.metrics) {
        *log << "  C_p " << sr.metrics->drag.c_p << "  C_omega " << sr.metrics->drag.c_omega << "  C_D "
             << sr.metrics->drag.c_d << "  L " << sr.metrics->wake_length << '\n';
      }
      out.solution = std::move(sol);
    }
    out.stages.push_back(std::move(sr));
  }
  if (!cont.converged) {
    out.exit_code = 2;
    out.message = cont.failure;
    if (log) *log << "failed: " << cont.failure << '\n';
  }

  try {
    std::filesystem::create_directories(cfg.output_dir);
    const auto write = [&](bool on, const char* name, auto&& fn) {
      if (!on) return;
      const auto path = cfg.output_dir / name;
      fn(path);
      out.written.push_back(path);
    };
    write(cfg.exports.metrics, "metrics.json", [&](const auto& p) { write_metrics_json(p, cfg, out); });
    if (out.solution) {
      const FlowSolution& sol = *out.solution;
      write(cfg.exports.surface, "surface.csv", [&](const auto& p) { write_surface_csv(p, cfg, sol); });
      write(cfg.exports.field, "field.csv", [&](const auto& p) { write_field_csv(p, cfg, sol); });
      write(cfg.exports.residuals, "residuals.csv", [&](const auto& p) { write_residuals_csv(p, cfg, sol); });
    }
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.message = e.what();
  }
  return out;
}

}  // namespace rbfpu
