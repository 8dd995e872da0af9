#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "cbp/cases.hpp"
#include "cbp/config.hpp"
#include "cbp/solver.hpp"
#include "cbp/verify.hpp"

namespace cbp {

struct StepRecord {
  long step = 0;
  double time = 0.0;
  double dt = 0.0;
  LimiterStats stats;
};

struct RunResult {
  int status = 0;  // 0 ok, 2 numerical failure
  std::string error;
  std::string case_name;
  int order = 0;
  int nelems = 0;
  LimiterMode mode = LimiterMode::continuous;
  int n_iters = 0;
  double t_final = 0.0;
  double t_reached = 0.0;
  long steps = 0;
  std::optional<double> l1, linf, conv_error;  // conv_error uses the case's convergence norm
  AuditRecord audit;
  double gmin = std::numeric_limits<double>::infinity();        // spatio-temporal over audited times
  double final_gmin = std::numeric_limits<double>::infinity();  // last audit entry
  LimiterStats totals;
  std::vector<StepRecord> log;
  double mean_identity_error = 0.0;  // max |nodal mean rate - surface formula| over spot checks
  double conservation_drift = 0.0;   // max over components of |total(t) - total(0)| (periodic only)
  double wall_seconds = 0.0;
  std::vector<double> final_state;
};

namespace detail {

inline std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string vtk_name(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "field_%.6f.vtk", t);
  return buf;
}

inline std::string opt_sci(const std::optional<double>& v) { return v ? sci(*v) : ""; }

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline double mean_identity_check(const Discretization& d, const std::vector<double>& u, Workspace& ws) {
  ws.resize(d);
  dg_residual(d, u, ws.R, ws.fhat);
  double worst = 0.0;
  for (int e = 0; e < d.num_elements(); ++e)
    for (int c = 0; c < d.m; ++c) {
      const double a = d.element_mean(ws.R, e, c);
      const double b = surface_mean_rate(d, ws.fhat, e, c);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  return worst;
}

inline void write_summary(const std::filesystem::path& dir, const RunResult& r) {
  std::ofstream f(dir / "summary.csv");
  f << "case,order,nelems,mode,n_iters,t_final,t_reached,steps,l1_error,linf_error,gmin,final_gmin,"
       "limited_events,gradient_fallbacks,max_discrete_excess,wall_seconds,seconds_per_step,status,message\n";
  const double per_step = r.steps > 0 ? r.wall_seconds / r.steps : 0.0;
  f << r.case_name << ',' << r.order << ',' << r.nelems << ',' << to_string(r.mode) << ',' << r.n_iters << ','
    << sci(r.t_final) << ',' << sci(r.t_reached) << ',' << r.steps << ',' << opt_sci(r.l1) << ',' << opt_sci(r.linf)
    << ',' << sci(r.gmin) << ',' << sci(r.final_gmin) << ',' << r.totals.limited << ','
    << r.totals.gradient_fallbacks << ',' << sci(r.totals.max_discrete_excess) << ',' << sci(r.wall_seconds) << ','
    << sci(per_step) << ',' << (r.status == 0 ? "OK" : "FAILED") << ',' << csv_quote(r.error) << '\n';
}

inline void write_audit(const std::filesystem::path& dir, const RunResult& r, const ConstraintSet& set) {
  std::ofstream f(dir / "audit.csv");
  f << "time";
  for (int q = 0; q < set.size(); ++q) f << ",g" << q << "_min,g" << q << "_element,g" << q << "_x,g" << q << "_y";
  f << ",min,running_min\n";
  double running = std::numeric_limits<double>::infinity();
  for (const auto& a : r.audit.entries) {
    running = std::min(running, a.overall);
    f << sci(a.time);
    for (const auto& c : a.per_constraint)
      f << ',' << sci(c.value) << ',' << c.element << ',' << sci(c.x[0]) << ',' << sci(c.x[1]);
    f << ',' << sci(a.overall) << ',' << sci(running) << '\n';
  }
}

inline void write_limiter_log(const std::filesystem::path& dir, const RunResult& r) {
  std::ofstream f(dir / "limiter.csv");
  f << "step,time,dt,limited,max_alpha,gradient_fallbacks,degenerate,low_order,max_discrete_excess\n";
  for (const auto& s : r.log)
    f << s.step << ',' << sci(s.time) << ',' << sci(s.dt) << ',' << s.stats.limited << ',' << sci(s.stats.max_alpha)
      << ',' << s.stats.gradient_fallbacks << ',' << s.stats.degenerate << ',' << s.stats.low_order << ','
      << sci(s.stats.max_discrete_excess) << '\n';
}

/// Legacy ASCII VTK structured points. Each element is resampled at q x q
/// equispaced sub-cell centers (q = p + 1), giving a uniform global grid.
inline void write_vtk(const std::filesystem::path& file, const Discretization& d, const std::vector<double>& u,
                      const ConstraintSet& set) {
  const int q = d.p + 1;
  const int nx = d.mesh.nx * q, ny = d.mesh.ny * q;
  const double dx = d.mesh.size[0] / q, dy = d.mesh.size[1] / q;
  std::vector<StateVec> vals(static_cast<size_t>(nx) * ny);
  const size_t len = static_cast<size_t>(d.nodes) * d.m;
  for (int e = 0; e < d.num_elements(); ++e) {
    const ModalSolution modal = nodal_to_modal(std::span<const double>(u).subspan(d.node_slot(e, 0), len), d.m,
                                               d.basis, e);
    const int ei = e % d.mesh.nx, ej = e / d.mesh.nx;
    for (int b = 0; b < q; ++b)
      for (int a = 0; a < q; ++a) {
        const Coord xr{-1.0 + (2.0 * a + 1.0) / q, -1.0 + (2.0 * b + 1.0) / q};
        vals[static_cast<size_t>(ej * q + b) * nx + (ei * q + a)] = modal_evaluate(modal, d.basis, xr);
      }
  }
  std::ofstream f(file);
  f << "# vtk DataFile Version 3.0\n"
    << "dg solution\nASCII\nDATASET STRUCTURED_POINTS\n"
    << "DIMENSIONS " << nx << ' ' << ny << " 1\n"
    << "ORIGIN " << sci(d.mesh.lo[0] + 0.5 * dx) << ' ' << sci(d.mesh.lo[1] + 0.5 * dy) << " 0\n"
    << "SPACING " << sci(dx) << ' ' << sci(dy) << " 1\n"
    << "POINT_DATA " << vals.size() << '\n';
  auto field = [&](const std::string& name, auto&& fn) {
    f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& v : vals) f << sci(fn(v)) << '\n';
  };
  for (int c = 0; c < d.m; ++c) field("u" + std::to_string(c), [c](const StateVec& v) { return v[c]; });
  for (int k = 0; k < set.size(); ++k) field("g" + std::to_string(k), [&set, k](const StateVec& v) { return set[k](v); });
}

}  // namespace detail

struct ResolvedRun {
  CaseDefinition def;
  int order = 0;
  int nelems = 0;
  double t_final = 0.0;
  double cfl = 0.5;
  bool stabilizer = false;
  AuditCadence audit = AuditCadence::every_step;
};

inline ResolvedRun resolve(const RunConfig& cfg) {
  validate(cfg);
  ResolvedRun r;
  r.def = get_case(cfg.case_name);
  r.order = cfg.order.value_or(r.def.order);
  r.nelems = cfg.nelems.value_or(r.def.nelems);
  r.t_final = cfg.t_final.value_or(r.def.t_final);
  r.cfl = cfg.cfl.value_or(r.def.cfl);
  r.stabilizer = cfg.stabilizer.value_or(r.def.stabilizer);
  r.audit = cfg.audit.value_or(r.def.audit);
  return r;
}

/// Runs one simulation. Configuration problems throw ConfigError; numerical
/// breakdown is reported through status 2 with partial artifacts on disk.
inline RunResult run(const RunConfig& cfg) {
  const ResolvedRun rr = resolve(cfg);
  const CaseDefinition& def = rr.def;
  RunResult res;
  res.case_name = def.name;
  res.order = rr.order;
  res.nelems = rr.nelems;
  res.mode = cfg.mode;
  res.n_iters = cfg.mode == LimiterMode::continuous ? cfg.n_iters : 0;
  res.t_final = rr.t_final;

  Scheme s;
  s.disc = make_discretization(def.build_mesh(rr.nelems), rr.order, def.equation);
  s.constraints = def.constraints;
  s.limiter.mode = cfg.mode;
  s.limiter.n_iters = cfg.n_iters;
  s.indicator.enabled = rr.stabilizer;
  s.indicator.eps_d = cfg.eps_d;
  s.indicator.measure = Measure::of_component(0);
  s.cfl = rr.cfl;
  const Sampler sampler = Sampler::make(s.disc.basis, cfg.oversample);

  std::filesystem::path dir(cfg.out_dir);
  if (cfg.write_files) std::filesystem::create_directories(dir);

  const auto t0 = std::chrono::steady_clock::now();
  SimulationState st;
  Workspace ws;
  std::vector<double> totals0;
  auto audit = [&] {
    const AuditEntry a = oversample_min(s.disc, st.u, s.constraints, sampler, st.t);
    res.audit.add(a);
    res.final_gmin = a.overall;
  };
  try {
    LimiterStats init_stats;
    st = initialize(s, def.initial, &init_stats);
    res.totals.merge(init_stats);
    for (int c = 0; c < s.disc.m; ++c) totals0.push_back(conserved_total(s.disc, st.u, c));
    audit();
    if (cfg.write_files && cfg.vtk && s.disc.dim() == 2)
      detail::write_vtk(dir / detail::vtk_name(0.0), s.disc, st.u, s.constraints);
    const double tf = rr.t_final;
    while (st.t < tf * (1.0 - 1e-14)) {
      if (st.step % 100 == 0)
        res.mean_identity_error = std::max(res.mean_identity_error, detail::mean_identity_check(s.disc, st.u, ws));
      const double dt = compute_dt(s.disc, st.u, s.cfl, s.indicator.enabled, tf - st.t);
      StepRecord rec;
      rec.dt = dt;
      rec.stats = ssp_rk3_step(s, st, dt, ws);
      rec.step = st.step;
      rec.time = st.t;
      res.totals.merge(rec.stats);
      res.log.push_back(rec);
      if (rr.audit == AuditCadence::every_step) audit();
    }
    if (rr.audit == AuditCadence::final_only) audit();
    if (s.disc.mesh.boundary == BoundaryKind::periodic)
      for (int c = 0; c < s.disc.m; ++c)
        res.conservation_drift =
            std::max(res.conservation_drift, std::abs(conserved_total(s.disc, st.u, c) - totals0[c]));
    if (def.exact) {
      res.l1 = lp_error(s.disc, st.u, *def.exact, st.t, Norm::l1, def.norm_component);
      res.linf = lp_error(s.disc, st.u, *def.exact, st.t, Norm::linf, def.norm_component);
      res.conv_error = def.norm == Norm::l1 ? res.l1 : res.linf;
    }
    if (cfg.write_files && cfg.vtk && s.disc.dim() == 2)
      detail::write_vtk(dir / detail::vtk_name(st.t), s.disc, st.u, s.constraints);
  } catch (const NumericalError& ex) {
    res.status = 2;
    res.error = ex.what();
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.t_reached = st.t;
  res.steps = st.step;
  res.gmin = res.audit.running_overall;
  res.final_state = st.u;
  if (cfg.write_files) {
    detail::write_summary(dir, res);
    detail::write_audit(dir, res, s.constraints);
    detail::write_limiter_log(dir, res);
  }
  return res;
}

struct ConvergenceRow {
  int n = 0;
  double error = 0.0;
  double gmin = 0.0;
  long steps = 0;
  double wall_seconds = 0.0;
};

struct ConvergenceResult {
  int status = 0;
  std::string error;
  std::vector<ConvergenceRow> rows;
  double roc = 0.0;
  double max_discrete_excess = -std::numeric_limits<double>::infinity();
  std::vector<RunResult> runs;
};

/// Sweeps N and writes convergence.csv (one row per N, then a RoC row).
inline ConvergenceResult convergence(const RunConfig& cfg, std::vector<int> ns = {}) {
  const ResolvedRun rr = resolve(cfg);
  if (!rr.def.exact) throw ConfigError("case '" + rr.def.name + "' has no exact solution for a convergence study");
  if (ns.empty()) ns = cfg.nelems_list.empty() ? rr.def.convergence_n : cfg.nelems_list;
  if (ns.size() < 2) throw ConfigError("convergence needs at least two mesh sizes");
  ConvergenceResult out;
  std::vector<double> errs, nvals;
  for (int n : ns) {
    RunConfig c = cfg;
    c.nelems = n;
    c.out_dir = (std::filesystem::path(cfg.out_dir) / ("N" + std::to_string(n))).string();
    RunResult r = run(c);
    out.max_discrete_excess = std::max(out.max_discrete_excess, r.totals.max_discrete_excess);
    if (r.status != 0) {
      out.status = r.status;
      out.error = "N=" + std::to_string(n) + ": " + r.error;
      out.runs.push_back(std::move(r));
      break;
    }
    out.rows.push_back({n, *r.conv_error, r.gmin, r.steps, r.wall_seconds});
    errs.push_back(*r.conv_error);
    nvals.push_back(n);
    r.final_state.clear();
    out.runs.push_back(std::move(r));
  }
  if (out.status == 0) out.roc = rate_of_convergence(errs, nvals);
  if (cfg.write_files) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream f(std::filesystem::path(cfg.out_dir) / "convergence.csv");
    f << "N," << to_string(rr.def.norm) << "_error,gmin,steps,wall_seconds\n";
    for (const auto& r : out.rows)
      f << r.n << ',' << detail::sci(r.error) << ',' << detail::sci(r.gmin) << ',' << r.steps << ','
        << detail::sci(r.wall_seconds) << '\n';
    if (out.status == 0)
      f << "RoC," << detail::sci(out.roc) << ",,,\n";
    else
      f << "FAILED," << detail::csv_quote(out.error) << ",,,\n";
  }
  return out;
}

}  // namespace cbp
