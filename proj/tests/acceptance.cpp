// Acceptance harness: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes. Runs the full PDE sweeps, so expect minutes.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cbp/cbp.hpp"

using namespace cbp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!cond || detail.size() < 2000) detail += (detail.empty() ? "" : "; ") + std::string(cond ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RunConfig config(const std::string& name, int p, int n, LimiterMode mode) {
  RunConfig c;
  c.case_name = name;
  c.order = p;
  if (n > 0) c.nelems = n;  // sweeps pass their own list
  c.mode = mode;
  c.write_files = false;
  return c;
}

// Largest alpha_discrete - alpha seen anywhere; criterion 4 collects it from every run.
double g_excess = -std::numeric_limits<double>::infinity();
void note(const RunResult& r) { g_excess = std::max(g_excess, r.totals.max_discrete_excess); }
void note(const ConvergenceResult& c) { g_excess = std::max(g_excess, c.max_discrete_excess); }

int failures = 0;
void report(int id, const Verdict& v, double secs) {
  if (!v.ok) ++failures;
  std::printf("criterion %d: %s (%.1fs) %s\n", id, v.ok ? "PASS" : "FAIL", secs, v.detail.c_str());
  std::fflush(stdout);
}

// Criteria 1 and 2 share the continuous sweep.
void waveforms_continuous() {
  const std::vector<int> ns{20, 40, 60, 80, 100, 120};
  const std::vector<std::vector<double>> table{{7.52e-2, 3.50e-2, 2.16e-2, 1.55e-2, 1.22e-2, 1.01e-2},
                                               {7.63e-2, 3.24e-2, 2.03e-2, 1.48e-2, 1.16e-2, 9.52e-3}};
  const std::vector<double> roc_table{1.13, 1.16};
  Verdict v1, v2;
  const auto t0 = Clock::now();
  for (int k = 0; k < 2; ++k) {
    const int p = 2 + k;
    const ConvergenceResult c = convergence(config("advect-waveforms", p, 0, LimiterMode::continuous), ns);
    note(c);
    if (c.status != 0) {
      v1.require(false, "P" + std::to_string(p) + " run failed: " + c.error);
      v2.require(false, "P" + std::to_string(p) + " run failed");
      continue;
    }
    for (size_t i = 0; i < ns.size(); ++i) {
      const double rel = c.rows[i].error / table[k][i] - 1.0;
      v1.require(std::abs(rel) <= 0.30, "P" + std::to_string(p) + " N=" + std::to_string(ns[i]) +
                                            fmt(" L1=%.3e", c.rows[i].error) + fmt(" (%+.0f%%)", 100.0 * rel));
      v2.require(c.rows[i].gmin >= -1e-12,
                 "P" + std::to_string(p) + " N=" + std::to_string(ns[i]) + fmt(" gmin=%.2e", c.rows[i].gmin));
    }
    v1.require(std::abs(c.roc - roc_table[k]) <= 0.15,
               "P" + std::to_string(p) + fmt(" RoC=%.3f", c.roc) + fmt(" (table %.2f)", roc_table[k]));
  }
  const double secs = seconds_since(t0);
  v1.require(secs < 120.0, fmt("runtime %.1fs < 120s", secs));
  report(1, v1, secs);
  report(2, v2, secs);
}

void waveforms_discrete() {
  const std::vector<int> ns{20, 40, 60, 80, 100, 120};
  Verdict v;
  const auto t0 = Clock::now();
  for (int p = 2; p <= 5; ++p) {
    const ConvergenceResult c = convergence(config("advect-waveforms", p, 0, LimiterMode::discrete), ns);
    note(c);
    if (c.status != 0) {
      v.require(false, "P" + std::to_string(p) + " failed: " + c.error);
      continue;
    }
    std::string row = "P" + std::to_string(p) + " gmin";
    bool in_range = true;
    for (const auto& r : c.rows) {
      row += fmt(" %.4f", r.gmin);
      in_range = in_range && r.gmin >= -0.15 && r.gmin <= -0.10;
    }
    v.require(in_range, row);
    // the violation must not fade with refinement
    v.require(c.rows.back().gmin <= 0.9 * c.rows.front().gmin, "P" + std::to_string(p) + " not shrinking");
  }
  report(3, v, seconds_since(t0));
}

void pulse() {
  Verdict v;
  const auto t0 = Clock::now();
  const std::vector<int> ns{10, 15, 20, 25, 30, 35, 40};
  for (int p : {2, 3}) {
    const ConvergenceResult c = convergence(config("euler-pulse", p, 0, LimiterMode::continuous), ns);
    note(c);
    if (c.status != 0) {
      v.require(false, "P" + std::to_string(p) + " failed: " + c.error);
      continue;
    }
    std::vector<double> l1, nv;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : c.runs) {
      l1.push_back(*r.l1);
      nv.push_back(r.nelems);
      worst = std::min(worst, r.gmin);
    }
    v.require(c.roc >= p + 0.5, "P" + std::to_string(p) + fmt(" Linf RoC=%.3f", c.roc) +
                                    fmt(" (L1 RoC %.3f, reported only)", rate_of_convergence(l1, nv)));
    v.require(worst >= -1e-12, "P" + std::to_string(p) + fmt(" density/pressure gmin=%.2e", worst));
  }
  const double secs = seconds_since(t0);
  v.require(secs < 120.0, fmt("runtime %.1fs < 120s", secs));
  report(5, v, secs);
}

void burgers() {
  Verdict v;
  const auto t0 = Clock::now();
  for (int p : {3, 6}) {
    const RunResult c = run(config("burgers-compression", p, 24, LimiterMode::continuous));
    const RunResult d = run(config("burgers-compression", p, 24, LimiterMode::discrete));
    note(c);
    note(d);
    v.require(c.status == 0 && d.status == 0, "P" + std::to_string(p) + " runs completed");
    v.require(c.gmin >= -1e-10, "P" + std::to_string(p) + fmt(" continuous gmin=%.2e", c.gmin));
    v.require(d.gmin < 0.0, "P" + std::to_string(p) + fmt(" discrete gmin=%.2e", d.gmin));
  }
  report(6, v, seconds_since(t0));
}

void leblanc() {
  Verdict v;
  const auto t0 = Clock::now();
  const RunResult c = run(config("leblanc", 3, 1200, LimiterMode::continuous));
  const double tc = seconds_since(t0);
  note(c);
  v.require(c.status == 0 && c.t_reached == 6.0, "continuous run reached t=6" + (c.error.empty() ? "" : ": " + c.error));
  if (c.status == 0) {
    const double pmin = c.audit.running[1].value + kEulerMinBound;
    v.require(c.audit.running[1].value >= -1e-12, fmt("continuous min pressure %.3e >= P_min - 1e-12", pmin));
    v.require(c.audit.running[0].value >= -1e-12, fmt("continuous density g=%.2e", c.audit.running[0].value));
  }
  v.require(tc < 600.0, fmt("continuous runtime %.1fs < 600s", tc));
  const RunResult d = run(config("leblanc", 3, 1200, LimiterMode::discrete));
  note(d);
  if (d.status == 0) {
    const double pmin = d.audit.entries.back().per_constraint[1].value + kEulerMinBound;
    v.require(pmin < -1e-7, fmt("discrete min pressure at t=6 %.3e < -1e-7", pmin));
  } else {
    v.require(false, "discrete run failed: " + d.error);
  }
  report(7, v, seconds_since(t0));
}

void rotation_and_sedov() {
  Verdict v;
  const auto t0 = Clock::now();
  const RunResult r = run(config("solid-body-rotation", 2, 32, LimiterMode::continuous));
  const double tr = seconds_since(t0);
  note(r);
  v.require(r.status == 0, "rotation run completed");
  v.require(r.final_gmin >= -1e-12, fmt("rotation final gmin=%.2e", r.final_gmin));
  v.require(tr < 600.0, fmt("rotation runtime %.1fs < 600s", tr));
  if (r.l1) v.require(true, fmt("rotation L1=%.3e (reported)", *r.l1));
  const auto t1 = Clock::now();
  const RunResult s = run(config("sedov", 2, 65, LimiterMode::continuous));
  note(s);
  v.require(s.status == 0, "sedov 65^2 completed" + (s.error.empty() ? "" : ": " + s.error));
  if (s.status == 0) {
    v.require(s.audit.running[0].value >= -1e-12, fmt("sedov density g=%.2e", s.audit.running[0].value));
    v.require(s.audit.running[1].value >= -1e-12, fmt("sedov pressure g=%.2e", s.audit.running[1].value));
  }
  v.require(true, fmt("sedov runtime %.1fs (not gated)", seconds_since(t1)));
  report(8, v, seconds_since(t0));
}

// ---- property suite (no PDE) ----

ModalSolution random_overshooting(const Basis& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-0.4, 1.4);
  for (;;) {
    std::vector<double> nodal(b.size());
    for (auto& x : nodal) x = U(rng);
    ModalSolution u = nodal_to_modal(nodal, 1, b);
    const double m = element_mean(u, b)[0];
    if (m > 0.02 && m < 0.98) return u;
  }
}

void properties() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  const auto set = scalar_bounds_set(0.0, 1.0);
  const ElementKind kinds[] = {ElementKind::segment, ElementKind::quad, ElementKind::triangle};

  // (a) continuous bounds, (b) conservation, (c) h** soundness. The bound in
  // (a) assumes h** is a true lower bound, so it runs with a converged search;
  // the default three-iteration result is printed alongside.
  LimiterConfig converged;
  converged.n_iters = 20;
  double worst_g = 0.0, worst_default = 0.0, worst_mean = 0.0;
  long sound = 0, total = 0, traced = 0;
  for (auto k : kinds)
    for (int p : {2, 3, 4}) {
      const Basis b = build_basis(k, p);
      const Sampler dense = Sampler::make(b, 100);
      for (int t = 0; t < 1000; ++t) {
        const ModalSolution u = random_overshooting(b, rng);
        const auto out = limit_element(u, set, b, converged);
        for (const auto& m : oversample_element(out, set, dense)) worst_g = std::min(worst_g, m.value);
        const auto dflt = limit_element(u, set, b, LimiterConfig{});
        for (const auto& m : oversample_element(dflt, set, dense)) worst_default = std::min(worst_default, m.value);
        worst_mean = std::max(worst_mean, std::abs(element_mean(dflt, b)[0] - element_mean(u, b)[0]));

        const double mean = element_mean(u, b)[0];
        const auto mins = oversample_element(u, set, dense);
        for (int q = 0; q < 2; ++q) {
          const double gm = set[q](StateVec{mean});
          const double hd = eval_h(mins[q].value, gm);
          const auto r = optimize_h(u, set[q], gm, b, b.nodal.nodes, LimiterConfig{});
          ++total;
          if (r.h_corrected <= hd + 1e-12) {
            ++sound;
          } else if (optimize_h(u, set[q], gm, b, b.nodal.nodes, converged).h_corrected <= hd + 1e-12) {
            ++traced;  // same starts, more iterations: the miss was non-convergence
          }
        }
      }
    }
  v.require(worst_g >= -1e-10, fmt("(a) min dense g after limiting %.2e", worst_g) +
                                   fmt(" [default 3 iterations: %.2e]", worst_default));
  v.require(worst_mean <= 1e-13, fmt("(b) max mean change %.2e", worst_mean));
  const double frac = static_cast<double>(sound) / total;
  v.require(frac >= 0.995, fmt("(c) h** <= dense min in %.4f of trials", frac));
  v.require(traced == total - sound, std::to_string(total - sound) + " exceptions, " + std::to_string(traced) +
                                         " resolved by 20 iterations from the same starts");

  // (d) h is C1 across g = 0 along a transect of a cubic crossing the bound
  {
    const Basis b = build_basis(ElementKind::segment, 3);
    ModalSolution u(1, b.size());
    u(0, 0) = 0.3, u(0, 1) = 0.8, u(0, 3) = 0.1;  // root near x = -0.37
    const auto g = min_principle(Measure::of_component(0), 0.0);
    const double gm = g(element_mean(u, b));
    auto h = [&](double x) { return eval_h(g(modal_evaluate(u, b.modal, {x, 0.0})), gm); };
    double lo = -1.0, hi = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (g(modal_evaluate(u, b.modal, {mid, 0.0})) < 0.0 ? lo : hi) = mid;
    }
    const double x0 = 0.5 * (lo + hi);
    std::vector<double> mis;
    for (double s : {1e-2, 1e-3, 1e-4}) {
      const double right = (h(x0 + s) - h(x0)) / s, left = (h(x0) - h(x0 - s)) / s;
      mis.push_back(std::abs(right - left));
    }
    const bool first_order = mis[1] < 0.2 * mis[0] && mis[2] < 0.2 * mis[1];
    v.require(first_order, fmt("(d) slope mismatch %.2e", mis[0]) + fmt(" -> %.2e", mis[1]) + fmt(" -> %.2e", mis[2]));
  }

  // (e) certified monomial bounds contain dense samples
  {
    long bad = 0;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
      const auto kind = t % 2 == 0 ? ElementKind::segment : ElementKind::quad;
      const Basis b = build_basis(kind, 2 + t % 3);
      ModalSolution u(1, b.size());
      for (auto& c : u.coeffs) c = U(rng);
      const double a = U(rng), c = U(rng), d = U(rng), e = U(rng);
      const Box box{{std::min(a, c), std::min(d, e)}, {std::max(a, c), std::max(d, e)}};
      const auto [blo, bhi] = monomial_bounds(u, b.modal, box)[0];
      const int n = kind == ElementKind::segment ? 10000 : 100;
      for (int j = 0; j < (kind == ElementKind::segment ? 1 : n); ++j)
        for (int i = 0; i < n; ++i) {
          const Coord x{box.lo[0] + (box.hi[0] - box.lo[0]) * i / (n - 1.0),
                        kind == ElementKind::segment ? 0.0 : box.lo[1] + (box.hi[1] - box.lo[1]) * j / (n - 1.0)};
          const double val = modal_evaluate(u, b.modal, x)[0];
          if (val < blo - 1e-13 || val > bhi + 1e-13) ++bad;
        }
    }
    v.require(bad == 0, "(e) containment violations " + std::to_string(bad));
  }
  const double secs = seconds_since(t0);
  v.require(secs < 120.0, fmt("runtime %.1fs < 120s", secs));
  report(9, v, secs);
}

void solver_properties() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.5, 1.5);
  std::vector<Discretization> ds;
  ds.push_back(make_discretization(build_interval_mesh(16, 0.0, 1.0, BoundaryKind::periodic), 4,
                                   EquationSet::advection({1.0, 0.0}, 1)));
  ds.push_back(make_discretization(build_interval_mesh(16, 0.0, 1.0, BoundaryKind::periodic), 3,
                                   EquationSet::euler(1, 1.4)));
  ds.push_back(make_discretization(build_cartesian_mesh(8, 8, {0, 0}, {1, 1}, BoundaryKind::periodic), 3,
                                   EquationSet::solid_body_rotation()));
  ds.push_back(make_discretization(build_cartesian_mesh(6, 6, {0, 0}, {1, 1}, BoundaryKind::periodic), 2,
                                   EquationSet::euler(2, 1.4)));
  double fs = 0.0, mi = 0.0;
  for (const auto& d : ds) {
    std::vector<double> u(d.dofs()), R(d.dofs()), fhat(d.face_dofs());
    const std::vector<double> cst = d.m == 1 ? std::vector<double>{0.6}
                                    : d.m == 3 ? std::vector<double>{1.1, 0.3, 2.7}
                                               : std::vector<double>{1.1, 0.3, -0.2, 2.7};
    for (size_t k = 0; k < u.size(); ++k) u[k] = cst[k % d.m];
    dg_residual(d, u, R, fhat);
    for (double r : R) fs = std::max(fs, std::abs(r));
    for (size_t k = 0; k < u.size(); ++k) u[k] = U(rng) + (d.m > 1 && static_cast<int>(k % d.m) == d.m - 1 ? 3.0 : 0.0);
    dg_residual(d, u, R, fhat);
    for (int e = 0; e < d.num_elements(); ++e)
      for (int c = 0; c < d.m; ++c) mi = std::max(mi, std::abs(d.element_mean(R, e, c) - surface_mean_rate(d, fhat, e, c)));
  }
  v.require(fs <= 1e-12, fmt("free-stream residual %.2e", fs));
  v.require(mi <= 1e-12, fmt("mean-update identity %.2e", mi));

  const double lambda = -1.3;
  std::vector<double> errs;
  for (int n : {20, 40, 80}) {
    const double dt = 1.0 / n;
    std::vector<double> y{1.0}, a(1), b(1), c(1);
    for (int k = 0; k < n; ++k)
      ssp_rk3(y, [&](const std::vector<double>& in, std::vector<double>& out) { out[0] = in[0] * (1.0 + dt * lambda); },
              [](std::vector<double>&, int) {}, a, b, c);
    errs.push_back(std::abs(y[0] - std::exp(lambda)));
  }
  const double order = std::min(std::log2(errs[0] / errs[1]), std::log2(errs[1] / errs[2]));
  v.require(order >= 2.9, fmt("SSP-RK3 observed order %.3f", order));
  report(10, v, seconds_since(t0));
}

void iteration_cost() {
  // Wall time per step against optimizer iterations; reported, not gated.
  std::string line = "info: waveforms P3 N=60 seconds/step by n_iters:";
  for (int it : {0, 1, 3, 5}) {
    RunConfig c = config("advect-waveforms", 3, 60, LimiterMode::continuous);
    c.n_iters = it;
    c.t_final = 0.25;
    const RunResult r = run(c);
    line += " " + std::to_string(it) + "=" + fmt("%.2e", r.wall_seconds / std::max(1L, r.steps));
  }
  std::printf("%s\n", line.c_str());
}

}  // namespace

// With arguments, only the listed criteria run (e.g. `cbp_acceptance 9 10`).
int main(int argc, char** argv) {
  set_workers(configured_workers());
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](std::initializer_list<int> ids) {
    if (only.empty()) return true;
    for (int id : ids)
      if (only.count(id)) return true;
    return false;
  };
  const auto t0 = Clock::now();
  try {
    if (want({1, 2})) waveforms_continuous();
    if (want({3})) waveforms_discrete();
    if (want({5})) pulse();
    if (want({6})) burgers();
    if (want({7})) leblanc();
    if (want({8})) rotation_and_sedov();
    if (only.empty()) {
      Verdict v;
      v.require(g_excess <= 1e-14, fmt("max alpha_discrete - alpha over all runs %.2e", g_excess));
      report(4, v, 0.0);
    }
    if (want({9})) properties();
    if (want({10})) solver_properties();
    if (only.empty()) iteration_cost();
  } catch (const ConfigError& e) {
    std::printf("acceptance: configuration error: %s\n", e.what());
    return 1;
  }
  std::printf("acceptance: %d failing criteria, total %.1fs\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
