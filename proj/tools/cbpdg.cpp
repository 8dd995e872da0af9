// Command-line driver: run a case, sweep a convergence study, or self-check
// the certified monomial bounds.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbp/cbp.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Overrides {
  std::string config_file;
  std::string case_name;
  int order = 0;
  int nelems = 0;
  std::string limiter;
  int niters = -1;
  double cfl = 0.0;
  double tf = 0.0;
  std::string out;
  std::string nlist;
  std::string audit;
  int stabilizer = -1;
};

void add_run_options(CLI::App* app, Overrides& o) {
  app->add_option("config", o.config_file, "INI-style run configuration")->check(CLI::ExistingFile);
  app->add_option("--case", o.case_name, "case name (overrides [case] name)");
  app->add_option("--order", o.order, "polynomial order p");
  app->add_option("--nelems", o.nelems, "elements per axis");
  app->add_option("--limiter", o.limiter, "continuous | discrete | none");
  app->add_option("--niters", o.niters, "optimizer iterations");
  app->add_option("--cfl", o.cfl, "CFL number");
  app->add_option("--tf", o.tf, "final time");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--audit", o.audit, "audit cadence: every | final");
  app->add_option("--stabilizer", o.stabilizer, "subcell stabilizer 1/0");
}

cbp::RunConfig build_config(const Overrides& o) {
  cbp::RunConfig cfg;
  if (!o.config_file.empty()) {
    std::ifstream f(o.config_file);
    std::stringstream ss;
    ss << f.rdbuf();
    cfg = cbp::parse_config_unchecked(ss.str());
  }
  auto set = [&](const char* section, const char* key, const std::string& v) { cbp::apply_setting(cfg, section, key, v); };
  if (!o.case_name.empty()) set("case", "name", o.case_name);
  if (o.order != 0) set("case", "order", std::to_string(o.order));
  if (o.nelems != 0) set("case", "nelems", std::to_string(o.nelems));
  if (!o.nlist.empty()) set("case", "nelems_list", o.nlist);
  if (o.tf != 0.0) cfg.t_final = o.tf;
  if (!o.limiter.empty()) set("limiter", "mode", o.limiter);
  if (o.niters != -1) cfg.n_iters = o.niters;
  if (o.cfl != 0.0) cfg.cfl = o.cfl;
  if (o.stabilizer != -1) cfg.stabilizer = o.stabilizer != 0;
  if (!o.out.empty()) set("output", "dir", o.out);
  if (!o.audit.empty()) set("output", "audit", o.audit);
  cbp::validate(cfg);
  return cfg;
}

int do_run(const Overrides& o) {
  const cbp::RunConfig cfg = build_config(o);
  const cbp::RunResult r = cbp::run(cfg);
  if (r.status != 0) {
    std::fprintf(stderr, "error: %s\n", r.error.c_str());
    return kExitNumerical;
  }
  std::printf("%s p=%d N=%d mode=%s steps=%ld t=%.6f gmin=%.3e", r.case_name.c_str(), r.order, r.nelems,
              cbp::to_string(r.mode).c_str(), r.steps, r.t_reached, r.gmin);
  if (r.l1) std::printf(" L1=%.3e Linf=%.3e", *r.l1, *r.linf);
  std::printf(" wall=%.2fs\n", r.wall_seconds);
  return 0;
}

int do_convergence(const Overrides& o) {
  const cbp::RunConfig cfg = build_config(o);
  const cbp::ConvergenceResult c = cbp::convergence(cfg);
  for (const auto& row : c.rows) std::printf("N=%4d  error=%.3e  gmin=%.3e\n", row.n, row.error, row.gmin);
  if (c.status != 0) {
    std::fprintf(stderr, "error: %s\n", c.error.c_str());
    return kExitNumerical;
  }
  std::printf("RoC=%.3f\n", c.roc);
  return 0;
}

// Random monomial polynomials and sub-boxes; dense sampling must stay inside
// the certified enclosure.
int do_audit_bounds(int trials, unsigned seed, int order) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), pos(-1.0, 1.0);
  int failures = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto kind = t % 2 == 0 ? cbp::ElementKind::segment : cbp::ElementKind::quad;
    const auto mb = cbp::MonomialBasis::make(kind, order);
    cbp::ModalSolution u(1, mb.size());
    for (auto& c : u.coeffs) c = coef(rng);
    double a = pos(rng), b = pos(rng), c = pos(rng), d = pos(rng);
    cbp::Box box{{std::min(a, b), std::min(c, d)}, {std::max(a, b), std::max(c, d)}};
    const auto bounds = cbp::monomial_bounds(u, mb, box);
    const int n = kind == cbp::ElementKind::segment ? 10000 : 100;
    for (int j = 0; j < (kind == cbp::ElementKind::segment ? 1 : n); ++j)
      for (int i = 0; i < n; ++i) {
        const cbp::Coord x{box.lo[0] + (box.hi[0] - box.lo[0]) * i / (n - 1.0),
                           box.lo[1] + (box.hi[1] - box.lo[1]) * j / (n - 1.0)};
        const double v = cbp::modal_evaluate(u, mb, x)[0];
        const double excess = std::max(bounds[0].first - v, v - bounds[0].second);
        worst = std::max(worst, excess);
        if (excess > 1e-12) ++failures;
      }
  }
  std::printf("audit-bounds: %d trials, p=%d, max excess %.3e, violations %d\n", trials, order, worst, failures);
  return failures == 0 ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuously bounds-preserving DG solver"};
  app.require_subcommand(1);
  Overrides run_o, conv_o;
  auto* run_cmd = app.add_subcommand("run", "run one case");
  add_run_options(run_cmd, run_o);
  auto* conv_cmd = app.add_subcommand("convergence", "mesh-refinement study with RoC");
  add_run_options(conv_cmd, conv_o);
  conv_cmd->add_option("--nlist", conv_o.nlist, "comma-separated element counts");
  auto* bounds_cmd = app.add_subcommand("audit-bounds", "self-check of certified monomial bounds");
  int trials = 1000, order = 4;
  unsigned seed = 12345;
  bounds_cmd->add_option("--trials", trials, "random polynomial/box pairs")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--seed", seed, "random seed");
  bounds_cmd->add_option("--order", order, "polynomial order")->check(CLI::Range(1, cbp::kMaxOrder));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  try {
    cbp::set_workers(cbp::configured_workers());
    if (*run_cmd) return do_run(run_o);
    if (*conv_cmd) return do_convergence(conv_o);
    if (*bounds_cmd) return do_audit_bounds(trials, seed, order);
  } catch (const cbp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const cbp::UsageError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const cbp::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
