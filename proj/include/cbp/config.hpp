#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cbp/cases.hpp"
#include "cbp/errors.hpp"
#include "cbp/limiter.hpp"

namespace cbp {

struct RunConfig {
  std::string case_name;
  std::optional<int> order;
  std::optional<int> nelems;
  std::optional<double> t_final;
  std::vector<int> nelems_list;  // convergence sweep

  LimiterMode mode = LimiterMode::continuous;
  int n_iters = 3;

  std::optional<bool> stabilizer;
  std::optional<double> cfl;
  double eps_d = 1e-2;

  std::string out_dir = "out";
  int oversample = 100;
  std::optional<AuditCadence> audit;
  bool vtk = true;
  bool write_files = true;  // set false by in-process callers that only need the RunResult
};

namespace detail {

inline std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

inline int parse_int(const std::string& s, const std::string& ctx) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(ctx + ": expected integer, got '" + s + "'");
  return v;
}

inline double parse_double(const std::string& s, const std::string& ctx) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(ctx + ": expected number, got '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& ctx) {
  std::string l = s;
  for (auto& ch : l) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (l == "true" || l == "on" || l == "yes" || l == "1") return true;
  if (l == "false" || l == "off" || l == "no" || l == "0") return false;
  throw ConfigError(ctx + ": expected boolean (true/false), got '" + s + "'");
}

inline LimiterMode parse_mode(const std::string& s, const std::string& ctx) {
  if (s == "continuous") return LimiterMode::continuous;
  if (s == "discrete") return LimiterMode::discrete;
  if (s == "none") return LimiterMode::none;
  throw ConfigError(ctx + ": expected one of continuous, discrete, none, got '" + s + "'");
}

inline AuditCadence parse_cadence(const std::string& s, const std::string& ctx) {
  if (s == "every" || s == "every_step") return AuditCadence::every_step;
  if (s == "final" || s == "final_only") return AuditCadence::final_only;
  throw ConfigError(ctx + ": expected 'every' or 'final', got '" + s + "'");
}

}  // namespace detail

/// Apply one `key = value` setting. Shared by the file parser and CLI overrides.
inline void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& v) {
  using namespace detail;
  const std::string ctx = where(section, key);
  if (v.empty()) throw ConfigError(ctx + ": missing value");
  if (section == "case") {
    if (key == "name") {
      cfg.case_name = v;
    } else if (key == "order") {
      cfg.order = parse_int(v, ctx);
    } else if (key == "nelems") {
      cfg.nelems = parse_int(v, ctx);
    } else if (key == "t_final") {
      cfg.t_final = parse_double(v, ctx);
    } else if (key == "nelems_list") {
      cfg.nelems_list.clear();
      std::string list = v;
      for (auto& ch : list)
        if (ch == ',') ch = ' ';
      std::istringstream is(list);
      std::string tok;
      while (is >> tok) cfg.nelems_list.push_back(parse_int(tok, ctx));
    } else {
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    }
  } else if (section == "limiter") {
    if (key == "mode")
      cfg.mode = parse_mode(v, ctx);
    else if (key == "n_iters")
      cfg.n_iters = parse_int(v, ctx);
    else
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  } else if (section == "solver") {
    if (key == "cfl")
      cfg.cfl = parse_double(v, ctx);
    else if (key == "stabilizer")
      cfg.stabilizer = parse_bool(v, ctx);
    else if (key == "eps_d")
      cfg.eps_d = parse_double(v, ctx);
    else
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  } else if (section == "output") {
    if (key == "dir")
      cfg.out_dir = v;
    else if (key == "oversample")
      cfg.oversample = parse_int(v, ctx);
    else if (key == "audit")
      cfg.audit = parse_cadence(v, ctx);
    else if (key == "vtk")
      cfg.vtk = parse_bool(v, ctx);
    else
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  } else {
    throw ConfigError("unknown section [" + section + "] (key '" + key + "')");
  }
}

/// Checks ranges; throws ConfigError with a one-line reason.
inline void validate(const RunConfig& cfg) {
  if (cfg.case_name.empty()) throw ConfigError("case missing");
  get_case(cfg.case_name);
  if (cfg.order && (*cfg.order < 1 || *cfg.order > kMaxOrder))
    throw ConfigError("[case] order must be in 1.." + std::to_string(kMaxOrder));
  if (cfg.nelems && *cfg.nelems < 2) throw ConfigError("[case] nelems must be >= 2");
  for (int n : cfg.nelems_list)
    if (n < 2) throw ConfigError("[case] nelems_list entries must be >= 2");
  if (cfg.t_final && !(*cfg.t_final > 0.0)) throw ConfigError("[case] t_final must be positive");
  if (cfg.n_iters < 0) throw ConfigError("[limiter] n_iters must be >= 0");
  if (cfg.cfl && !(*cfg.cfl > 0.0)) throw ConfigError("[solver] cfl must be positive");
  if (!(cfg.eps_d > 0.0)) throw ConfigError("[solver] eps_d must be positive");
  if (cfg.oversample < 2) throw ConfigError("[output] oversample must be >= 2");
  if (cfg.out_dir.empty()) throw ConfigError("[output] dir must not be empty");
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses INI-style text: [case], [limiter], [solver], [output] sections of
/// `key = value` lines, `#` comments, later duplicates win. Does not validate.
inline RunConfig parse_config_unchecked(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' appears outside any section");
    apply_setting(cfg, section, key, value);
  }
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg = parse_config_unchecked(text);
  validate(cfg);
  return cfg;
}

}  // namespace cbp
