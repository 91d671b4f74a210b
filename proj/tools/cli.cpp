// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cvqkd/errors.hpp"
#include "cvqkd/fockspace.hpp"
#include "cvqkd/montecarlo.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/record.hpp"
#include "cvqkd/secparams.hpp"
#include "cvqkd/specfun.hpp"
#include "cvqkd/symmetry.hpp"
#include "cvqkd/tailbounds.hpp"

namespace cvqkd::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { integer, real, text };

struct Param {
  const char* key;
  Kind kind;
  const char* help;
};

constexpr Param kParams[] = {
    {"n", Kind::integer, "number of kept modes"},
    {"k", Kind::integer, "number of tested modes (or chi-squared degrees of freedom)"},
    {"lambda", Kind::real, "mean photon number per mode of Alice's thermal state"},
    {"y_test", Kind::real, "energy-test threshold"},
    {"eps_test", Kind::real, "energy-test failure probability"},
    {"eps_a", Kind::real, "failure probability of Alice's Fock cutoff"},
    {"eps_share", Kind::real, "failure probability given to Bob's projection"},
    {"c", Kind::real, "collective-attack constant c in 2^{-c delta^2 n}"},
    {"delta", Kind::real, "collective-attack delta, or the failure level of a verifier"},
    {"detection", Kind::text, "heterodyne | homodyne"},
    {"g_variant", Kind::text, "real_sphere | complex_sphere"},
    {"y_k_observed", Kind::real, "observed homodyne test statistic Y_k"},
    {"transmittance", Kind::real, "channel transmittance tau"},
    {"excess_noise", Kind::real, "channel excess noise xi (shot-noise units)"},
    {"test_margin", Kind::real, "Y_test = margin * E[Y_k] when y_test is absent"},
    {"rotation", Kind::text, "automatic | explicit_matrix | implicit_sphere"},
    {"d0", Kind::real, "shell energy per mode"},
    {"kmax", Kind::integer, "largest photon number checked"},
    {"p", Kind::integer, "total photon number"},
    {"m", Kind::integer, "per-mode photon threshold"},
    {"a", Kind::real, "integration threshold"},
    {"x", Kind::real, "tail-bound exponent"},
    {"eps", Kind::real, "target failure probability of the bad event"},
    {"trials", Kind::integer, "Monte Carlo trials"},
    {"seed", Kind::integer, "master seed (falls back to CVQKD_SEED)"},
};

const Param& find_param(const std::string& key) {
  for (const Param& p : kParams) {
    if (key == p.key) return p;
  }
  throw UsageError("unknown parameter '" + key + "'");
}

std::string kebab(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (text.empty() || text[0] == '-' || text[0] == '+') throw std::invalid_argument("sign");
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    throw UsageError("--" + kebab(key) + " expects a nonnegative integer, got '" + text + "'");
  }
  if (used != text.size()) {
    throw UsageError("--" + kebab(key) + " expects a nonnegative integer, got '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("--" + kebab(key) + " expects a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw UsageError("--" + kebab(key) + " expects a finite number, got '" + text + "'");
  }
  return v;
}

json flag_value(const Param& p, const std::string& text) {
  switch (p.kind) {
    case Kind::integer:
      return parse_unsigned(p.key, text);
    case Kind::real:
      return parse_real(p.key, text);
    case Kind::text:
      return text;
  }
  return text;
}

void check_config_value(const Param& p, const json& v) {
  const bool ok = (p.kind == Kind::integer && v.is_number_unsigned()) ||
                  (p.kind == Kind::real && v.is_number()) ||
                  (p.kind == Kind::text && v.is_string());
  if (!ok) {
    throw UsageError(std::string("config: '") + p.key + "' has the wrong type (expected " +
                     (p.kind == Kind::integer ? "nonnegative integer"
                      : p.kind == Kind::real  ? "number"
                                              : "string") +
                     ")");
  }
}

// Options shared by every subcommand plus the parameter flags it accepts.
struct CommandOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  unsigned workers = mc::default_workers();
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> flags;
};

void add_common(CLI::App* cmd, CommandOptions& o, const std::vector<std::string>& keys) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
  cmd->add_option("--out", o.out_path, "write the report to this path instead of stdout");
  cmd->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--workers", o.workers, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 4096u));
  for (const std::string& key : keys) {
    const Param& p = find_param(key);
    o.flags[key] = cmd->add_option("--" + kebab(key), o.raw[key], p.help);
  }
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed config '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config '" + path + "' must be a JSON object");
  for (const auto& [key, value] : cfg.items()) check_config_value(find_param(key), value);
  return cfg;
}

// Defaults, then config file, then flags. Only `keys` are kept; config
// entries for other known parameters are ignored so one file can serve
// several subcommands.
json resolve(const CommandOptions& o, const std::vector<std::string>& keys, json defaults) {
  const json file = load_config(o.config_path);
  json resolved = json::object();
  for (const std::string& key : keys) {
    const Param& p = find_param(key);
    if (o.flags.at(key)->count() > 0) {
      resolved[key] = flag_value(p, o.raw.at(key));
    } else if (file.contains(key)) {
      resolved[key] = file.at(key);
    } else if (defaults.contains(key)) {
      resolved[key] = defaults.at(key);
    }
    // Echo reals as reals whether they arrived as 1 or 1.0.
    if (p.kind == Kind::real && resolved.contains(key)) {
      resolved[key] = resolved[key].get<double>();
    }
  }
  if (!resolved.contains("seed") &&
      std::find(keys.begin(), keys.end(), "seed") != keys.end()) {
    if (const char* env = std::getenv("CVQKD_SEED"); env != nullptr && *env != '\0') {
      resolved["seed"] = parse_unsigned("seed", env);
    } else {
      resolved["seed"] = 0;
    }
  }
  return resolved;
}

void require(const json& cfg, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (!cfg.contains(key)) throw UsageError(std::string("missing required parameter --") +
                                             kebab(key));
  }
}

std::uint64_t get_u64(const json& cfg, const char* key) { return cfg.at(key).get<std::uint64_t>(); }
double get_real(const json& cfg, const char* key) { return cfg.at(key).get<double>(); }
std::optional<double> get_opt_real(const json& cfg, const char* key) {
  if (!cfg.contains(key)) return std::nullopt;
  return cfg.at(key).get<double>();
}

std::uint32_t get_u32(const json& cfg, const char* key) {
  const std::uint64_t v = get_u64(cfg, key);
  if (v > 0xffffffffULL) throw UsageError(std::string("--") + kebab(key) + " is too large");
  return static_cast<std::uint32_t>(v);
}

Detection get_detection(const json& cfg) {
  try {
    return detection_from_string(cfg.at("detection").get<std::string>());
  } catch (const std::exception&) {
    throw UsageError("--detection must be heterodyne or homodyne");
  }
}

tail::SphereVariant get_variant(const json& cfg) {
  try {
    return tail::sphere_variant_from_string(cfg.at("g_variant").get<std::string>());
  } catch (const std::exception&) {
    throw UsageError("--g-variant must be real_sphere or complex_sphere");
  }
}

protocol::RotationStrategy get_rotation(const json& cfg) {
  const std::string s = cfg.at("rotation").get<std::string>();
  if (s == "automatic") return protocol::RotationStrategy::automatic;
  if (s == "explicit_matrix") return protocol::RotationStrategy::explicit_matrix;
  if (s == "implicit_sphere") return protocol::RotationStrategy::implicit_sphere;
  throw UsageError("--rotation must be automatic, explicit_matrix or implicit_sphere");
}

json wilson_json(const mc::WilsonInterval& w) {
  return {{"rate", w.rate},     {"center", w.center},          {"lower", w.lower},
          {"upper", w.upper},   {"half_width", w.half_width}};
}

struct Report {
  json config;
  std::uint64_t seed = 0;
  json results;
  // Rows for --format csv: either a table (array of flat objects) or absent,
  // in which case the scalar results are written as key,value lines.
  json rows;
  // Column order for the table; the keys of the first row when empty.
  std::vector<std::string> columns;
  bool ok = true;
};

std::string csv_cell(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

std::string render_csv(const Report& r) {
  std::ostringstream ss;
  if (r.rows.is_array() && !r.rows.empty()) {
    std::vector<std::string> header = r.columns;
    if (header.empty()) {
      for (const auto& [key, value] : r.rows.front().items()) header.push_back(key);
    }
    for (std::size_t i = 0; i < header.size(); ++i) ss << (i ? "," : "") << header[i];
    ss << "\n";
    for (const json& row : r.rows) {
      for (std::size_t i = 0; i < header.size(); ++i) {
        ss << (i ? "," : "") << (row.contains(header[i]) ? csv_cell(row.at(header[i])) : "");
      }
      ss << "\n";
    }
    return ss.str();
  }
  ss << "key,value\n";
  for (const auto& [key, value] : r.results.items()) {
    if (value.is_structured()) continue;
    ss << key << "," << csv_cell(value) << "\n";
  }
  return ss.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
  if (!f.flush()) throw UsageError("cannot write '" + path + "'");
}

void emit(const std::string& command, const CommandOptions& o, const Report& r,
          std::ostream& out) {
  if (o.format == "csv") {
    write_text(o.out_path, render_csv(r), out);
    return;
  }
  const json manifest = {{"command", command},
                         {"config_echo", r.config},
                         {"seed", r.seed},
                         {"tool_version", kToolVersion},
                         {"results", r.results}};
  write_text(o.out_path, manifest.dump(2) + "\n", out);
}

// ---------------------------------------------------------------- bounds

const std::vector<std::string> kBoundsKeys = {
    "n", "k", "lambda", "y_test", "eps_test", "eps_a", "eps_share", "c", "delta", "detection",
    "g_variant", "y_k_observed", "seed"};

std::string fmt_real(double x) {
  std::ostringstream ss;
  ss.precision(10);
  ss << x;
  return ss.str();
}

Report cmd_bounds(const CommandOptions& o) {
  Report r;
  r.config = resolve(o, kBoundsKeys,
                     {{"detection", "heterodyne"}, {"g_variant", "real_sphere"}});
  require(r.config, {"n", "k", "lambda", "y_test", "eps_test", "eps_a", "c", "delta"});
  r.seed = get_u64(r.config, "seed");

  secparams::SecurityInputs in;
  in.n = get_u64(r.config, "n");
  in.k = get_u64(r.config, "k");
  in.lambda = get_real(r.config, "lambda");
  in.y_test = get_real(r.config, "y_test");
  in.eps_test = get_real(r.config, "eps_test");
  in.eps_a = get_real(r.config, "eps_a");
  in.eps_share = get_opt_real(r.config, "eps_share");
  in.c = get_opt_real(r.config, "c");
  in.delta = get_opt_real(r.config, "delta");
  in.detection = get_detection(r.config);
  in.g_variant = get_variant(r.config);
  in.y_k_observed = get_opt_real(r.config, "y_k_observed");

  const secparams::SecurityBounds b = secparams::compute_bounds(in);
  json res = {{"d_a", b.d_a},
              {"d_0", b.d_0},
              {"d_b", b.d_b},
              {"d_a_dim", b.d_a_dim},
              {"d_b_dim", b.d_b_dim},
              {"g", b.g},
              {"beta", b.beta},
              {"eps_share", b.eps_share},
              {"postselection_exponent", b.postselection_exponent},
              {"collective_exponent", b.collective_exponent},
              {"exponent", b.collective_exponent + b.postselection_exponent},
              {"eps_total", b.eps_total},
              {"feasible", b.feasible},
              {"minimal_feasible_n", nullptr},
              {"largest_feasible_n_below", nullptr},
              {"notes", b.notes},
              {"formula", secparams::kPostselectionFormula}};
  if (b.minimal_feasible_n) res["minimal_feasible_n"] = *b.minimal_feasible_n;
  if (b.largest_feasible_n_below) res["largest_feasible_n_below"] = *b.largest_feasible_n_below;
  if (in.detection == Detection::homodyne) res["beta_root"] = secparams::beta_root();
  if (b.feasible) {
    res["instantiated"] = "2^(-" + fmt_real(*in.c) + " * " + fmt_real(*in.delta) + "^2 * " +
                          std::to_string(in.n) + " + ((" + std::to_string(b.d_a_dim) + " * " +
                          std::to_string(b.d_b_dim) + ")^2 - 1) * log2(" +
                          std::to_string(in.n) + " + 1)) + 2 * " +
                          fmt_real(std::max(in.eps_test, in.eps_a + b.eps_share));
  } else {
    res["instantiated"] = nullptr;
  }
  r.results = std::move(res);
  r.ok = b.feasible;
  return r;
}

// ---------------------------------------------------------------- verify

const std::vector<std::string> kVerifyKeys = {"n", "k", "delta", "g_variant", "d0", "kmax",
                                              "p", "m", "a", "x", "lambda", "trials", "seed"};
constexpr std::uint64_t kStreamLm = 0x4c4d54ULL;
constexpr std::uint64_t kStreamChernoff = 0x43484552ULL;
constexpr std::uint64_t kBatches = 256;

Report verify_lemma1(const CommandOptions& o) {
  Report r;
  r.config = resolve(o, {"n", "k", "delta", "g_variant", "trials", "seed"},
                     {{"trials", 100000}, {"g_variant", "real_sphere"}});
  require(r.config, {"n", "k", "delta"});
  r.seed = get_u64(r.config, "seed");
  const auto res = symmetry::mc_lemma1(get_u64(r.config, "n"), get_u64(r.config, "k"),
                                       get_real(r.config, "delta"), get_u64(r.config, "trials"),
                                       get_variant(r.config), r.seed, o.workers);
  r.ok = res.within_bound;
  r.results = {{"suite", "lemma1"},
               {"g", res.g},
               {"trials", res.trials},
               {"events", res.events},
               {"rate", res.interval.rate},
               {"wilson", wilson_json(res.interval)},
               {"limit", res.delta + 3.0 * res.interval.half_width},
               {"margin", res.margin},
               {"pass", r.ok}};
  r.rows = json::array({{{"n", res.n},
                         {"k", res.k},
                         {"delta", res.delta},
                         {"g", res.g},
                         {"rate", res.interval.rate},
                         {"half_width", res.interval.half_width},
                         {"margin", res.margin},
                         {"pass", r.ok}}});
  return r;
}

Report verify_opineq(const CommandOptions& o) {
  Report r;
  r.config = resolve(o, {"n", "d0", "kmax", "seed"}, json::object());
  require(r.config, {"n", "d0", "kmax"});
  r.seed = get_u64(r.config, "seed");
  const auto rep = fock::verify_operator_inequality(
      get_u64(r.config, "n"), get_real(r.config, "d0"), get_u64(r.config, "kmax"));
  r.ok = rep.holds();
  r.results = {{"suite", "opineq"},
               {"k_min", rep.k_min},
               {"k_max", rep.k_max},
               {"min_margin", rep.min_margin},
               {"argmin_k", rep.argmin_k},
               {"monotone", rep.monotone},
               {"first_violation", nullptr},
               {"pass", r.ok}};
  if (rep.first_violation) r.results["first_violation"] = *rep.first_violation;
  return r;
}

Report verify_maxphoton(const CommandOptions& o) {
  Report r;
  r.config = resolve(o, {"n", "p", "m", "seed"}, json::object());
  require(r.config, {"n", "p", "m"});
  r.seed = get_u64(r.config, "seed");
  const std::uint32_t n = get_u32(r.config, "n");
  const std::uint64_t p = get_u64(r.config, "p");
  const std::uint64_t m = get_u64(r.config, "m");
  const double exact = fock::exact_max_tail(n, p, m);
  const double bound = tail::max_photon_tail(n, p, m).bound;
  // The bound is evaluated through logarithms; allow its last bits to land
  // below an exactly equal enumeration.
  r.ok = exact <= bound * (1.0 + 1e-12);
  r.results = {{"suite", "maxphoton"}, {"exact", exact},       {"bound", bound},
               {"margin", bound - exact}, {"pass", r.ok}};
  return r;
}

Report verify_integrals(const CommandOptions& o) {
  Report r;
  r.config = resolve(o, {"n", "k", "a", "trials", "seed"}, {{"trials", 1000000}});
  r.seed = get_u64(r.config, "seed");
  const std::uint64_t samples = get_u64(r.config, "trials");
  const bool single = r.config.contains("n") || r.config.contains("k") || r.config.contains("a");
  std::vector<std::uint64_t> ns{1, 2, 3, 4};
  std::vector<std::uint64_t> ks{0, 1, 2, 3, 4, 5};
  std::vector<double> as{0.5, 1.0, 2.0, 5.0};
  if (single) {
    require(r.config, {"n", "k", "a"});
    ns = {get_u64(r.config, "n")};
    ks = {get_u64(r.config, "k")};
    as = {get_real(r.config, "a")};
  }

  r.rows = json::array();
  double worst_z = 0.0;
  std::uint64_t index = 0;
  bool j_ok = true;
  for (std::uint64_t n : ns) {
    for (std::uint64_t k : ks) {
      for (double a : as) {
        const auto j = fock::closed_form_J(n, k, a);
        const auto est = fock::mc_J_integral(n, k, a, samples,
                                             mc::derive_seed(r.seed, 0x4a4752ULL, index++),
                                             o.workers);
        const double z = est.std_error > 0.0 ? (est.mean - j.gamma_identity) / est.std_error
                                             : (est.mean == j.gamma_identity ? 0.0 : INFINITY);
        const bool pass = std::abs(z) <= 3.0;
        j_ok = j_ok && pass;
        worst_z = std::max(worst_z, std::abs(z));
        r.rows.push_back({{"n", n},
                          {"k", k},
                          {"a", a},
                          {"gamma_identity", j.gamma_identity},
                          {"printed_form", j.printed_form},
                          {"mc_mean", est.mean},
                          {"mc_std_error", est.std_error},
                          {"z", z},
                          {"pass", pass}});
      }
    }
  }

  // I_n(a) against Q(n, a), and the k = 0 reduction J_n(0, a) = I_n(a).
  std::vector<std::uint64_t> i_ns;
  std::vector<double> i_as;
  if (single) {
    i_ns = ns;
    i_as = as;
  } else {
    for (std::uint64_t n = 1; n <= 200; ++n) i_ns.push_back(n);
    i_as = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 350.0, 500.0};
  }
  double max_i_err = 0.0;
  double max_reduction_err = 0.0;
  double max_printed_gap = 0.0;
  for (std::uint64_t n : i_ns) {
    for (double a : i_as) {
      const double i_val = fock::closed_form_I(n, a);
      const double q = specfun::reg_upper_gamma(static_cast<double>(n), a);
      const auto j0 = fock::closed_form_J(n, 0, a);
      max_i_err = std::max(max_i_err, std::abs(i_val - q));
      max_reduction_err = std::max(max_reduction_err, std::abs(j0.gamma_identity - i_val));
      max_printed_gap = std::max(max_printed_gap, std::abs(j0.printed_form - i_val));
    }
  }
  const bool i_ok = max_i_err <= 1e-10;
  const bool reduction_ok = max_reduction_err <= 1e-10;
  r.ok = j_ok && i_ok && reduction_ok;
  r.results = {{"suite", "integrals"},
               {"samples_per_point", samples},
               {"j_points", r.rows.size()},
               {"j_max_abs_z", worst_z},
               {"j_pass", j_ok},
               {"i_max_abs_error", max_i_err},
               {"i_pass", i_ok},
               {"k0_reduction_max_abs_error", max_reduction_err},
               {"k0_reduction_pass", reduction_ok},
               {"printed_form_max_gap_at_k0", max_printed_gap},
               {"points", r.rows},
               {"pass", r.ok}};
  return r;
}

struct TailCounts {
  std::vector<std::uint64_t> below;
  std::vector<std::uint64_t> above;
};

Report verify_lm(const CommandOptions& o) {
  Report r;
  r.config = resolve(o, {"k", "x", "trials", "seed"}, {{"k", 100}, {"trials", 100000}});
  r.seed = get_u64(r.config, "seed");
  const std::uint64_t k = get_u64(r.config, "k");
  const std::uint64_t trials = get_u64(r.config, "trials");
  if (trials == 0) throw DomainError("--trials must be positive");
  std::vector<double> xs{0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0};
  if (r.config.contains("x")) xs = {get_real(r.config, "x")};
  std::vector<tail::TailBound> lower;
  std::vector<tail::TailBound> upper;
  for (double x : xs) {
    lower.push_back(tail::lm_lower_tail(k, x));
    upper.push_back(tail::lm_upper_tail(k, x));
  }
  const std::uint64_t batches = std::min(kBatches, trials);
  const auto parts = mc::map_trials<TailCounts>(
      batches, r.seed, kStreamLm, o.workers, [&](mc::Rng& rng, std::uint64_t b) {
        TailCounts c{std::vector<std::uint64_t>(xs.size(), 0),
                     std::vector<std::uint64_t>(xs.size(), 0)};
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::uint64_t s = b * trials / batches; s < (b + 1) * trials / batches; ++s) {
          double chi2 = 0.0;
          for (std::uint64_t i = 0; i < k; ++i) {
            const double g = normal(rng);
            chi2 += g * g;
          }
          const double ratio = chi2 / static_cast<double>(k);
          for (std::size_t i = 0; i < xs.size(); ++i) {
            if (ratio <= lower[i].threshold) ++c.below[i];
            if (ratio >= upper[i].threshold) ++c.above[i];
          }
        }
        return c;
      });
  r.rows = json::array();
  r.ok = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::uint64_t below = 0;
    std::uint64_t above = 0;
    for (const auto& c : parts) {
      below += c.below[i];
      above += c.above[i];
    }
    const double lo = static_cast<double>(below) / static_cast<double>(trials);
    const double hi = static_cast<double>(above) / static_cast<double>(trials);
    const bool pass = lo <= lower[i].bound && hi <= upper[i].bound;
    r.ok = r.ok && pass;
    r.rows.push_back({{"x", xs[i]},
                      {"lower_threshold", lower[i].threshold},
                      {"lower_empirical", lo},
                      {"upper_threshold", upper[i].threshold},
                      {"upper_empirical", hi},
                      {"bound", lower[i].bound},
                      {"pass", pass}});
  }
  r.results = {{"suite", "lm"}, {"k", k}, {"trials", trials}, {"points", r.rows},
               {"pass", r.ok}};
  return r;
}

// Largest integer j with j <= t, treating t within 1e-9 of an integer as
// that integer.
std::uint64_t floor_count(double t) {
  const double nearest = std::round(t);
  if (std::abs(t - nearest) <= 1e-9) return static_cast<std::uint64_t>(std::max(0.0, nearest));
  return static_cast<std::uint64_t>(std::max(0.0, std::floor(t)));
}

Report verify_chernoff(const CommandOptions& o) {
  Report r;
  r.config = resolve(o, {"lambda", "delta", "trials", "seed"},
                     {{"lambda", 10.0}, {"trials", 100000}});
  r.seed = get_u64(r.config, "seed");
  const double lambda = get_real(r.config, "lambda");
  const std::uint64_t trials = get_u64(r.config, "trials");
  if (trials == 0) throw DomainError("--trials must be positive");
  std::vector<double> deltas{0.05, 0.15, 0.25, 0.35, 0.45, 0.5, 0.6, 0.7, 0.8, 0.9};
  if (r.config.contains("delta")) deltas = {get_real(r.config, "delta")};
  std::vector<tail::TailBound> bounds;
  std::vector<std::uint64_t> cut;
  for (double d : deltas) {
    bounds.push_back(tail::chernoff_poisson_lower(lambda, d));
    cut.push_back(floor_count(bounds.back().threshold));
  }
  const std::uint64_t batches = std::min(kBatches, trials);
  const auto parts = mc::map_trials<std::vector<std::uint64_t>>(
      batches, r.seed, kStreamChernoff, o.workers, [&](mc::Rng& rng, std::uint64_t b) {
        std::vector<std::uint64_t> hits(deltas.size(), 0);
        std::poisson_distribution<std::uint64_t> poisson(lambda);
        for (std::uint64_t s = b * trials / batches; s < (b + 1) * trials / batches; ++s) {
          const std::uint64_t x = poisson(rng);
          for (std::size_t i = 0; i < deltas.size(); ++i) {
            if (x <= cut[i]) ++hits[i];
          }
        }
        return hits;
      });
  r.rows = json::array();
  r.ok = true;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    std::uint64_t hits = 0;
    for (const auto& h : parts) hits += h[i];
    const double exact = specfun::poisson_cdf(cut[i], lambda);
    const double empirical = static_cast<double>(hits) / static_cast<double>(trials);
    const bool pass = exact <= bounds[i].bound && empirical <= bounds[i].bound;
    r.ok = r.ok && pass;
    r.rows.push_back({{"delta", deltas[i]},
                      {"threshold", bounds[i].threshold},
                      {"exact", exact},
                      {"empirical", empirical},
                      {"bound", bounds[i].bound},
                      {"pass", pass}});
  }
  r.results = {{"suite", "chernoff"}, {"lambda", lambda}, {"trials", trials},
               {"points", r.rows},    {"pass", r.ok}};
  return r;
}

// --------------------------------------------------------------- simulate

const std::vector<std::string> kSimulateKeys = {
    "n",          "k",        "lambda", "detection", "transmittance", "excess_noise", "y_test",
    "test_margin", "rotation", "trials", "eps",       "g_variant",     "seed"};

struct SimulateExtras {
  std::string runs_out;
  std::string record_out;
};

Report cmd_simulate(const CommandOptions& o, const SimulateExtras& extra) {
  Report r;
  r.config = resolve(o, kSimulateKeys,
                     {{"n", 200},
                      {"k", 10000},
                      {"lambda", 1.0},
                      {"detection", "heterodyne"},
                      {"transmittance", 0.5},
                      {"excess_noise", 0.05},
                      {"test_margin", protocol::kDefaultTestMargin},
                      {"rotation", "automatic"},
                      {"trials", 1000},
                      {"g_variant", "real_sphere"}});
  r.seed = get_u64(r.config, "seed");

  protocol::ProtocolConfig cfg;
  cfg.n = get_u64(r.config, "n");
  cfg.k = get_u64(r.config, "k");
  cfg.lambda = get_real(r.config, "lambda");
  cfg.detection = get_detection(r.config);
  cfg.channel.transmittance = get_real(r.config, "transmittance");
  cfg.channel.excess_noise = get_real(r.config, "excess_noise");
  cfg.rotation = get_rotation(r.config);
  cfg.seed = r.seed;
  if (!r.config.contains("y_test")) {
    r.config["y_test"] = get_real(r.config, "test_margin") * protocol::expected_mode_energy(cfg);
  }
  cfg.y_test = get_real(r.config, "y_test");
  const std::uint64_t trials = get_u64(r.config, "trials");
  if (trials == 0) throw DomainError("--trials must be positive");

  const auto rep = protocol::estimate_abort_rate(cfg, trials, o.workers);
  r.results = {{"trials", rep.trials},
               {"aborts", rep.aborts},
               {"abort_rate", rep.interval.rate},
               {"wilson", wilson_json(rep.interval)},
               {"expected_y_k", rep.expected_y_k},
               {"mean_y_k", rep.mean_y_k},
               {"y_test", cfg.y_test},
               {"shot_noise_convention", protocol::kShotNoiseConvention},
               {"bad_event", nullptr}};
  if (r.config.contains("eps")) {
    if (cfg.detection != Detection::heterodyne) {
      throw UsageError("--eps (bad-event surrogate) requires heterodyne detection");
    }
    const auto bad = secparams::estimate_bad_event_frequency(
        cfg, get_real(r.config, "eps"), trials, get_variant(r.config), o.workers);
    r.results["bad_event"] = {{"eps", bad.eps},
                              {"d_0", bad.d_0},
                              {"d_b", bad.d_b},
                              {"cutoff", bad.cutoff},
                              {"passes", bad.passes},
                              {"shell_exceedances", bad.shell_exceedances},
                              {"photon_tail_mass", bad.photon_tail_mass},
                              {"frequency", bad.frequency},
                              {"within_eps", bad.within_eps()}};
  }
  r.rows = json::array();
  for (std::size_t i = 0; i < rep.runs.size(); ++i) {
    r.rows.push_back({{"trial", i},
                      {"passed", rep.runs[i].passed},
                      {"y_k", rep.runs[i].y_k},
                      {"z_n", rep.runs[i].z_n}});
  }
  if (!extra.runs_out.empty()) {
    Report table;
    table.rows = r.rows;
    table.columns = {"trial", "passed", "y_k", "z_n"};
    write_text(extra.runs_out, render_csv(table), std::cout);
  }
  if (!extra.record_out.empty()) {
    mc::Rng rng = mc::make_rng(cfg.seed, protocol::kFrontEndStream, 0);
    const auto fe = protocol::run_front_end(cfg, rng);
    std::ostringstream ss;
    write_record_csv(ss, fe.symmetrized);
    write_text(extra.record_out, ss.str(), std::cout);
  }
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-size security calculator, verifiers and front-end simulator", "cvqkd-cli"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommandOptions bounds_opts;
  CLI::App* bounds = app.add_subcommand("bounds", "Fock cutoffs and the general-attack epsilon");
  add_common(bounds, bounds_opts, kBoundsKeys);

  CommandOptions verify_opts;
  std::string suite;
  CLI::App* verify = app.add_subcommand("verify", "Run one verification suite");
  verify->add_option("suite", suite, "lemma1 | opineq | maxphoton | integrals | lm | chernoff")
      ->required()
      ->check(CLI::IsMember({"lemma1", "opineq", "maxphoton", "integrals", "lm", "chernoff"}));
  add_common(verify, verify_opts, kVerifyKeys);

  CommandOptions sim_opts;
  SimulateExtras extras;
  CLI::App* simulate = app.add_subcommand("simulate", "Front-end abort-rate estimate");
  add_common(simulate, sim_opts, kSimulateKeys);
  simulate->add_option("--runs-out", extras.runs_out, "per-run CSV (trial,passed,y_k,z_n)");
  simulate->add_option("--record-out", extras.record_out,
                       "symmetrized record of trial 0 as CSV");

  std::vector<const char*> argv{"cvqkd-cli"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Report report;
    std::string command;
    const CommandOptions* opts = nullptr;
    if (bounds->parsed()) {
      command = "bounds";
      opts = &bounds_opts;
      report = cmd_bounds(bounds_opts);
    } else if (verify->parsed()) {
      command = "verify " + suite;
      opts = &verify_opts;
      if (suite == "lemma1") report = verify_lemma1(verify_opts);
      if (suite == "opineq") report = verify_opineq(verify_opts);
      if (suite == "maxphoton") report = verify_maxphoton(verify_opts);
      if (suite == "integrals") report = verify_integrals(verify_opts);
      if (suite == "lm") report = verify_lm(verify_opts);
      if (suite == "chernoff") report = verify_chernoff(verify_opts);
    } else {
      command = "simulate";
      opts = &sim_opts;
      report = cmd_simulate(sim_opts, extras);
    }
    emit(command, *opts, report, out);
    if (!report.ok) {
      err << command << ": " << (verify->parsed() ? "verification failed" : "infeasible")
          << "\n";
      if (report.results.contains("notes")) {
        for (const auto& note : report.results.at("notes")) {
          err << "  " << note.get<std::string>() << "\n";
        }
      }
      return kExitFailed;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const SizeError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitFailed;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace cvqkd::cli
