#include "rsc/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rsc/asymptotics.hpp"
#include "rsc/barriers.hpp"
#include "rsc/cartesian.hpp"
#include "rsc/error.hpp"
#include "rsc/radial_ode.hpp"

namespace rsc {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr unsigned kBarrierCheckSeed = 7;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_fail(const std::string& msg) { throw Error(Errc::config_error, msg); }

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_fail(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_fail("unknown key '" + key + "' in " + where);
    }
  }
}

double number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) config_fail("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_fail("'" + key + "' must be finite");
  return x;
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) config_fail("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) config_fail("'" + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const std::vector<std::string>& family_keys(const std::string& family) {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"constant", {"family", "value"}},
      {"power-deficit", {"family", "c", "p"}},
      {"power-excess", {"family", "c", "p"}},
      {"bertrand", {"family", "c", "q"}},
      {"directional", {"family", "a", "p"}},
      {"table", {"family", "path", "flat_near_zero"}},
  };
  auto it = keys.find(family);
  if (it == keys.end()) config_fail("unknown prescription family '" + family + "'");
  return it->second;
}

PrescriptionSpec parse_prescription(const json& j, const fs::path& base_dir) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    config_fail("'prescription' must be an object with a string 'family'");
  }
  PrescriptionSpec spec;
  spec.family = j.at("family").get<std::string>();
  check_keys(j, family_keys(spec.family), "prescription");
  spec.c = number(j, "c", spec.c);
  spec.p = number(j, "p", spec.p);
  spec.q = number(j, "q", spec.q);
  spec.value = number(j, "value", spec.value);
  spec.a = number(j, "a", spec.a);
  if (spec.family == "table") {
    if (!j.contains("path") || !j.at("path").is_string()) config_fail("table needs a string 'path'");
    spec.table_path = j.at("path").get<std::string>();
    if (spec.table_path.is_relative()) spec.table_path = base_dir / spec.table_path;
    if (j.contains("flat_near_zero")) {
      if (!j.at("flat_near_zero").is_boolean()) config_fail("'flat_near_zero' must be boolean");
      spec.flat_near_zero = j.at("flat_near_zero").get<bool>();
    }
  }
  return spec;
}

RadialPrescription load_table(const PrescriptionSpec& spec, int n) {
  std::ifstream in(spec.table_path);
  if (!in) config_fail("cannot open table " + spec.table_path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("r,h", 0) != 0) config_fail("table header must be 'r,h'");
  std::vector<double> r;
  std::vector<double> h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a;
    std::string b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) config_fail("bad table row: " + line);
    try {
      r.push_back(std::stod(a));
      h.push_back(std::stod(b));
    } catch (const std::exception&) {
      config_fail("bad table row: " + line);
    }
  }
  try {
    return RadialPrescription::tabulated(n, r, h, "table(" + spec.table_path.filename().string() + ")",
                                         spec.flat_near_zero);
  } catch (const Error& e) {
    config_fail(e.what());
  }
}

std::string csv_cell(double x) { return std::isnan(x) ? std::string() : format_double(x); }

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config_error, "cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void write_json(const fs::path& path, const ojson& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config_error, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ojson number_or_null(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

ojson config_json(const RunConfig& c) {
  ojson p;
  p["family"] = c.prescription.family;
  const auto& keys = family_keys(c.prescription.family);
  auto has = [&](const char* k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  if (has("c")) p["c"] = c.prescription.c;
  if (has("p")) p["p"] = c.prescription.p;
  if (has("q")) p["q"] = c.prescription.q;
  if (has("value")) p["value"] = c.prescription.value;
  if (has("a")) p["a"] = c.prescription.a;
  if (has("path")) {
    p["path"] = c.prescription.table_path.string();
    p["flat_near_zero"] = c.prescription.flat_near_zero;
  }
  ojson j;
  j["command"] = command_name(c.command);
  j["n"] = c.n;
  j["prescription"] = p;
  j["r_max"] = c.r_max;
  j["tol"] = c.tol;
  j["phi0"] = c.phi0;
  j["eps0"] = c.eps0;
  j["delta"] = c.delta;
  j["r_probe"] = c.r_probe;
  j["threshold"] = c.threshold;
  j["verify"] = {{"box", {c.box[0], c.box[1]}}, {"spacings", c.spacings}};
  ojson sweep = ojson::object();
  for (const auto& [k, v] : c.sweep) sweep[k] = v;
  j["sweep"] = sweep;
  j["fault"] = c.fault;
  return j;
}

struct Verdicts {
  ojson table = ojson::object();
  std::vector<std::string> violated;

  void record(const std::string& name, bool ok) {
    table[name] = ok;
    if (!ok) violated.push_back(name);
  }
};

// h <= 1 (-1), h >= 1 (+1) or mixed (0) on the solution nodes.
int h_side(const RadialSolution& sol) {
  bool below = true;
  bool above = true;
  for (double r : sol.r()) {
    const double d = sol.h_at(r) - 1.0;
    below = below && d <= 0.0;
    above = above && d >= 0.0;
  }
  if (below && above) return 2;
  return below ? -1 : (above ? 1 : 0);
}

std::vector<double> safe_f2_residual(const RadialSolution& sol) {
  std::vector<double> out(sol.size());
  for (std::size_t k = 0; k < sol.size(); ++k) {
    try {
      out[k] = std::abs(f2_value(sol, k) - sol.h_at(sol.r()[k]));
    } catch (const Error&) {
      out[k] = HUGE_VAL;
    }
  }
  return out;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void check_solution(const RadialSolution& sol, const std::vector<double>& residual, double tol,
                    Verdicts& v) {
  const int n = sol.dimension();
  bool trap = true;
  bool admissible = true;
  bool s_monotone = true;
  for (std::size_t k = 0; k < sol.size(); ++k) {
    const double r = sol.r()[k];
    const double s = sol.s()[k];
    if (r > 0.0) {
      const double ratio = sinh_ratio(s, r);
      const double h = sol.h_at(r);
      if ((n - 2) * ratio * ratio > n * h * h * (1.0 + 1e-9) + 1e-12) trap = false;
    }
    if (node_curvatures(sol, k).admissible_up_to < 2) admissible = false;
    if (k > 0 && s < sol.s()[k - 1] - 1e-12) s_monotone = false;
  }
  v.record("trap", trap);
  v.record("admissible", admissible);
  v.record("s_monotone", s_monotone);
  v.record("f2_residual", max_of(residual) <= std::max(100.0 * tol, 1e-12));
  const int side = h_side(sol);
  bool phi_monotone = true;
  for (std::size_t k = 1; k < sol.size(); ++k) {
    const double d = sol.phi()[k] - sol.phi()[k - 1];
    if (side == -1 && d > 1e-9) phi_monotone = false;
    if (side == 1 && d < -1e-9) phi_monotone = false;
  }
  v.record("phi_monotone", phi_monotone);
}

std::vector<std::vector<std::string>> solution_rows(const RadialSolution& sol,
                                                    const std::vector<double>& residual) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(sol.size());
  for (std::size_t k = 0; k < sol.size(); ++k) {
    const CurvatureSpectrum spec = node_curvatures(sol, k);
    rows.push_back({format_double(sol.r()[k]), format_double(sol.s()[k]),
                    format_double(sol.s_prime()[k]), format_double(sol.eps()[k]),
                    format_double(sol.phi()[k]), format_double(spec.kappas[0]),
                    format_double(spec.kappas.size() > 1 ? spec.kappas[1] : spec.kappas[0]),
                    format_double(spec.sigma(2)), format_double(residual[k])});
  }
  return rows;
}

ojson tail_fit_json(const TailFit& fit) {
  ojson j;
  j["skipped"] = fit.skipped;
  j["ratio"] = fit.skipped ? ojson(nullptr) : ojson(fit.ratio);
  j["predicted"] = fit.predicted;
  j["drift"] = fit.skipped ? ojson(nullptr) : ojson(fit.drift);
  j["s_prime_deviation"] = fit.s_prime_deviation;
  j["s_prime_converged"] = fit.s_prime_converged;
  return j;
}

ojson limit_json(const PhiLimit& lim) {
  ojson j;
  j["estimate"] = lim.estimate;
  j["envelope"] = {lim.envelope[0], lim.envelope[1]};
  j["width"] = lim.width();
  j["delta_used"] = lim.delta_used;
  j["measured_ratio"] = lim.measured_ratio;
  j["r_delta"] = lim.r_delta;
  return j;
}

int run_solve(const RunConfig& cfg, const fs::path& out, ojson& report, Verdicts& v) {
  const RadialPrescription h = make_radial(cfg.prescription, cfg.n);
  RadialSolution sol = solve_radial(h, cfg.r_max, cfg.tol, cfg.phi0);
  if (cfg.fault == "perturb-s") sol = sol.corrupted_copy(sol.size() / 2, 1e-3);

  const auto residual = safe_f2_residual(sol);
  write_csv(out / "solution.csv", kSolutionColumns, solution_rows(sol, residual));

  report["prescription"] = h.name();
  report["nodes"] = sol.size();
  report["accepted_steps"] = sol.accepted_steps();
  report["tolerance_achieved"] = sol.tolerance_achieved();
  report["start_discrepancy"] = sol.start_discrepancy();
  report["quadrature_error"] = sol.quadrature_error();
  report["max_f2_residual"] = number_or_null(max_of(residual));
  report["warnings"] = sol.warnings();

  const BoundednessDetail cls = classify_boundedness_detail(h, cfg.r_probe, cfg.threshold);
  report["classification"] = boundedness_name(cls.classification);
  report["classification_reason"] = cls.reason;
  report["phi_limit_estimate"] = nullptr;
  report["envelope"] = nullptr;
  if (cls.classification == Boundedness::bounded) {
    const PhiLimit lim = estimate_phi_limit(sol, cfg.delta);
    report["phi_limit_estimate"] = lim.estimate;
    report["envelope"] = {lim.envelope[0], lim.envelope[1]};
    report["delta_used"] = lim.delta_used;
    report["limit"] = limit_json(lim);
  }
  report["tail_fit"] = tail_fit_json(tail_exponent_fit(sol));
  report["linearization_residual_r10"] =
      sol.r_max() > 10.0 ? number_or_null(verify_asymptotic_ode(sol, 10.0)) : ojson(nullptr);

  check_solution(sol, residual, cfg.tol, v);
  return kExitOk;
}

int run_classify(const RunConfig& cfg, ojson& report) {
  const RadialPrescription h = make_radial(cfg.prescription, cfg.n);
  const BoundednessDetail cls = classify_boundedness_detail(h, cfg.r_probe, cfg.threshold);
  report["prescription"] = h.name();
  report["classification"] = boundedness_name(cls.classification);
  report["classification_reason"] = cls.reason;
  report["windows"] = cls.windows;
  report["increments"] = cls.increments;
  report["coefficients"] = cls.coefficients;
  report["comparison_constant"] = cls.comparison_constant;
  return kExitOk;
}

int run_barriers(const RunConfig& cfg, const fs::path& out, ojson& report, Verdicts& v) {
  const bool directional = cfg.prescription.family == "directional";
  const DirectionalPrescription h = make_directional(cfg.prescription, cfg.n);
  const RadialPrescription member =
      directional ? families::directional_radial_member(cfg.n, cfg.prescription.a,
                                                        cfg.prescription.p)
                  : make_radial(cfg.prescription, cfg.n);
  BarrierOptions options;
  options.r_max = cfg.r_max;
  options.delta = cfg.delta;
  const BarrierPair pair = build_barrier_pair(h, cfg.eps0, cfg.tol, options);
  const RadialSolution direct =
      normalize_at_infinity(solve_radial(member, cfg.r_max, cfg.tol), cfg.delta);

  std::vector<std::vector<std::string>> rows;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(cfg.r_max / 0.1));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double r = k == steps ? cfg.r_max : cfg.r_max * static_cast<double>(k) / steps;
    rows.push_back({format_double(r), format_double(pair.raw.h_minus(r)),
                    format_double(pair.raw.h_plus(r)), format_double(pair.g_minus(r)),
                    format_double(pair.g_plus(r)), format_double(pair.phi_minus.phi_at(r)),
                    format_double(pair.phi_plus.phi_at(r))});
  }
  write_csv(out / "barriers.csv", kBarrierColumns, rows);

  const double smooth_minus =
      smoothing_error_ratio(pair.smoothed_minus, pair.widened.h_minus, pair.eps0, cfg.r_max);
  const double smooth_plus =
      smoothing_error_ratio(pair.smoothed_plus, pair.widened.h_plus, pair.eps0, cfg.r_max);
  const double pinch = pinching_violation(pair, direct);
  auto vanishes = [](const RadialSolution& s, const PhiLimit& lim) {
    const double phi_end = s.phi().back();
    return phi_end + lim.envelope[0] <= 1e-12 && phi_end + lim.envelope[1] >= -1e-12;
  };

  report["prescription"] = h.name();
  report["radial_member"] = member.name();
  report["eps0"] = pair.eps0;
  report["sphere_nodes"] = pair.sphere_nodes;
  report["classification"] = {boundedness_name(pair.classification[0]),
                              boundedness_name(pair.classification[1])};
  report["normalization_constants"] = {pair.normalization_constants[0],
                                       pair.normalization_constants[1]};
  report["limit_minus"] = limit_json(pair.limit_minus);
  report["limit_plus"] = limit_json(pair.limit_plus);
  report["barrier_check"] = {{"points", pair.check.points},
                             {"seed", kBarrierCheckSeed},
                             {"min_upper_slack", pair.check.min_upper_slack},
                             {"min_lower_slack", pair.check.min_lower_slack}};
  report["smoothing_error_ratio"] = {smooth_minus, smooth_plus};
  report["pinching_violation"] = pinch;

  v.record("barrier_inequalities", pair.check.holds());
  v.record("smoothing_budget", smooth_minus <= 1.0 && smooth_plus <= 1.0);
  v.record("pinching", pinch <= 1e-9);
  v.record("vanish_at_infinity", vanishes(pair.phi_minus, pair.limit_minus) &&
                                     vanishes(pair.phi_plus, pair.limit_plus));
  return kExitOk;
}

int run_verify(const RunConfig& cfg, const fs::path& out, ojson& report, Verdicts& v) {
  const RadialPrescription h = make_radial(cfg.prescription, cfg.n);
  const DirectionalPrescription dh = DirectionalPrescription::from_radial(h);
  const RadialSolution sol = solve_radial(h, cfg.r_max, cfg.tol, cfg.phi0);
  const auto [phi_lo, phi_hi] = std::minmax_element(sol.phi().begin(), sol.phi().end());

  std::vector<std::vector<std::string>> rows;
  ojson levels = ojson::array();
  bool admissible = true;
  bool bounds = true;
  bool cone = true;
  std::vector<PatchResiduals> all;
  for (double sp : cfg.spacings) {
    const CartesianPatch patch = to_cartesian(sol, cfg.box[0], cfg.box[1], sp);
    const PatchResiduals pr = summarize_patch(patch, dh);
    all.push_back(pr);
    rows.push_back({format_double(pr.spacing), format_double(pr.max_residual),
                    format_double(pr.rms_residual), format_double(pr.admissible_fraction),
                    format_double(pr.worst_sigma2_margin), std::to_string(pr.nodes)});
    admissible = admissible && pr.admissible_fraction == 1.0;
    bounds = bounds && hyperboloid_bounds_check(patch, *phi_lo, *phi_hi);
    for (std::size_t f = 0; f < patch.size(); ++f) {
      double rho2 = 0.0;
      for (double x : patch.position(f)) rho2 += x * x;
      if (!(patch.u()[f] > std::sqrt(rho2))) cone = false;
    }
  }
  write_csv(out / "patch_residuals.csv", kPatchColumns, rows);

  ojson orders = ojson::array();
  for (std::size_t i = 1; i < all.size(); ++i) {
    const double scale = std::log(all[i - 1].spacing / all[i].spacing);
    orders.push_back({{"max", std::log(all[i - 1].max_residual / all[i].max_residual) / scale},
                      {"rms", std::log(all[i - 1].rms_residual / all[i].rms_residual) / scale}});
  }
  report["prescription"] = h.name();
  report["phi_range"] = {*phi_lo, *phi_hi};
  report["observed_orders"] = orders;
  report["warnings"] = sol.warnings();
  v.record("admissible", admissible);
  v.record("hyperboloid_bounds", bounds);
  v.record("cone_containment", cone);
  return kExitOk;
}

struct SweepPoint {
  int n;
  PrescriptionSpec spec;
};

std::vector<std::string> sweep_row(const RunConfig& cfg, const SweepPoint& pt) {
  const auto& keys = family_keys(pt.spec.family);
  auto param = [&](const char* k, double x) {
    return std::find(keys.begin(), keys.end(), k) != keys.end() ? format_double(x) : std::string();
  };
  std::vector<std::string> row{std::to_string(pt.n), pt.spec.family, param("c", pt.spec.c),
                               param("p", pt.spec.p), param("q", pt.spec.q),
                               param("value", pt.spec.value)};
  std::string classification;
  double limit = kNaN;
  double residual = kNaN;
  double ratio = kNaN;
  std::string error;
  try {
    const RadialPrescription h = make_radial(pt.spec, pt.n);
    const RadialSolution sol = solve_radial(h, cfg.r_max, cfg.tol, cfg.phi0);
    residual = max_of(safe_f2_residual(sol));
    const Boundedness b = classify_boundedness(h, cfg.r_probe, cfg.threshold);
    classification = boundedness_name(b);
    const TailFit fit = tail_exponent_fit(sol);
    if (!fit.skipped) ratio = fit.ratio;
    if (b == Boundedness::bounded) limit = estimate_phi_limit(sol, cfg.delta).estimate;
  } catch (const std::exception& e) {
    error = e.what();
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
  }
  row.insert(row.end(), {classification, csv_cell(limit), csv_cell(residual), csv_cell(ratio), error});
  return row;
}

int run_sweep(const RunConfig& cfg, const fs::path& out, ojson& report) {
  auto axis = [&](const std::string& key, double base) {
    auto it = cfg.sweep.find(key);
    return it == cfg.sweep.end() ? std::vector<double>{base} : it->second;
  };
  std::vector<SweepPoint> points;
  for (double n : axis("n", cfg.n)) {
    for (double c : axis("c", cfg.prescription.c)) {
      for (double p : axis("p", cfg.prescription.p)) {
        for (double q : axis("q", cfg.prescription.q)) {
          for (double value : axis("value", cfg.prescription.value)) {
            SweepPoint pt{static_cast<int>(n), cfg.prescription};
            pt.spec.c = c;
            pt.spec.p = p;
            pt.spec.q = q;
            pt.spec.value = value;
            points.push_back(pt);
          }
        }
      }
    }
  }
  if (points.size() > 1000) config_fail("sweep exceeds 1000 combinations");

  std::vector<std::vector<std::string>> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) rows[i] = sweep_row(cfg, points[i]);
  };
  const std::size_t threads = std::min(sweep_threads(), std::max<std::size_t>(points.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  write_csv(out / "sweep_summary.csv", kSweepColumns, rows);
  std::size_t failed = 0;
  for (const auto& row : rows) failed += row.back().empty() ? 0 : 1;
  report["rows"] = rows.size();
  report["failed_rows"] = failed;
  return kExitOk;
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::solve:
      return "solve";
    case Command::classify:
      return "classify";
    case Command::barriers:
      return "barriers";
    case Command::verify:
      return "verify";
    case Command::sweep:
      return "sweep";
  }
  return "solve";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::solve, Command::classify, Command::barriers, Command::verify,
                    Command::sweep}) {
    if (command_name(c) == name) return c;
  }
  config_fail("unknown command '" + std::string(name) + "'");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig parse_config(std::string_view json_text, Command command, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_fail(std::string("malformed JSON: ") + e.what());
  }
  check_keys(j,
             {"command", "n", "prescription", "r_max", "tol", "phi0", "eps0", "delta", "r_probe",
              "threshold", "verify", "sweep", "fault"},
             "config");
  RunConfig cfg;
  cfg.command = command;
  if (j.contains("command")) {
    if (!j.at("command").is_string() || parse_command(j.at("command").get<std::string>()) != command) {
      config_fail("config 'command' does not match the requested command");
    }
  }
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer()) config_fail("'n' must be an integer");
    cfg.n = j.at("n").get<int>();
  }
  if (j.contains("prescription")) cfg.prescription = parse_prescription(j.at("prescription"), base_dir);
  cfg.r_max = number(j, "r_max", cfg.r_max);
  cfg.tol = number(j, "tol", cfg.tol);
  cfg.phi0 = number(j, "phi0", cfg.phi0);
  cfg.eps0 = number(j, "eps0", cfg.eps0);
  cfg.delta = number(j, "delta", cfg.delta);
  cfg.r_probe = number(j, "r_probe", cfg.r_probe);
  cfg.threshold = number(j, "threshold", cfg.threshold);
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    check_keys(v, {"box", "spacings"}, "verify");
    if (v.contains("box")) {
      const auto box = number_list(v.at("box"), "box");
      if (box.size() != 2 || !(box[1] > box[0])) config_fail("'box' must be [lo, hi] with lo < hi");
      cfg.box = {box[0], box[1]};
    }
    if (v.contains("spacings")) cfg.spacings = number_list(v.at("spacings"), "spacings");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, {"n", "c", "p", "q", "value"}, "sweep");
    for (const auto& [key, value] : s.items()) cfg.sweep[key] = number_list(value, key);
  }
  if (j.contains("fault")) {
    if (!j.at("fault").is_string()) config_fail("'fault' must be a string");
    cfg.fault = j.at("fault").get<std::string>();
    if (!cfg.fault.empty() && cfg.fault != "perturb-s") config_fail("unknown fault '" + cfg.fault + "'");
  }

  if (cfg.n < 2 || cfg.n > 16) config_fail("n must lie in [2, 16]");
  if (!(cfg.tol >= 1e-13 && cfg.tol <= 1e-3)) config_fail("tol must lie in [1e-13, 1e-3]");
  if (!(cfg.r_max > 0.0 && cfg.r_max <= 200.0)) config_fail("r_max must lie in (0, 200]");
  if (!(cfg.delta > 0.0)) config_fail("delta must be positive");
  if (!(cfg.r_probe > 0.0) || !(cfg.threshold > 0.0)) config_fail("r_probe and threshold must be positive");
  if (cfg.eps0 < 0.0) config_fail("eps0 must be >= 0 (0 selects the default)");
  if (cfg.prescription.family == "directional" && command != Command::barriers) {
    config_fail("the directional family is only available to 'barriers'");
  }
  if (command == Command::barriers && !(cfg.r_max > 1.0)) config_fail("barriers need r_max > 1");
  if (command == Command::verify) {
    if (cfg.n > 3) config_fail("verify patches are limited to n in {2, 3}");
    for (double sp : cfg.spacings) {
      if (!(sp > 0.0)) config_fail("spacings must be positive");
      const double points = std::round((cfg.box[1] - cfg.box[0]) / sp) + 1.0;
      if (points < 3.0 || std::pow(points, cfg.n) > 2e7) config_fail("patch lattice size out of range");
    }
  }
  for (const auto& [key, values] : cfg.sweep) {
    for (double x : values) {
      if (!std::isfinite(x)) config_fail("sweep values must be finite");
      if (key == "n" && (x != std::floor(x) || x < 2 || x > 16)) config_fail("sweep n must be integers in [2, 16]");
    }
  }
  if (cfg.prescription.family == "table") load_table(cfg.prescription, cfg.n);
  return cfg;
}

RunConfig load_config(const fs::path& path, Command command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_fail("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), command, path.parent_path());
}

RadialPrescription make_radial(const PrescriptionSpec& spec, int n) {
  if (spec.family == "constant") return families::constant(n, spec.value);
  if (spec.family == "power-deficit") return families::power_deficit(n, spec.c, spec.p);
  if (spec.family == "power-excess") return families::power_excess(n, spec.c, spec.p);
  if (spec.family == "bertrand") return families::bertrand(n, spec.c, spec.q);
  if (spec.family == "table") return load_table(spec, n);
  config_fail("family '" + spec.family + "' is not radial");
}

DirectionalPrescription make_directional(const PrescriptionSpec& spec, int n) {
  if (spec.family == "directional") return families::directional(n, spec.a, spec.p);
  return DirectionalPrescription::from_radial(make_radial(spec, n));
}

std::size_t sweep_threads() {
  if (const char* env = std::getenv("RADIAL_SIGMA2_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(const RunConfig& config, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::config_error, "cannot create " + out_dir.string() + ": " + ec.message());

  ojson report;
  report["command"] = command_name(config.command);
  report["config"] = config_json(config);
  report["seeds"] = {{"barrier_check", kBarrierCheckSeed}, {"sphere_sampler", "halton-shifted"}};
  Verdicts verdicts;
  int status = kExitOk;
  try {
    switch (config.command) {
      case Command::solve:
        status = run_solve(config, out_dir, report, verdicts);
        break;
      case Command::classify:
        status = run_classify(config, report);
        break;
      case Command::barriers:
        status = run_barriers(config, out_dir, report, verdicts);
        break;
      case Command::verify:
        status = run_verify(config, out_dir, report, verdicts);
        break;
      case Command::sweep:
        status = run_sweep(config, out_dir, report);
        break;
    }
  } catch (const Error& e) {
    report["error"] = {{"code", errc_name(e.code())}, {"message", e.what()}};
    status = e.code() == Errc::config_error ? kExitConfig : kExitSolver;
  }
  report["invariants"] = verdicts.table;
  report["violated"] = verdicts.violated;
  if (status == kExitOk && !verdicts.violated.empty()) status = kExitInvariant;
  report["exit_code"] = status;
  write_json(out_dir / "report.json", report);
  return status;
}

}  // namespace rsc
