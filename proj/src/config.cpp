#include "pinlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pinlab/errors.hpp"
#include "pinlab/homogeneous.hpp"
#include "pinlab/persist.hpp"
#include "pinlab/quenched.hpp"
#include "pinlab/renewal.hpp"

namespace pinlab {

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::law_info: return "law-info";
    case RunMode::pure_solve: return "pure-solve";
    case RunMode::renewal_check: return "renewal-check";
    case RunMode::quenched_fe: return "quenched-fe";
    case RunMode::certify: return "certify";
    case RunMode::scan_shift: return "scan-shift";
    case RunMode::fit_exponent: return "fit-exponent";
    case RunMode::fe_profile: return "fe-profile";
  }
  return "?";
}

RunMode run_mode_from(const std::string& s) {
  for (RunMode m : {RunMode::law_info, RunMode::pure_solve,
                    RunMode::renewal_check, RunMode::quenched_fe,
                    RunMode::certify, RunMode::scan_shift,
                    RunMode::fit_exponent, RunMode::fe_profile}) {
    if (s == to_string(m)) return m;
  }
  throw ValidationError({"/mode: unknown mode '" + s + "'"});
}

namespace {

using nlohmann::json;

[[noreturn]] void bad(std::vector<std::string> items) {
  throw ValidationError(std::move(items));
}

double as_num(const json& v, const char* ptr, std::vector<std::string>& errs) {
  if (v.is_number()) return v.get<double>();
  errs.push_back(std::string(ptr) + ": expected a number");
  return 0.0;
}

std::uint64_t as_uint(const json& v, const char* ptr,
                      std::vector<std::string>& errs) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0)
    return (std::uint64_t)v.get<long long>();
  errs.push_back(std::string(ptr) + ": expected a nonnegative integer");
  return 0;
}

std::string as_str(const json& v, const char* ptr,
                   std::vector<std::string>& errs) {
  if (v.is_string()) return v.get<std::string>();
  errs.push_back(std::string(ptr) + ": expected a string");
  return {};
}

bool as_bool(const json& v, const char* ptr, std::vector<std::string>& errs) {
  if (v.is_boolean()) return v.get<bool>();
  errs.push_back(std::string(ptr) + ": expected a boolean");
  return false;
}

std::vector<double> as_num_list(const json& v, const char* ptr,
                                std::vector<std::string>& errs) {
  std::vector<double> out;
  if (!v.is_array()) {
    errs.push_back(std::string(ptr) + ": expected an array of numbers");
    return out;
  }
  for (const auto& e : v) {
    if (!e.is_number()) {
      errs.push_back(std::string(ptr) + "/" + std::to_string(out.size()) +
                     ": expected a number");
      return out;
    }
    out.push_back(e.get<double>());
  }
  return out;
}

void parse_law(const json& v, LawSpec& law, std::vector<std::string>& errs) {
  if (!v.is_object()) {
    errs.push_back("/law: expected an object");
    return;
  }
  for (const auto& [key, val] : v.items()) {
    if (key == "alpha") {
      law.alpha = as_num(val, "/law/alpha", errs);
    } else if (key == "slow") {
      std::string s = as_str(val, "/law/slow", errs);
      if (s == "constant") law.slow.kind = SlowKind::constant;
      else if (s == "log_power") law.slow.kind = SlowKind::log_power;
      else if (!s.empty())
        errs.push_back("/law/slow: expected 'constant' or 'log_power'");
    } else if (key == "slow_b") {
      law.slow.b = as_num(val, "/law/slow_b", errs);
    } else if (key == "n_max") {
      law.n_max = (std::size_t)as_uint(val, "/law/n_max", errs);
    } else if (key == "tol") {
      law.tol = as_num(val, "/law/tol", errs);
    } else if (key == "cutoff") {
      law.cutoff = (std::size_t)as_uint(val, "/law/cutoff", errs);
    } else {
      errs.push_back("/law/" + key + ": unknown key");
    }
  }
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  std::vector<std::string> errs;
  if (!j.is_object()) bad({"/: config must be a JSON object"});
  for (const auto& [key, val] : j.items()) {
    if (key == "mode") {
      std::string s = as_str(val, "/mode", errs);
      if (!s.empty()) {
        try {
          c.mode = run_mode_from(s);
        } catch (const ValidationError& e) {
          errs.insert(errs.end(), e.items.begin(), e.items.end());
        }
      }
    } else if (key == "law") {
      parse_law(val, c.law, errs);
    } else if (key == "disorder") {
      std::string s = as_str(val, "/disorder", errs);
      if (s == "gaussian") c.disorder = DisorderKind::gaussian;
      else if (s == "rademacher") c.disorder = DisorderKind::rademacher;
      else if (!s.empty())
        errs.push_back("/disorder: expected 'gaussian' or 'rademacher'");
    } else if (key == "seed") {
      c.seed = as_uint(val, "/seed", errs);
      c.seed_set = true;
    } else if (key == "replicas") {
      c.replicas = (std::size_t)as_uint(val, "/replicas", errs);
    } else if (key == "workers") {
      c.workers = (std::size_t)as_uint(val, "/workers", errs);
    } else if (key == "out_root") {
      c.out_root = as_str(val, "/out_root", errs);
    } else if (key == "h") {
      c.h = as_num(val, "/h", errs);
      c.h_set = true;
    } else if (key == "beta") {
      c.beta = as_num(val, "/beta", errs);
      c.beta_set = true;
    } else if (key == "gamma") {
      c.gamma = as_num(val, "/gamma", errs);
      c.gamma_set = true;
    } else if (key == "k") {
      c.k = (std::size_t)as_uint(val, "/k", errs);
    } else if (key == "n") {
      c.n = (std::size_t)as_uint(val, "/n", errs);
    } else if (key == "a") {
      c.a = as_num(val, "/a", errs);
    } else if (key == "a_max") {
      c.a_max = as_num(val, "/a_max", errs);
    } else if (key == "epsilon") {
      c.epsilon = as_num(val, "/epsilon", errs);
      c.epsilon_set = true;
    } else if (key == "case") {
      std::string s = as_str(val, "/case", errs);
      bool hit = false;
      for (ScanCase sc : {ScanCase::alpha_gt1, ScanCase::alpha_half_one,
                          ScanCase::alpha_half}) {
        if (s == to_string(sc)) {
          c.scase = sc;
          c.case_set = true;
          hit = true;
        }
      }
      if (!hit && !s.empty())
        errs.push_back(
            "/case: expected 'alpha_gt1', 'alpha_half_one' or 'alpha_half'");
    } else if (key == "backend") {
      std::string s = as_str(val, "/backend", errs);
      if (s == "exact") c.backend = ABackend::exact;
      else if (s == "holder") c.backend = ABackend::holder;
      else if (s == "mc") c.backend = ABackend::mc;
      else if (!s.empty())
        errs.push_back("/backend: expected 'exact', 'holder' or 'mc'");
    } else if (key == "schedule") {
      std::string s = as_str(val, "/schedule", errs);
      c.schedule_set = true;
      if (s == "zero") c.schedule.kind = ScheduleKind::zero;
      else if (s == "inv_sqrt") c.schedule.kind = ScheduleKind::inv_sqrt;
      else if (s == "inv_sqrt_jlogj")
        c.schedule.kind = ScheduleKind::inv_sqrt_jlogj;
      else if (s == "explicit") c.schedule.kind = ScheduleKind::explicit_values;
      else if (!s.empty())
        errs.push_back(
            "/schedule: expected 'zero', 'inv_sqrt', 'inv_sqrt_jlogj' or "
            "'explicit'");
    } else if (key == "lambda") {
      c.schedule.values = as_num_list(val, "/lambda", errs);
    } else if (key == "k_cap") {
      c.k_cap = (std::size_t)as_uint(val, "/k_cap", errs);
    } else if (key == "beta_grid") {
      c.beta_grid = as_num_list(val, "/beta_grid", errs);
    } else if (key == "h_grid") {
      c.h_grid = as_num_list(val, "/h_grid", errs);
    } else if (key == "scan_path") {
      c.scan_path = as_str(val, "/scan_path", errs);
    } else if (key == "verify") {
      c.verify = as_bool(val, "/verify", errs);
    } else {
      errs.push_back("/" + key + ": unknown key");
    }
  }
  if (!j.contains("mode")) errs.insert(errs.begin(), "/mode: required");
  if (!errs.empty()) bad(std::move(errs));
  return c;
}

namespace {

bool mode_is_stochastic(const RunConfig& c) {
  switch (c.mode) {
    case RunMode::renewal_check:
    case RunMode::quenched_fe:
    case RunMode::fe_profile:
      return true;
    case RunMode::certify:
    case RunMode::scan_shift:
      return c.backend == ABackend::mc;
    case RunMode::fit_exponent:
      return c.scan_path.empty() && c.backend == ABackend::mc;
    default:
      return false;
  }
}

bool uses_scan_params(const RunConfig& c) {
  return c.mode == RunMode::scan_shift ||
         (c.mode == RunMode::fit_exponent && c.scan_path.empty());
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json j;
  j["mode"] = std::string(to_string(c.mode));
  json law;
  law["alpha"] = c.law.alpha;
  law["slow"] =
      c.law.slow.kind == SlowKind::constant ? "constant" : "log_power";
  if (c.law.slow.kind == SlowKind::log_power) law["slow_b"] = c.law.slow.b;
  law["n_max"] = c.law.n_max;
  law["tol"] = c.law.tol;
  law["cutoff"] = c.law.cutoff;
  j["law"] = law;
  j["disorder"] = std::string(disorder_name(c.disorder));
  if (c.seed_set) j["seed"] = c.seed;
  if (mode_is_stochastic(c)) j["replicas"] = c.replicas;

  switch (c.mode) {
    case RunMode::law_info:
      break;
    case RunMode::pure_solve:
      j["h"] = c.h;
      if (c.n) j["n"] = c.n;
      if (c.verify) j["verify"] = true;
      break;
    case RunMode::renewal_check:
      if (c.n) j["n"] = c.n;
      break;
    case RunMode::quenched_fe:
      j["beta"] = c.beta;
      j["h"] = c.h;
      if (c.n) j["n"] = c.n;
      break;
    case RunMode::certify:
      j["beta"] = c.beta;
      j["backend"] = std::string(to_string(c.backend));
      j["k_cap"] = c.k_cap;
      if (c.case_set) {
        j["case"] = std::string(to_string(c.scase));
        j["a"] = c.a;
        if (c.epsilon_set) j["epsilon"] = c.epsilon;
      } else {
        j["h"] = c.h;
        j["gamma"] = c.gamma;
        j["k"] = c.k;
        j["schedule"] = std::string(to_string(c.schedule.kind));
        if (c.schedule.kind == ScheduleKind::explicit_values)
          j["lambda"] = c.schedule.values;
      }
      break;
    case RunMode::scan_shift:
    case RunMode::fit_exponent:
      if (c.mode == RunMode::fit_exponent && !c.scan_path.empty()) {
        j["scan_path"] = c.scan_path;
        if (c.case_set) j["case"] = std::string(to_string(c.scase));
        if (c.epsilon_set) j["epsilon"] = c.epsilon;
        break;
      }
      j["case"] = std::string(to_string(c.scase));
      j["beta_grid"] = c.beta_grid;
      j["a_max"] = c.a_max;
      if (c.epsilon_set) j["epsilon"] = c.epsilon;
      j["k_cap"] = c.k_cap;
      j["backend"] = std::string(to_string(c.backend));
      break;
    case RunMode::fe_profile:
      j["beta"] = c.beta;
      j["h_grid"] = c.h_grid;
      if (c.n) j["n"] = c.n;
      break;
  }
  return j;
}

std::string config_hash(const RunConfig& c) {
  return hex64(fnv1a(config_to_json(c).dump()));
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> v;
  auto add = [&](std::string s) { v.push_back(std::move(s)); };

  if (!(c.law.alpha > 0.0) || !std::isfinite(c.law.alpha))
    add("/law/alpha: must be a positive finite number");
  if (!(c.law.tol > 0.0)) add("/law/tol: must be positive");
  if (c.law.n_max < 2) add("/law/n_max: must be at least 2");
  if (c.law.slow.kind == SlowKind::constant && c.law.slow.b != 0.0)
    add("/law/slow_b: set, but the slow factor is constant");
  if (c.workers < 1) add("/workers: must be at least 1");

  bool stochastic = mode_is_stochastic(c);
  if (stochastic && !c.seed_set)
    add("/seed: required for stochastic runs (explicit seeds keep reruns "
        "reproducible)");
  if (stochastic && c.replicas < 2) add("/replicas: must be at least 2");

  auto check_eps_window = [&]() {
    if (c.scase == ScanCase::alpha_half_one) {
      if (!c.epsilon_set || !(c.epsilon > 0.0) || !(c.epsilon < 1.0))
        add("/epsilon: must lie in (0,1) for the alpha_half_one construction");
    } else if (c.scase == ScanCase::alpha_half) {
      if (c.law.slow.kind != SlowKind::log_power || !(c.law.slow.b < -0.5)) {
        add("/law/slow: the alpha_half construction needs a "
            "(log(1+n))^{-eta} factor with eta > 1/2");
      } else {
        double eta = -c.law.slow.b;
        if (!c.epsilon_set || !(c.epsilon > 0.0) || !(c.epsilon < eta - 0.5))
          add("/epsilon: outside the admissible window 0 < epsilon < eta - "
              "1/2");
      }
    }
  };
  auto check_case_alpha = [&]() {
    if (c.scase == ScanCase::alpha_gt1 && !(c.law.alpha > 1.0))
      add("/case: alpha_gt1 needs alpha > 1");
    if (c.scase == ScanCase::alpha_half_one &&
        !(c.law.alpha > 0.5 && c.law.alpha < 1.0))
      add("/case: alpha_half_one needs alpha in (1/2, 1)");
    if (c.scase == ScanCase::alpha_half && std::fabs(c.law.alpha - 0.5) > 1e-9)
      add("/case: alpha_half needs alpha = 1/2");
  };

  switch (c.mode) {
    case RunMode::law_info:
      break;
    case RunMode::pure_solve:
      if (!c.h_set) add("/h: required for pure-solve");
      else if (!std::isfinite(c.h)) add("/h: must be finite");
      if (c.n > c.law.n_max) add("/n: exceeds the law table length");
      break;
    case RunMode::renewal_check:
      if (c.n > c.law.n_max) add("/n: exceeds the law table length");
      break;
    case RunMode::quenched_fe:
      if (!c.beta_set) add("/beta: required for quenched-fe");
      else if (!(c.beta >= 0.0)) add("/beta: must be nonnegative");
      if (!c.h_set) add("/h: required for quenched-fe");
      if (c.n > c.law.n_max) add("/n: exceeds the law table length");
      break;
    case RunMode::certify: {
      if (!c.beta_set) add("/beta: required for certify");
      else if (!(c.beta >= 0.0)) add("/beta: must be nonnegative");
      if (c.k_cap < 1) add("/k_cap: must be at least 1");
      if (c.case_set) {
        if (!(c.a > 0.0)) add("/a: must be positive for a construction run");
        if (c.k != 0)
          add("/k: set together with a construction case; the construction "
              "chooses the cutoff");
        if (c.gamma_set)
          add("/gamma: set together with a construction case; the "
              "construction chooses gamma");
        check_case_alpha();
        check_eps_window();
        if (c.beta_set && !(c.beta > 0.0))
          add("/beta: constructions need beta > 0");
      } else {
        if (!c.h_set) add("/h: required for certify without a case");
        if (c.k < 1) add("/k: must be at least 1");
        if (!c.gamma_set) {
          add("/gamma: required for certify without a case");
        } else if (!(c.gamma > 0.0 && c.gamma < 1.0)) {
          add("/gamma: must lie in (0,1)");
        } else {
          if ((1.0 + c.law.alpha) * c.gamma <= 1.0)
            add("/gamma: (1+alpha)*gamma <= 1, the gamma-power tail is not "
                "summable");
          if (c.schedule.kind == ScheduleKind::explicit_values) {
            if (c.schedule.values.size() < c.k) {
              add("/lambda: needs at least k entries");
            } else {
              double cap = DisorderLaw::lambda_cap(c.gamma);
              for (std::size_t i = 0; i < c.k; ++i) {
                if (std::fabs(c.schedule.values[i]) > cap + 1e-12)
                  add("/lambda/" + std::to_string(i) +
                      ": tilt outside the admissible range |lambda| <= "
                      "min(1, (1-gamma)/gamma)");
              }
            }
          }
        }
      }
      if (c.backend == ABackend::mc && c.replicas < 2)
        add("/replicas: must be at least 2 for the mc backend");
      break;
    }
    case RunMode::scan_shift:
    case RunMode::fit_exponent: {
      if (c.mode == RunMode::fit_exponent && !c.scan_path.empty()) break;
      if (c.mode == RunMode::fit_exponent && !c.case_set &&
          c.beta_grid.empty()) {
        add("/scan_path: either a stored scan or inline scan parameters "
            "(case, beta_grid) are required");
        break;
      }
      if (!c.case_set) add("/case: required for a shift scan");
      if (c.beta_grid.empty()) add("/beta_grid: must be nonempty");
      for (std::size_t i = 0; i < c.beta_grid.size(); ++i)
        if (!(c.beta_grid[i] > 0.0))
          add("/beta_grid/" + std::to_string(i) + ": must be positive");
      if (!(c.a_max > 0.0)) add("/a_max: must be positive");
      if (c.k_cap < 1) add("/k_cap: must be at least 1");
      if (c.case_set) {
        check_case_alpha();
        check_eps_window();
      }
      break;
    }
    case RunMode::fe_profile:
      if (!c.beta_set) add("/beta: required for fe-profile");
      else if (!(c.beta >= 0.0)) add("/beta: must be nonnegative");
      if (c.h_grid.empty()) add("/h_grid: must be nonempty");
      if (c.n > c.law.n_max) add("/n: exceeds the law table length");
      break;
  }
  return v;
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::filesystem::path resolve_out_root(const RunConfig& c) {
  if (const char* env = std::getenv("PINLAB_OUT"); env && *env)
    return std::filesystem::path(env);
  if (!c.out_root.empty()) return std::filesystem::path(c.out_root);
  return std::filesystem::path("runs");
}

// loads the shared table snapshot for this law, or builds one and saves it;
// the caller constructs the Law from the returned snapshot
LawTableCache law_cache_for(const RunConfig& c,
                            const std::filesystem::path& root) {
  auto cache_dir = root / "cache";
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  auto file = cache_dir / ("law-" + hex64(fnv1a(c.law.id())) + ".bin");
  if (auto cache = load_law_cache(file, c.law)) return std::move(*cache);
  Law law(c.law);
  if (!ec) {
    try {
      save_law_cache(file, law);
    } catch (const std::exception&) {
      // the cache is an optimization; the run proceeds without it
    }
  }
  return law.export_cache();
}

json interval_json(const Interval& iv) {
  return json{{"lo", iv.lo}, {"hi", iv.hi}};
}

json estimate_json(const MomentEstimate& e) {
  return json{{"point", e.point},
              {"stderr", e.stderr_},
              {"replicas", e.replicas},
              {"lower", e.lower()},
              {"upper", e.upper()}};
}

int run_law_info(const RunConfig& c, const Law& law, RunDir& dir) {
  json j;
  j["alpha"] = law.spec().alpha;
  j["c"] = law.c();
  j["log_c"] = law.log_c();
  j["mass"] = interval_json(law.mass());
  json head = json::array();
  for (std::size_t n = 1; n <= std::min<std::size_t>(8, law.spec().n_max); ++n)
    head.push_back(law.k(n));
  j["k_head"] = head;
  dir.write_json("law_info.json", j);

  std::size_t rows = std::min<std::size_t>(law.spec().n_max, 8192);
  std::ostringstream csv;
  csv << "n,k_n\n";
  for (std::size_t n = 1; n <= rows; ++n)
    csv << n << ',' << num(law.k(n)) << '\n';
  dir.write_text("k_table.csv", csv.str());

  save_law_cache(dir.file("law_table.bin"), law);
  dir.track("law_table.bin");
  return 0;
}

int run_pure_solve(const RunConfig& c, const Law& law, RunDir& dir) {
  PureSolveOptions opts;
  opts.verify = c.verify;
  PureSolveResult r = pure_free_energy(law, c.h, opts);
  json j;
  j["h"] = r.h;
  j["f"] = r.f;
  j["f_bracket"] = interval_json(r.f_bracket);
  j["residual"] = r.residual;
  j["series_cutoff"] = r.series_cutoff;
  j["iterations"] = r.iterations;
  j["correlation_length"] = r.correlation_length;
  if (c.verify) {
    j["dp_slope"] = r.dp_slope;
    j["dp_slope_rel_err"] = r.dp_slope_rel_err;
    j["verified"] = r.verified;
  }
  dir.write_json("pure_solve.json", j);

  std::size_t N = c.n ? c.n : std::min<std::size_t>(law.spec().n_max, 2048);
  auto lz = pure_log_partition_curve(law, c.h, N);
  std::ostringstream csv;
  csv << "n,log_z\n";
  for (std::size_t n = 0; n < lz.size(); ++n)
    csv << n << ',' << num(lz[n]) << '\n';
  dir.write_text("logz.csv", csv.str());
  return 0;
}

int run_renewal_check(const RunConfig& c, const Law& law, RunDir& dir) {
  std::size_t N = c.n ? c.n : std::min<std::size_t>(law.spec().n_max, 10000);
  auto u = mass_renewal(law, N);
  std::ostringstream csv;
  csv << "n,u_n\n";
  for (std::size_t n = 0; n < u.size(); ++n)
    csv << n << ',' << num(u[n]) << '\n';
  dir.write_text("u_table.csv", csv.str());

  TauSampler sampler(law);
  Rng rng(c.seed, 0);
  auto contacts = sample_contacts(sampler, rng, N);
  std::ostringstream traj;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    if (i) traj << ' ';
    traj << contacts[i];
  }
  traj << '\n';
  dir.write_text("trajectory.txt", traj.str());

  json j;
  j["n"] = N;
  if (law.spec().alpha < 1.0) {
    j["doney_ratio"] = doney_ratio(law, N);
    j["doney_ratio_short"] = doney_ratio(law, std::max<std::size_t>(N / 100, 2));
    LaplaceCheck lc = laplace_exponent_check(law, 1.0 / (double)N);
    j["laplace"] = json{{"lam", lc.lam},
                        {"exponent", interval_json(lc.exponent)},
                        {"asymptote", lc.asymptote},
                        {"ratio", lc.ratio}};
  }
  ContactFractionCheck cf = contact_fraction_lln(law, N, c.replicas, c.seed);
  j["contact_fraction"] = json{{"estimate", estimate_json(cf.fraction)},
                               {"table_mean", cf.table_mean},
                               {"limit", interval_json(cf.limit)},
                               {"limit_finite", cf.limit_finite},
                               {"table_consistent", cf.table_consistent}};
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  dir.write_json("renewal.json", j);
  return 0;
}

int run_quenched_fe(const RunConfig& c, const Law& law, RunDir& dir) {
  std::size_t N = c.n ? c.n : std::min<std::size_t>(law.spec().n_max, 1024);
  DisorderLaw d{c.disorder};
  McOptions mc;
  mc.replicas = c.replicas;
  mc.seed = c.seed;
  mc.workers = (unsigned)c.workers;
  MomentEstimate fe = quenched_free_energy_mc(law, d, c.beta, c.h, N, mc);
  double annealed =
      pure_log_partition(law, c.h + d.log_mgf(c.beta), N) / (double)N;
  json j;
  j["beta"] = c.beta;
  j["h"] = c.h;
  j["n"] = N;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["quenched"] = estimate_json(fe);
  j["annealed"] = annealed;
  j["jensen_gap"] = annealed - fe.point;
  j["h_c_ann"] = d.h_c_ann(c.beta);
  dir.write_json("quenched_fe.json", j);
  return 0;
}

void write_certificate_artifacts(RunDir& dir, const json& extra,
                                 const CertificateParams& params,
                                 const CertificateResult& res) {
  json j = extra;
  j["k"] = params.k;
  j["gamma"] = params.gamma;
  j["backend"] = std::string(to_string(params.backend));
  j["schedule"] = std::string(to_string(params.schedule.kind));
  j["rho_upper"] = res.rho_upper;
  j["status"] = std::string(to_string(res.status));
  j["confidence"] = std::string(to_string(res.confidence));
  if (res.confidence == CertConfidence::statistical) {
    j["confidence_level"] = res.confidence_level;
    j["seed"] = params.seed;
    j["replicas"] = params.replicas;
  }
  j["weight_moment"] = res.weight_moment;
  j["feasible"] = true;
  dir.write_json("certificate.json", j);

  std::ostringstream csv;
  csv << "j,log_bound,lambda,provenance,addend\n";
  for (std::size_t i = 0; i < params.a_bounds.size(); ++i) {
    const ABound& b = params.a_bounds[i];
    const char* prov = b.provenance == BoundProvenance::exact ? "exact"
                       : b.provenance == BoundProvenance::holder_deterministic
                           ? "holder"
                           : "mc";
    csv << i << ',' << num(b.log_value) << ',' << num(b.lambda) << ',' << prov
        << ',' << num(i < res.per_j.size() ? res.per_j[i] : 0.0) << '\n';
  }
  dir.write_text("a_bounds.csv", csv.str());
}

int run_certify(const RunConfig& c, const Law& law, RunDir& dir) {
  DisorderLaw d{c.disorder};
  McOptions mc;
  mc.replicas = c.replicas;
  mc.seed = c.seed;
  mc.workers = (unsigned)c.workers;

  CertificateParams params;
  double h = 0.0;
  json extra;
  extra["beta"] = c.beta;
  extra["disorder"] = std::string(disorder_name(c.disorder));
  extra["h_c_ann"] = d.h_c_ann(c.beta);

  if (c.case_set) {
    ShiftConstruction con = construct_for(c.scase, law, d, c.beta, c.a,
                                          c.epsilon, c.k_cap);
    extra["case"] = std::string(to_string(c.scase));
    extra["a"] = con.a;
    extra["delta"] = con.delta;
    extra["note"] = con.note;
    if (con.epsilon > 0.0) extra["epsilon"] = con.epsilon;
    if (con.eta > 0.0) extra["eta"] = con.eta;
    if (!con.feasible) {
      extra["feasible"] = false;
      extra["required_k"] = con.required_k;
      extra["k_cap"] = c.k_cap;
      dir.write_json("certificate.json", extra);
      dir.write_manifest();
      return 3;
    }
    params = con.params;
    h = con.h;
    extra["h"] = h;
  } else {
    params.k = c.k;
    params.gamma = c.gamma;
    params.schedule = c.schedule;
    h = c.h;
    extra["h"] = h;
    if (c.k > c.k_cap)
      throw ResourceCapError("cutoff k exceeds the resource cap",
                             (double)c.k);
  }
  params.backend = c.backend;
  if (c.backend == ABackend::mc) {
    params.seed = c.seed;
    params.replicas = c.replicas;
  }
  params.a_bounds = build_A_bounds(law, d, c.beta, h, params.gamma, params.k,
                                   params.backend, params.schedule, mc);
  CertificateResult res = rho_upper(law, d, c.beta, h, params);
  write_certificate_artifacts(dir, extra, params, res);
  return 0;
}

json record_json(const ShiftScanRecord& r) {
  json j;
  j["beta"] = r.beta;
  j["h_c_ann"] = r.h_c_ann;
  j["delta_certified"] = r.delta_certified;
  j["a_witness"] = r.a_witness;
  j["k"] = r.k;
  j["gamma"] = r.gamma;
  j["backend"] = std::string(to_string(r.backend));
  j["confidence"] = std::string(to_string(r.confidence));
  j["rho"] = r.rho;
  j["capped"] = r.capped;
  if (r.capped) j["required_k"] = r.required_k;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.replicas) {
    j["seed"] = r.seed;
    j["replicas"] = r.replicas;
  }
  if (r.has_diagnostic) {
    j["diagnostic"] = json{{"rho", r.diagnostic.rho},
                           {"far_sum", r.diagnostic.far_sum},
                           {"near_sum", r.diagnostic.near_sum},
                           {"split_j", r.diagnostic.split_j}};
  }
  return j;
}

void write_scan_artifacts(RunDir& dir,
                          const std::vector<ShiftScanRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_json(r));
  dir.write_json("scan.json", json{{"records", arr}});

  std::ostringstream csv;
  csv << "beta,h_c_ann,Delta_certified,k,gamma,backend,confidence\n";
  for (const auto& r : records) {
    csv << num(r.beta) << ',' << num(r.h_c_ann) << ','
        << num(r.delta_certified) << ',' << r.k << ',' << num(r.gamma) << ','
        << to_string(r.backend) << ',' << to_string(r.confidence) << '\n';
  }
  dir.write_text("scan.csv", csv.str());

  std::ostringstream dat;
  dat << "# log_beta log_delta_certified\n";
  for (const auto& r : records) {
    if (r.delta_certified > 0.0)
      dat << num(std::log(r.beta)) << ' ' << num(std::log(r.delta_certified))
          << '\n';
  }
  dir.write_text("scan.dat", dat.str());

  dir.write_text("plot_scan.gp",
                 "set xlabel 'log beta'\n"
                 "set ylabel 'log certified shift'\n"
                 "plot 'scan.dat' using 1:2 with linespoints title 'shift'\n");
}

ScanOptions scan_options(const RunConfig& c) {
  ScanOptions opts;
  opts.scase = c.scase;
  opts.a_max = c.a_max;
  opts.epsilon = c.epsilon;
  opts.k_cap = c.k_cap;
  opts.backend = c.backend;
  opts.mc.replicas = c.replicas;
  opts.mc.seed = c.seed;
  opts.mc.workers = (unsigned)c.workers;
  return opts;
}

int run_scan_shift(const RunConfig& c, const Law& law, RunDir& dir) {
  DisorderLaw d{c.disorder};
  auto records = shift_scan(law, d, c.beta_grid, scan_options(c));
  write_scan_artifacts(dir, records);
  return 0;
}

std::vector<ShiftScanRecord> load_scan_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"/scan_path: cannot open '" + path + "'"});
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError({"/scan_path: not valid JSON: " + std::string(e.what())});
  }
  if (!j.is_object() || !j.contains("records") || !j["records"].is_array())
    throw ValidationError({"/scan_path: missing 'records' array"});
  std::vector<ShiftScanRecord> out;
  for (const auto& e : j["records"]) {
    ShiftScanRecord r;
    r.beta = e.value("beta", 0.0);
    r.h_c_ann = e.value("h_c_ann", 0.0);
    r.delta_certified = e.value("delta_certified", 0.0);
    r.a_witness = e.value("a_witness", 0.0);
    r.k = e.value("k", (std::size_t)0);
    r.gamma = e.value("gamma", 0.0);
    out.push_back(r);
  }
  return out;
}

int run_fit_exponent(const RunConfig& c, const Law& law, RunDir& dir) {
  std::vector<ShiftScanRecord> records;
  if (!c.scan_path.empty()) {
    records = load_scan_records(c.scan_path);
  } else {
    DisorderLaw d{c.disorder};
    records = shift_scan(law, d, c.beta_grid, scan_options(c));
    write_scan_artifacts(dir, records);
  }
  bool loglog = c.case_set && c.scase == ScanCase::alpha_half;
  ExponentFit fit = loglog ? exponent_fit_loglog(records)
                           : exponent_fit(records);
  json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["slope_se"] = fit.slope_se;
  j["n_used"] = fit.n_used;
  if (!fit.warning.empty()) j["warning"] = fit.warning;
  j["scale"] = loglog ? "loglog_inverse" : "loglog";
  if (c.case_set) {
    double target = 0.0;
    if (c.scase == ScanCase::alpha_gt1) {
      target = 2.0;
    } else if (c.scase == ScanCase::alpha_half_one) {
      double al = c.law.alpha;
      target = 2.0 * al / (2.0 * al - 1.0) * (1.0 + c.epsilon);
    } else {
      double eta = -c.law.slow.b;
      target = 1.0 / (eta - 0.5 - c.epsilon);
    }
    j["target_slope"] = target;
  }
  dir.write_json("fit.json", j);
  return 0;
}

int run_fe_profile(const RunConfig& c, const Law& law, RunDir& dir) {
  std::size_t N = c.n ? c.n : std::min<std::size_t>(law.spec().n_max, 512);
  DisorderLaw d{c.disorder};
  McOptions mc;
  mc.replicas = c.replicas;
  mc.seed = c.seed;
  mc.workers = (unsigned)c.workers;
  auto rows = fe_profile(law, d, c.beta, c.h_grid, N, mc);

  json arr = json::array();
  std::ostringstream csv;
  csv << "h,quenched,stderr,annealed,gap\n";
  for (const auto& r : rows) {
    arr.push_back(json{{"h", r.h},
                       {"quenched", estimate_json(r.quenched)},
                       {"annealed", r.annealed},
                       {"gap", r.gap}});
    csv << num(r.h) << ',' << num(r.quenched.point) << ','
        << num(r.quenched.stderr_) << ',' << num(r.annealed) << ','
        << num(r.gap) << '\n';
  }
  json j;
  j["beta"] = c.beta;
  j["n"] = N;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["h_c_ann"] = DisorderLaw{c.disorder}.h_c_ann(c.beta);
  j["rows"] = arr;
  dir.write_json("fe_profile.json", j);
  dir.write_text("fe_profile.csv", csv.str());
  return 0;
}

}  // namespace

std::string run_directory(const RunConfig& c) {
  std::filesystem::path root = resolve_out_root(c);
  return (root / (std::string(to_string(c.mode)) + "-" + config_hash(c)))
      .string();
}

int run(const RunConfig& c) {
  auto violations = validate(c);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  std::filesystem::path root = resolve_out_root(c);
  std::string name =
      std::string(to_string(c.mode)) + "-" + config_hash(c);
  RunDir dir(root, name);
  dir.write_json("config.json", config_to_json(c));

  Law law = [&]() -> Law {
    try {
      return Law(c.law, law_cache_for(c, root));
    } catch (const std::exception&) {
      return Law(c.law);  // stale or corrupt snapshot: rebuild
    }
  }();
  int code = 0;
  switch (c.mode) {
    case RunMode::law_info: code = run_law_info(c, law, dir); break;
    case RunMode::pure_solve: code = run_pure_solve(c, law, dir); break;
    case RunMode::renewal_check: code = run_renewal_check(c, law, dir); break;
    case RunMode::quenched_fe: code = run_quenched_fe(c, law, dir); break;
    case RunMode::certify:
      code = run_certify(c, law, dir);
      if (code == 3) return code;  // infeasibility report already written
      break;
    case RunMode::scan_shift: code = run_scan_shift(c, law, dir); break;
    case RunMode::fit_exponent: code = run_fit_exponent(c, law, dir); break;
    case RunMode::fe_profile: code = run_fe_profile(c, law, dir); break;
  }
  dir.write_manifest();
  return code;
}

}  // namespace pinlab
