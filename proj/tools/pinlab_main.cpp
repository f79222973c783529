#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pinlab/config.hpp"
#include "pinlab/errors.hpp"

namespace {

using nlohmann::json;

// flag storage shared by the subcommands; only the one that parsed runs
struct Flags {
  double alpha = 1.5;
  std::string slow = "constant";
  double slow_b = 0.0;
  std::uint64_t n_max = 65536;
  double tol = 1e-8;
  std::uint64_t cutoff = 1'000'000;
  std::string disorder = "gaussian";
  std::uint64_t seed = 0;
  std::uint64_t replicas = 200;
  std::uint64_t workers = 1;
  std::string out;

  double h = 0.0, beta = 0.0, gamma = 0.0;
  std::uint64_t k = 0, n = 0, k_cap = 20000;
  double a = 0.0, a_max = 1.0, epsilon = 0.0;
  std::string scase, backend = "holder", schedule, scan_path;
  std::vector<double> beta_grid, h_grid, lambda;
  bool verify = false;
};

struct CommonOpts {
  CLI::Option* alpha;
  CLI::Option* slow;
  CLI::Option* slow_b;
  CLI::Option* n_max;
  CLI::Option* tol;
  CLI::Option* cutoff;
  CLI::Option* disorder;
  CLI::Option* seed;
  CLI::Option* replicas;
  CLI::Option* workers;
  CLI::Option* out;
};

CommonOpts add_common(CLI::App* sub, Flags& f) {
  // long-only help so --h stays available for the pinning strength
  sub->set_help_flag("--help", "print this help and exit");
  CommonOpts o;
  o.alpha = sub->add_option("--alpha", f.alpha, "tail exponent of the law");
  o.slow = sub->add_option("--slow", f.slow,
                           "slowly varying factor: constant | log_power");
  o.slow_b = sub->add_option("--slow-b", f.slow_b,
                             "exponent b of (log(1+n))^b");
  o.n_max = sub->add_option("--n-max", f.n_max, "dense law table length");
  o.tol = sub->add_option("--tol", f.tol, "normalization bracket tolerance");
  o.cutoff = sub->add_option("--law-cutoff", f.cutoff,
                             "series cutoff for the normalization");
  o.disorder = sub->add_option("--disorder", f.disorder,
                               "gaussian | rademacher");
  o.seed = sub->add_option("--seed", f.seed, "master seed");
  o.replicas = sub->add_option("--replicas", f.replicas, "replica count");
  o.workers = sub->add_option("--workers", f.workers,
                              "worker threads (never changes results)");
  o.out = sub->add_option("--out", f.out, "output root directory");
  return o;
}

void fill_common(json& j, const Flags& f, const CommonOpts& o) {
  json law;
  if (o.alpha->count()) law["alpha"] = f.alpha;
  if (o.slow->count()) law["slow"] = f.slow;
  if (o.slow_b->count()) law["slow_b"] = f.slow_b;
  if (o.n_max->count()) law["n_max"] = f.n_max;
  if (o.tol->count()) law["tol"] = f.tol;
  if (o.cutoff->count()) law["cutoff"] = f.cutoff;
  if (!law.empty()) j["law"] = law;
  if (o.disorder->count()) j["disorder"] = f.disorder;
  if (o.seed->count()) j["seed"] = f.seed;
  if (o.replicas->count()) j["replicas"] = f.replicas;
  if (o.workers->count()) j["workers"] = f.workers;
  if (o.out->count()) j["out_root"] = f.out;
}

int dispatch(const json& j) {
  pinlab::RunConfig c = pinlab::config_from_json(j);
  int code = pinlab::run(c);
  std::cout << "artifacts: " << pinlab::run_directory(c) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for disordered pinning on heavy-tailed "
               "renewals"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "run config JSON file");

  Flags f;
  json built;
  bool have_sub = false;

  auto wire = [&](const char* name, const char* desc, auto extra) {
    CLI::App* sub = app.add_subcommand(name, desc);
    CommonOpts common = add_common(sub, f);
    auto opts = extra(sub);
    sub->callback([&, name, common, opts] {
      json j;
      j["mode"] = name;
      fill_common(j, f, common);
      opts.fill(j, f);
      built = j;
      have_sub = true;
    });
    return sub;
  };

  struct NoExtra {
    void fill(json&, const Flags&) const {}
  };
  wire("law-info", "normalization constant, mass bracket, law table",
       [](CLI::App*) { return NoExtra{}; });

  struct PureOpts {
    CLI::Option *h, *n, *verify;
    void fill(json& j, const Flags& f) const {
      j["h"] = f.h;
      if (n->count()) j["n"] = f.n;
      if (verify->count()) j["verify"] = f.verify;
    }
  };
  wire("pure-solve", "free energy of the pure model at one pinning strength",
       [&](CLI::App* sub) {
         PureOpts o;
         o.h = sub->add_option("--h", f.h, "pinning strength")->required();
         o.n = sub->add_option("--n", f.n, "log-partition curve horizon");
         o.verify = sub->add_flag("--verify", f.verify,
                                  "cross-check the root against a DP slope");
         return o;
       });

  struct RenewalOpts {
    CLI::Option* n;
    void fill(json& j, const Flags& f) const {
      if (n->count()) j["n"] = f.n;
    }
  };
  wire("renewal-check", "mass renewal table, sampler, asymptotic diagnostics",
       [&](CLI::App* sub) {
         RenewalOpts o;
         o.n = sub->add_option("--n", f.n, "horizon");
         return o;
       });

  struct QfOpts {
    CLI::Option *beta, *h, *n;
    void fill(json& j, const Flags& f) const {
      j["beta"] = f.beta;
      j["h"] = f.h;
      if (n->count()) j["n"] = f.n;
    }
  };
  wire("quenched-fe", "Monte Carlo quenched free energy at one (beta, h)",
       [&](CLI::App* sub) {
         QfOpts o;
         o.beta = sub->add_option("--beta", f.beta, "disorder strength")
                      ->required();
         o.h = sub->add_option("--h", f.h, "pinning strength")->required();
         o.n = sub->add_option("--n", f.n, "system size");
         return o;
       });

  struct CertOpts {
    CLI::Option *beta, *h, *k, *gamma, *backend, *schedule, *lambda, *scase,
        *a, *epsilon, *k_cap;
    void fill(json& j, const Flags& f) const {
      j["beta"] = f.beta;
      if (h->count()) j["h"] = f.h;
      if (k->count()) j["k"] = f.k;
      if (gamma->count()) j["gamma"] = f.gamma;
      if (backend->count()) j["backend"] = f.backend;
      if (schedule->count()) j["schedule"] = f.schedule;
      if (lambda->count()) j["lambda"] = f.lambda;
      if (scase->count()) j["case"] = f.scase;
      if (a->count()) j["a"] = f.a;
      if (epsilon->count()) j["epsilon"] = f.epsilon;
      if (k_cap->count()) j["k_cap"] = f.k_cap;
    }
  };
  wire("certify", "fractional-moment delocalization certificate",
       [&](CLI::App* sub) {
         CertOpts o;
         o.beta = sub->add_option("--beta", f.beta, "disorder strength")
                      ->required();
         o.h = sub->add_option("--h", f.h, "pinning strength (manual mode)");
         o.k = sub->add_option("--k", f.k, "coarse-graining cutoff");
         o.gamma = sub->add_option("--gamma", f.gamma, "fractional power");
         o.backend = sub->add_option("--backend", f.backend,
                                     "exact | holder | mc");
         o.schedule = sub->add_option(
             "--schedule", f.schedule,
             "tilt schedule: zero | inv_sqrt | inv_sqrt_jlogj | explicit");
         o.lambda = sub->add_option("--lambda", f.lambda,
                                    "explicit tilt values (one per j)")
                        ->delimiter(',');
         o.scase = sub->add_option(
             "--case", f.scase,
             "theorem construction: alpha_gt1 | alpha_half_one | alpha_half");
         o.a = sub->add_option("--a", f.a, "shift amplitude (construction)");
         o.epsilon = sub->add_option("--epsilon", f.epsilon,
                                     "exponent slack (construction)");
         o.k_cap = sub->add_option("--k-cap", f.k_cap, "cutoff resource cap");
         return o;
       });

  struct ScanOptsCli {
    CLI::Option *scase, *beta_grid, *a_max, *epsilon, *k_cap, *backend;
    void fill(json& j, const Flags& f) const {
      if (scase->count()) j["case"] = f.scase;
      if (beta_grid->count()) j["beta_grid"] = f.beta_grid;
      if (a_max->count()) j["a_max"] = f.a_max;
      if (epsilon->count()) j["epsilon"] = f.epsilon;
      if (k_cap->count()) j["k_cap"] = f.k_cap;
      if (backend->count()) j["backend"] = f.backend;
    }
  };
  auto add_scan_opts = [&](CLI::App* sub) {
    ScanOptsCli o;
    o.scase = sub->add_option(
        "--case", f.scase,
        "theorem construction: alpha_gt1 | alpha_half_one | alpha_half");
    o.beta_grid =
        sub->add_option("--beta-grid", f.beta_grid, "disorder strengths")
            ->delimiter(',');
    o.a_max = sub->add_option("--a-max", f.a_max, "largest amplitude tried");
    o.epsilon = sub->add_option("--epsilon", f.epsilon, "exponent slack");
    o.k_cap = sub->add_option("--k-cap", f.k_cap, "cutoff resource cap");
    o.backend = sub->add_option("--backend", f.backend,
                                "exact | holder | mc");
    return o;
  };
  wire("scan-shift", "certified critical-shift lower bounds across beta",
       add_scan_opts);

  struct FitOpts {
    ScanOptsCli scan;
    CLI::Option* scan_path;
    void fill(json& j, const Flags& f) const {
      scan.fill(j, f);
      if (scan_path->count()) j["scan_path"] = f.scan_path;
    }
  };
  wire("fit-exponent", "shift-exponent fit from a scan",
       [&](CLI::App* sub) {
         FitOpts o;
         o.scan = add_scan_opts(sub);
         o.scan_path =
             sub->add_option("--scan", f.scan_path, "stored scan.json path");
         return o;
       });

  struct FeOpts {
    CLI::Option *beta, *h_grid, *n;
    void fill(json& j, const Flags& f) const {
      j["beta"] = f.beta;
      j["h_grid"] = f.h_grid;
      if (n->count()) j["n"] = f.n;
    }
  };
  wire("fe-profile", "quenched vs annealed free energy over an h grid",
       [&](CLI::App* sub) {
         FeOpts o;
         o.beta = sub->add_option("--beta", f.beta, "disorder strength")
                      ->required();
         o.h_grid = sub->add_option("--h-grid", f.h_grid, "pinning strengths")
                        ->delimiter(',')
                        ->required();
         o.n = sub->add_option("--n", f.n, "system size");
         return o;
       });

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) {
      if (have_sub) {
        std::cerr << "--config and a subcommand are mutually exclusive\n";
        return 2;
      }
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "cannot open config file '" << config_path << "'\n";
        return 2;
      }
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        std::cerr << "config is not valid JSON: " << e.what() << "\n";
        return 2;
      }
      return dispatch(j);
    }
    if (!have_sub) {
      std::cerr << app.help() << "\n";
      return 2;
    }
    return dispatch(built);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pinlab::ValidationError& e) {
    for (const auto& item : e.items) std::cerr << "invalid: " << item << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return 2;
  } catch (const pinlab::ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what();
    if (e.required > 0.0) std::cerr << " (needs about " << e.required << ")";
    std::cerr << "\n";
    return 3;
  } catch (const pinlab::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
