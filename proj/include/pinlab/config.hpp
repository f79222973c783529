#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pinlab/scan.hpp"

namespace pinlab {

enum class RunMode {
  law_info,
  pure_solve,
  renewal_check,
  quenched_fe,
  certify,
  scan_shift,
  fit_exponent,
  fe_profile,
};

std::string_view to_string(RunMode m);
RunMode run_mode_from(const std::string& s);  // throws ValidationError

// one declarative run: a law, a disorder, a mode and its parameters.
// out_root and workers steer where and how fast, never what — both are
// excluded from the canonical form and from the config hash.
struct RunConfig {
  RunMode mode = RunMode::law_info;
  LawSpec law{};
  DisorderKind disorder = DisorderKind::gaussian;

  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t replicas = 200;
  std::size_t workers = 1;
  std::string out_root;  // empty: environment override, then "runs"

  double h = 0.0;
  bool h_set = false;
  double beta = 0.0;
  bool beta_set = false;
  double gamma = 0.0;
  bool gamma_set = false;
  std::size_t k = 0;  // 0 = unset
  std::size_t n = 0;  // horizon; 0 = mode default

  double a = 0.0;  // construction amplitude (certify with a case)
  double a_max = 1.0;
  double epsilon = 0.0;
  bool epsilon_set = false;
  bool case_set = false;
  ScanCase scase = ScanCase::alpha_gt1;
  ABackend backend = ABackend::holder;
  LambdaSchedule schedule = LambdaSchedule::zero();
  bool schedule_set = false;
  std::size_t k_cap = kDefaultKCap;

  std::vector<double> beta_grid;
  std::vector<double> h_grid;
  std::string scan_path;  // fit on a stored scan instead of re-running
  bool verify = false;    // pure-solve: cross-check the root against a DP slope
};

RunConfig config_from_json(const nlohmann::json& j);
// canonical form: sorted keys, only fields the mode consumes, no
// workers/out_root; hashing this gives the run directory name
nlohmann::json config_to_json(const RunConfig& c);
std::string config_hash(const RunConfig& c);

// every reason the config cannot run, each naming the offending field by
// JSON pointer; empty iff runnable
std::vector<std::string> validate(const RunConfig& c);

// where run() will put artifacts: <out_root>/<mode>-<hash>; the PINLAB_OUT
// environment variable overrides out_root
std::string run_directory(const RunConfig& c);

// executes the run, writes artifacts + manifest under
// <out_root>/<mode>-<hash>/; returns the process exit status
int run(const RunConfig& c);

}  // namespace pinlab
