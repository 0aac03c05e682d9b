// SPDX-License-Identifier: Apache-2.0
//
// lapa: location-aware pilot assignment simulator for single-cell massive
// MIMO uplinks under Rician fading.
//
// Subcommands:
//   assign  pilot assignment for one user drop (JSON + T-matrix CSV)
//   sweep   Monte Carlo antenna sweeps (interference metric or sum rate)
//   kernel  pairwise LOS interference vs AoA offset (CSV)
//
// Exit codes: 0 success, 2 usage, 3 validation, 4 runtime.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lapa/lapa.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssignOptions {
  std::string drop_path;
  int random_users = 0;
  int tau = 0;
  std::uint64_t seed = 1;
  std::string scheme = "location-aware";
  std::string matching = "greedy";
  int m_antennas = 20;
  double cell_radius = 1000.0;
  double r_min = 100.0;
  double pathloss_exponent = 3.8;
  double spacing = 0.5;
  std::string k_factor = "3";
  double p_u = 10.0;
  std::string out_path;      // empty -> stdout
  std::string tmatrix_path;  // empty -> not emitted, "-" -> stdout
  std::string report_path;   // empty -> not emitted
};

struct SweepOptions {
  std::string kind;
  std::string config_path;
  std::string manifest_in;
  std::string scheme = "both";
  std::string out_path;
  std::string json_path;
  std::string manifest_out;
  // overrides (applied only when the flag was passed)
  std::uint64_t seed = 0;
  int trials = 0;
  std::string m_sweep;
  int n_users = 0;
  int tau = 0;
  int coherence_t = 0;
  int fades = 0;
  int threads = 0;
  std::string k_factor;
  double p_u = 0.0;
  double pathloss_exponent = 0.0;
  double cell_radius = 0.0;
  double r_min = 0.0;
  double spacing = 0.0;
  std::string detector;
  std::string matching;
};

struct KernelOptions {
  int m_antennas = 20;
  int points = 4001;
  double max_d_theta = lapa::two_pi;
  std::string out_path = "-";
};

lapa::UserDrop resolve_drop(const AssignOptions& opt) {
  if (!opt.drop_path.empty()) return lapa::load_drop_file(opt.drop_path);
  if (opt.random_users < 1)
    throw UsageError("assign: provide --drop FILE or --random-users N");
  lapa::ExperimentConfig gen;
  gen.n_users = opt.random_users;
  gen.cell_radius_m = opt.cell_radius;
  gen.r_min_m = opt.r_min;
  gen.k_factor = lapa::parse_k_factor(opt.k_factor);
  lapa::Rng rng = lapa::Rng::from_key(opt.seed, 0, lapa::StreamTag::drop);
  return lapa::draw_drop(gen, rng);
}

int run_assign(const AssignOptions& opt) {
  const lapa::UserDrop drop = resolve_drop(opt);
  const lapa::CellConfig cell(opt.m_antennas, opt.cell_radius, opt.pathloss_exponent,
                              opt.spacing);
  const lapa::TrainingConfig training(opt.p_u, opt.tau);

  std::optional<lapa::PilotAssignment> assignment;
  if (opt.scheme == "location-aware") {
    const auto policy =
        opt.matching == "optimal" ? lapa::MatchPolicy::optimal : lapa::MatchPolicy::greedy;
    assignment = lapa::assign_location_aware(drop, opt.tau, cell, training, policy);
  } else {
    lapa::Rng rng = lapa::Rng::from_key(opt.seed, 0, lapa::StreamTag::random_assign);
    assignment = lapa::assign_random(drop.size(), opt.tau, rng);
  }

  const std::string json_text = lapa::assignment_to_json(*assignment).dump(2) + "\n";
  if (opt.out_path.empty())
    std::cout << json_text;
  else
    lapa::write_text_file(opt.out_path, json_text);

  if (!opt.tmatrix_path.empty()) {
    const std::string csv = lapa::t_matrix_csv(*assignment);
    if (opt.tmatrix_path == "-")
      std::cout << csv;
    else
      lapa::write_text_file(opt.tmatrix_path, csv);
  }

  const auto report = lapa::total_interference(drop, *assignment, cell, training);
  if (!opt.report_path.empty())
    lapa::write_text_file(opt.report_path,
                          lapa::interference_report_to_json(report).dump(2) + "\n");
  std::fprintf(stderr, "scheme=%s users=%d tau=%d M=%d I_tot=%s%s\n", opt.scheme.c_str(),
               drop.size(), opt.tau, opt.m_antennas, lapa::format_double(report.total).c_str(),
               report.total_db
                   ? (" (" + lapa::format_double(*report.total_db) + " dB)").c_str()
                   : "");
  return 0;
}

void print_summary(const std::string& kind, const lapa::ExperimentConfig& config,
                   const std::vector<lapa::ExperimentRecord>& records) {
  std::printf("kind=%s master_seed=%llu\n", kind.c_str(),
              static_cast<unsigned long long>(config.master_seed));
  std::printf("%6s  %-15s %14s %12s %14s %8s\n", "M", "scheme", "i_tot", "i_tot_db",
              "sum_rate", "trials");
  for (const auto& r : records) {
    const auto cell = [](const std::optional<double>& v) {
      return v ? lapa::format_double(*v) : std::string("-");
    };
    std::printf("%6d  %-15s %14s %12s %14s %8d\n", r.m_antennas, r.scheme.c_str(),
                cell(r.mean_i_tot).c_str(), cell(r.mean_i_tot_db).c_str(),
                cell(r.mean_sum_rate).c_str(), r.trials);
  }
}

int run_sweep(const CLI::App& sub, const SweepOptions& opt) {
  lapa::ExperimentConfig config;
  std::string kind = opt.kind;

  if (!opt.manifest_in.empty()) {
    const auto manifest = lapa::Json::parse(lapa::read_text_file(opt.manifest_in));
    config = lapa::config_from_manifest(manifest);
    if (kind.empty() && manifest.contains("kind")) kind = manifest["kind"].get<std::string>();
  }
  if (!opt.config_path.empty()) lapa::apply_config_file(config, opt.config_path);
  if (kind.empty()) throw UsageError("sweep: --kind is required (interference or rate)");

  if (sub.count("--seed")) config.master_seed = opt.seed;
  if (sub.count("--m-sweep")) config.m_sweep = lapa::parse_int_list(opt.m_sweep);
  if (sub.count("--n-users")) config.n_users = opt.n_users;
  if (sub.count("--tau")) config.tau = opt.tau;
  if (sub.count("--coherence-t")) config.coherence_t = opt.coherence_t;
  if (sub.count("--fades")) config.fading_realizations = opt.fades;
  if (sub.count("--threads")) config.threads = opt.threads;
  if (sub.count("--k-factor")) config.k_factor = lapa::parse_k_factor(opt.k_factor);
  if (sub.count("--p-u")) config.p_u = opt.p_u;
  if (sub.count("--pathloss-exponent")) config.pathloss_exponent = opt.pathloss_exponent;
  if (sub.count("--cell-radius")) config.cell_radius_m = opt.cell_radius;
  if (sub.count("--r-min")) config.r_min_m = opt.r_min;
  if (sub.count("--spacing")) config.antenna_spacing_ratio = opt.spacing;
  if (sub.count("--trials")) {
    if (kind == "interference")
      config.trials_interference = opt.trials;
    else
      config.trials_rate = opt.trials;
  }
  if (sub.count("--detector"))
    config.detector = opt.detector == "zf" ? lapa::Detector::pseudo_inverse_zf
                                           : lapa::Detector::normalized_mf;
  if (sub.count("--matching"))
    config.matching =
        opt.matching == "optimal" ? lapa::MatchPolicy::optimal : lapa::MatchPolicy::greedy;

  config.validate();

  auto records = kind == "interference" ? lapa::run_interference_experiment(config)
                                        : lapa::run_rate_experiment(config);
  if (opt.scheme != "both") {
    std::erase_if(records,
                  [&](const lapa::ExperimentRecord& r) { return r.scheme != opt.scheme; });
  }

  const std::string out_path = opt.out_path.empty() ? "sweep_" + kind + ".csv" : opt.out_path;
  lapa::write_text_file(out_path, lapa::records_to_csv(records, kind, config.master_seed));

  std::map<std::string, std::string> outputs{{"csv", out_path}};
  if (!opt.json_path.empty()) {
    lapa::write_text_file(opt.json_path, lapa::records_to_json(records).dump(2) + "\n");
    outputs["json"] = opt.json_path;
  }
  const std::string manifest_path =
      opt.manifest_out.empty() ? out_path + ".manifest.json" : opt.manifest_out;
  lapa::write_text_file(manifest_path,
                        lapa::make_manifest(kind, config, outputs).dump(2) + "\n");

  print_summary(kind, config, records);
  std::printf("wrote %s and %s\n", out_path.c_str(), manifest_path.c_str());
  return 0;
}

int run_kernel(const KernelOptions& opt) {
  const auto sweep = lapa::kernel_sweep(opt.m_antennas, opt.points, opt.max_d_theta);
  const std::string csv = lapa::kernel_csv(sweep);
  if (opt.out_path == "-" || opt.out_path.empty())
    std::cout << csv;
  else
    lapa::write_text_file(opt.out_path, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"location-aware pilot assignment simulator for massive MIMO uplinks"};
  app.set_version_flag("--version", lapa::version);
  app.require_subcommand(1);

  AssignOptions assign_opt;
  auto* assign = app.add_subcommand(
      "assign", "compute a pilot assignment for a user drop");
  assign->add_option("--drop", assign_opt.drop_path, "drop file (JSON)");
  assign->add_option("--random-users", assign_opt.random_users,
                     "generate a uniform random drop with N users instead of --drop");
  assign->add_option("--tau", assign_opt.tau, "number of orthogonal pilot sequences")
      ->required();
  assign->add_option("--seed", assign_opt.seed, "seed for drop generation / random scheme");
  assign->add_option("--scheme", assign_opt.scheme, "assignment scheme")
      ->check(CLI::IsMember({"location-aware", "random"}));
  assign->add_option("--matching", assign_opt.matching, "tier matching policy")
      ->check(CLI::IsMember({"greedy", "optimal"}));
  assign->add_option("--m", assign_opt.m_antennas, "antenna count used by the metric");
  assign->add_option("--cell-radius", assign_opt.cell_radius, "cell radius in meters");
  assign->add_option("--r-min", assign_opt.r_min, "minimum user distance for random drops");
  assign->add_option("--pathloss-exponent", assign_opt.pathloss_exponent, "pathloss exponent");
  assign->add_option("--spacing", assign_opt.spacing, "antenna spacing in wavelengths");
  assign->add_option("--k-factor", assign_opt.k_factor,
                     "K-factor for random drops (linear, or dB with suffix)");
  assign->add_option("--p-u", assign_opt.p_u, "per-user transmit power (linear)");
  assign->add_option("--out", assign_opt.out_path, "assignment JSON file (default: stdout)");
  assign->add_option("--tmatrix", assign_opt.tmatrix_path,
                     "T-matrix CSV file ('-' for stdout)");
  assign->add_option("--report", assign_opt.report_path,
                     "write the pairwise interference report as JSON");

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo antenna sweep");
  sweep->add_option("--kind", sweep_opt.kind, "experiment kind")
      ->check(CLI::IsMember({"interference", "rate"}));
  auto* config_opt = sweep->add_option("--config", sweep_opt.config_path,
                                       "flat key-value config file");
  sweep->add_option("--from-manifest", sweep_opt.manifest_in,
                    "reproduce a run from its manifest")
      ->excludes(config_opt);
  sweep->add_option("--scheme", sweep_opt.scheme, "emit records for one scheme only")
      ->check(CLI::IsMember({"both", "location-aware", "random"}));
  sweep->add_option("--out", sweep_opt.out_path, "CSV output path");
  sweep->add_option("--json", sweep_opt.json_path, "also write records as JSON");
  sweep->add_option("--manifest", sweep_opt.manifest_out,
                    "manifest path (default: <out>.manifest.json)");
  sweep->add_option("--seed", sweep_opt.seed, "master seed");
  sweep->add_option("--trials", sweep_opt.trials, "trial count for the chosen kind");
  sweep->add_option("--m-sweep", sweep_opt.m_sweep, "comma-separated antenna counts");
  sweep->add_option("--n-users", sweep_opt.n_users, "number of users");
  sweep->add_option("--tau", sweep_opt.tau, "number of pilot sequences");
  sweep->add_option("--coherence-t", sweep_opt.coherence_t, "coherence interval in symbols");
  sweep->add_option("--fades", sweep_opt.fades, "fading realizations per drop (rate kind)");
  sweep->add_option("--threads", sweep_opt.threads, "worker threads (never affects results)");
  sweep->add_option("--k-factor", sweep_opt.k_factor,
                    "Rician K-factor (linear, or dB with suffix)");
  sweep->add_option("--p-u", sweep_opt.p_u, "per-user transmit power (linear)");
  sweep->add_option("--pathloss-exponent", sweep_opt.pathloss_exponent, "pathloss exponent");
  sweep->add_option("--cell-radius", sweep_opt.cell_radius, "cell radius in meters");
  sweep->add_option("--r-min", sweep_opt.r_min, "minimum user distance");
  sweep->add_option("--spacing", sweep_opt.spacing, "antenna spacing in wavelengths");
  sweep->add_option("--detector", sweep_opt.detector, "uplink detector")
      ->check(CLI::IsMember({"mf", "zf"}));
  sweep->add_option("--matching", sweep_opt.matching, "tier matching policy")
      ->check(CLI::IsMember({"greedy", "optimal"}));

  KernelOptions kernel_opt;
  auto* kernel = app.add_subcommand(
      "kernel", "sweep the pairwise LOS interference measure over the AoA offset");
  kernel->add_option("--m", kernel_opt.m_antennas, "antenna count");
  kernel->add_option("--points", kernel_opt.points, "grid points (odd, includes zero)");
  kernel->add_option("--max-dtheta", kernel_opt.max_d_theta, "sweep half-range in radians");
  kernel->add_option("--out", kernel_opt.out_path, "CSV output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
    if (assign->parsed()) return run_assign(assign_opt);
    if (sweep->parsed()) return run_sweep(*sweep, sweep_opt);
    if (kernel->parsed()) return run_kernel(kernel_opt);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
