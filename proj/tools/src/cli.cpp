#include "krigesense_cli/cli.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "krigesense/classifier.hpp"
#include "krigesense/error.hpp"
#include "krigesense/identifiability.hpp"
#include "krigesense/kernel.hpp"
#include "krigesense/kriging.hpp"
#include "krigesense/parallel.hpp"
#include "krigesense/sensitivity.hpp"
#include "krigesense_cli/csv.hpp"

namespace krigesense::cli {
namespace {

using nlohmann::json;

struct WeightsOptions {
  std::size_t dim = 1;
  double rho = 1.0;
  double nu = 0.5;
  double omega2 = 0.001;
};

struct CollinearityOptions {
  std::size_t resolution = 100;
  double rel_step = 1e-5;
  double omega2 = 0.001;
};

struct SobolOptions {
  std::size_t dim = 1;
  std::string response = "weights";
  std::string omega2 = "vary";
  std::size_t n = 1024;
  std::uint64_t seed = 0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes = {400, 800, 1200, 1600, 2000};
  std::size_t iters = 50;
  std::uint64_t seed = 0;
  std::size_t k = 50;
  std::string subset = "compare";
  std::size_t dim = 2;
  std::size_t test_size = 500;
  std::size_t grid_values = 10;
};

// What a subcommand produced: CSV text plus command-specific manifest fields.
struct Outcome {
  std::string csv;
  json summary = json::object();
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", tm);
}

Outcome run_weights(const WeightsOptions& o) {
  const sensitivity::StudyDesign design = sensitivity::StudyDesign::grid(o.dim);
  const kriging::KrigingWeights w =
      kriging::kriging_weights(design.train, design.pred, kernel::ReducedParams(o.rho, o.nu, o.omega2));

  Outcome result;
  CsvWriter csv = o.dim == 1 ? CsvWriter{"location", "weight"} : CsvWriter{"location_x", "location_y", "weight"};
  double total = 0.0;
  for (std::size_t i = 0; i < design.train.size(); ++i) {
    for (double c : design.train.point(i)) {
      csv.field(c);
    }
    csv.field(w.weights[i]).end_row();
    total += w.weights[i];
  }
  result.csv = csv.str();
  result.summary["rows"] = csv.rows();
  result.summary["weight_sum"] = total;
  result.summary["prediction_location"] = design.pred;
  return result;
}

Outcome run_collinearity(const CollinearityOptions& o) {
  identifiability::ScanConfig config;
  config.resolution = o.resolution;
  config.rel_step = o.rel_step;
  config.omega2 = o.omega2;
  const auto cells = identifiability::collinearity_scan(config);

  Outcome result;
  CsvWriter csv{"nu", "rho", "gamma_correlation", "gamma_weights", "band_correlation", "band_weights"};
  json failures = json::array();
  std::size_t collinear_correlation = 0;
  std::size_t collinear_weights = 0;
  for (const auto& cell : cells) {
    csv.field(cell.nu).field(cell.rho);
    cell.gamma_correlation ? csv.field(*cell.gamma_correlation) : csv.empty();
    cell.gamma_weights ? csv.field(*cell.gamma_weights) : csv.empty();
    cell.band_correlation ? csv.field(identifiability::to_string(*cell.band_correlation)) : csv.empty();
    cell.band_weights ? csv.field(identifiability::to_string(*cell.band_weights)) : csv.empty();
    csv.end_row();
    if (!cell.error.empty()) {
      failures.push_back({{"nu", cell.nu}, {"rho", cell.rho}, {"error", cell.error}});
    }
    collinear_correlation += cell.band_correlation == identifiability::Band::collinear ? 1 : 0;
    collinear_weights += cell.band_weights == identifiability::Band::collinear ? 1 : 0;
  }
  result.csv = csv.str();
  result.summary["cells"] = cells.size();
  result.summary["collinear_cells_correlation"] = collinear_correlation;
  result.summary["collinear_cells_weights"] = collinear_weights;
  result.summary["failed_cells"] = failures;
  return result;
}

Outcome run_sobol(const SobolOptions& o) {
  sensitivity::StudyConfig config;
  config.grid_dimension = o.dim;
  config.response = o.response == "variance" ? sensitivity::Response::prediction_variance
                                              : sensitivity::Response::weights;
  if (o.omega2 != "vary") {
    config.fixed_omega2 = std::stod(o.omega2);
  }
  config.base_count = o.n;
  config.seed = o.seed;
  const sensitivity::SobolResult r = sensitivity::run_study(config);

  Outcome result;
  CsvWriter csv{"input", "total_index", "percent_share", "bootstrap_halfwidth"};
  for (std::size_t i = 0; i < r.inputs.size(); ++i) {
    csv.field(r.inputs[i]).field(r.total_index[i]).field(r.percent_share[i]).field(r.bootstrap_halfwidth[i]);
    csv.end_row();
  }
  result.csv = csv.str();
  result.summary["evaluations"] = r.evaluations;
  result.summary["response_variance"] = r.variance;
  result.summary["below_noise_floor"] = r.below_noise_floor;
  result.summary["share_bootstrap_halfwidth"] = r.share_bootstrap_halfwidth;
  return result;
}

Outcome run_bench(const BenchOptions& o) {
  classifier::BenchmarkConfig config;
  config.train_sizes = o.sizes;
  config.iterations = o.iters;
  config.seed = o.seed;
  config.k = o.k;
  config.dimension = o.dim;
  config.test_size = o.test_size;
  config.values_per_axis = o.grid_values;
  if (o.subset == "nu") {
    config.subsets = {classifier::Subset::nu_only};
  } else if (o.subset == "nu-rho") {
    config.subsets = {classifier::Subset::nu_rho};
  } else if (o.subset == "all") {
    config.subsets = {classifier::Subset::all};
  }
  const auto trials = classifier::run_benchmark(config);

  Outcome result;
  CsvWriter csv{"subset", "train_size", "iteration", "accuracy", "wall_time_s", "evaluations"};
  for (const auto& t : trials) {
    csv.field(classifier::to_string(t.subset)).field(t.train_size).field(t.iteration).field(t.accuracy);
    csv.field(t.wall_time_s).field(t.evaluations).end_row();
  }
  result.csv = csv.str();
  json summary = json::array();
  for (const auto& s : classifier::summarize(trials)) {
    summary.push_back({{"subset", std::string(classifier::to_string(s.subset))},
                       {"train_size", s.train_size},
                       {"mean_accuracy", s.mean_accuracy},
                       {"mean_wall_time_s", s.mean_wall_time_s},
                       {"evaluations", s.evaluations},
                       {"trials", s.trials}});
  }
  result.summary["by_subset_and_size"] = summary;
  return result;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  file << text;
  if (!file.flush()) {
    throw std::runtime_error("failed writing " + path);
  }
}

std::string manifest_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

void report_error(std::ostream& err, std::string_view kind, std::string_view message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kriging weights, identifiability and sensitivity studies for the Matern covariance", "krigesense"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("krigesense ") + KRIGESENSE_VERSION);

  std::string out_path;
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_path, "CSV output path (stdout if omitted)"); };

  WeightsOptions wo;
  CLI::App* weights = app.add_subcommand("weights", "Kriging weights on the study grid");
  weights->add_option("--dim", wo.dim, "Grid dimension")->check(CLI::IsMember({1, 2}))->capture_default_str();
  weights->add_option("--rho", wo.rho, "Range")->check(CLI::PositiveNumber)->capture_default_str();
  weights->add_option("--nu", wo.nu, "Smoothness")->check(CLI::Range(1e-300, 50.0))->capture_default_str();
  weights->add_option("--omega2", wo.omega2, "Nugget ratio tau2/sigma2")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_out(weights);

  CollinearityOptions co;
  CLI::App* collinearity = app.add_subcommand("collinearity", "Collinearity index scan over (nu, rho)");
  collinearity->add_option("--resolution", co.resolution, "Grid points per axis")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))->capture_default_str();
  collinearity->add_option("--rel-step", co.rel_step, "Relative finite-difference step")
      ->check(CLI::PositiveNumber)->capture_default_str();
  collinearity->add_option("--omega2", co.omega2, "Nugget ratio for the weights output")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  add_out(collinearity);

  SobolOptions so;
  CLI::App* sobol = app.add_subcommand("sobol", "Total-effect Sobol indices for one study row");
  sobol->add_option("--dim", so.dim, "Grid dimension")->check(CLI::IsMember({1, 2}))->capture_default_str();
  sobol->add_option("--response", so.response, "Response")->check(CLI::IsMember({"weights", "variance"}))
      ->capture_default_str();
  sobol->add_option("--omega2", so.omega2, "Fixed nugget ratio, or vary")
      ->check(CLI::IsMember({"0", "0.001", "0.01", "0.1", "vary"}))->capture_default_str();
  sobol->add_option("--n", so.n, "Base sample count")->check(CLI::Range(std::size_t{256}, std::size_t{1} << 24))
      ->capture_default_str();
  sobol->add_option("--seed", so.seed, "Root seed")->capture_default_str();
  add_out(sobol);

  BenchOptions bo;
  CLI::App* bench = app.add_subcommand("classify-bench", "Grid-search classifier benchmark on synthetic data");
  bench->add_option("--sizes", bo.sizes, "Training sizes, comma separated")->delimiter(',')->capture_default_str();
  bench->add_option("--iters", bo.iters, "Iterations")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", bo.seed, "Root seed")->capture_default_str();
  bench->add_option("--k", bo.k, "Nearest neighbours")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--subset", bo.subset, "Searched parameters")
      ->check(CLI::IsMember({"nu", "nu-rho", "all", "compare"}))->capture_default_str();
  bench->add_option("--dim", bo.dim, "Feature dimension")->check(CLI::Range(2, 64))->capture_default_str();
  bench->add_option("--test-size", bo.test_size, "Held-out test points")->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--grid-values", bo.grid_values, "Grid values per searched parameter")
      ->check(CLI::PositiveNumber)->capture_default_str();
  add_out(bench);

  if (args.empty()) {
    err << app.help();
    return usage_error;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return success;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return success;
  } catch (const CLI::CallForVersion&) {
    out << "krigesense " << KRIGESENSE_VERSION << '\n';
    return success;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return usage_error;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();

  json manifest;
  manifest["command"] = command;
  manifest["version"] = KRIGESENSE_VERSION;
  manifest["threads"] = thread_count();
  manifest["started"] = utc_now();
  json flags = json::object();
  for (const CLI::Option* opt : chosen->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") {
      continue;
    }
    const auto values = opt->reduced_results();
    const std::string name = opt->get_lnames().front();
    if (opt->count() > 0) {
      flags[name] = values.size() == 1 ? json(values.front()) : json(values);
    } else {
      flags[name] = opt->get_default_str();
    }
  }
  manifest["flags"] = flags;
  if (command == "sobol") {
    manifest["seed"] = so.seed;
  } else if (command == "classify-bench") {
    manifest["seed"] = bo.seed;
  } else {
    manifest["seed"] = nullptr;
  }

  Outcome outcome;
  try {
    if (command == "weights") {
      outcome = run_weights(wo);
    } else if (command == "collinearity") {
      outcome = run_collinearity(co);
    } else if (command == "sobol") {
      outcome = run_sobol(so);
    } else {
      outcome = run_bench(bo);
    }
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return numerical_failure;
  }
  manifest["summary"] = outcome.summary;
  manifest["finished"] = utc_now();

  try {
    if (out_path.empty()) {
      manifest["outputs"] = {{"csv", "-"}};
      out << outcome.csv;
      err << manifest.dump() << '\n';
    } else {
      const std::string mpath = manifest_path(out_path);
      manifest["outputs"] = {{"csv", out_path}, {"manifest", mpath}};
      write_file(out_path, outcome.csv);
      write_file(mpath, manifest.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    report_error(err, "io", e.what());
    return numerical_failure;
  }
  return success;
}

}  // namespace krigesense::cli
