// cyclic: command-line front end for the cyclic-kernel library.
//
//   cyclic estimate   --samples X.csv --R 20 --point 0,0 [--kernel haar] [--out est.csv]
//   cyclic kernel     --name spline [--points 4096] [--out spline.csv] [--report]
//   cyclic check      --kernel FILE|NAME
//   cyclic solve      --density cauchy --out cauchy_opt
//   cyclic experiment --name theta --seed 7 --out results/
//
// Exit codes: 0 success, 2 I/O failure, 3 invalid input, 4 numerical failure.
// Every subcommand accepts --config FILE.json whose keys are that
// subcommand's long option names; explicit flags take precedence.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cyclic/cyclic.hpp"

namespace fs = std::filesystem;
using namespace cyclic;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

CyclicKernel load_kernel(const std::string& spec) {
  if (is_builtin_name(spec)) return make_builtin(spec);
  if (!fs::exists(spec)) {
    throw IoError("kernel '" + spec + "' is neither a built-in name nor a readable file");
  }
  return read_kernel_tabulation(spec);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string report_text(const CyclicKernel& k, const KernelConstraintReport& r) {
  std::ostringstream os;
  os << "name," << k.name() << '\n'
     << "psi0," << format_double(k.psi0()) << '\n'
     << "normalization," << (k.normalization().kind == NormalizationKind::numeric ? "numeric" : "analytic")
     << '\n'
     << "normalization_scale," << format_double(k.normalization().scale) << '\n'
     << "zero_mean_residual," << format_double(r.zero_mean_residual) << '\n'
     << "line_integral_residual," << format_double(r.line_integral_residual) << '\n'
     << "square_norm," << format_double(r.square_norm) << '\n'
     << "passed," << (r.passed ? "true" : "false") << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string samples, kernel = "fourier", query, point, out;
  double R = 0.0;
  bool clip = false, header = false;
  unsigned threads = 1;
};

int run_estimate(const EstimateArgs& a) {
  if (a.query.empty() == a.point.empty()) {
    throw ValidationError("estimate: give exactly one of --query or --point");
  }
  const EstimatorConfig cfg{load_kernel(a.kernel), a.R};
  cfg.validate();
  const SampleMatrix s = read_samples(a.samples, a.header);
  std::vector<std::vector<double>> grid;
  if (!a.point.empty()) {
    grid.push_back(parse_row(a.point, "--point"));
  } else {
    grid = read_csv(a.query, a.header).rows;
  }
  for (const auto& y : grid) {
    if (y.size() != s.d()) {
      throw ValidationError("query points have dimension " + std::to_string(y.size()) +
                            " but samples have " + std::to_string(s.d()));
    }
  }
  auto est = estimate_grid(s, cfg, grid, a.threads);
  if (a.clip) {
    for (auto& v : est) v = std::max(v, 0.0);
  }

  std::ostringstream os;
  for (std::size_t j = 0; j < s.d(); ++j) os << 'y' << j + 1 << ',';
  os << "estimate\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (double v : grid[i]) os << format_double(v) << ',';
    os << format_double(est[i]) << '\n';
  }
  if (a.out.empty()) {
    std::cout << os.str();
  } else {
    write_file_atomic(a.out, os.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// kernel / check

struct KernelArgs {
  std::string name, out;
  long points = static_cast<long>(kTabulationSize);
  bool report = false;
};

int run_kernel(const KernelArgs& a) {
  if (a.points < 2) throw ValidationError("--points must be at least 2");
  const CyclicKernel k = load_kernel(a.name);
  const std::string table = kernel_tabulation_csv(k, static_cast<std::size_t>(a.points));
  if (a.report) std::cout << report_text(k, check_constraints(k));
  if (!a.out.empty()) {
    write_file_atomic(a.out, table);
  } else if (!a.report) {
    std::cout << table;
  }
  return 0;
}

int run_check(const std::string& kernel) {
  const CyclicKernel k = load_kernel(kernel);
  const auto r = check_constraints(k);
  std::cout << report_text(k, r);
  if (!r.passed) {
    std::cerr << "error: kernel '" << k.name() << "' violates the constraints\n";
    return kExitValidation;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// solve

int run_solve(const std::string& density, const std::string& prefix) {
  if (density != "cauchy" && density != "gaussian" && density != "uniform") {
    throw ValidationError("--density must be cauchy, gaussian or uniform");
  }
  const auto sol = solve_optimal_kernel(density_by_name(density));
  const auto report = check_constraints(sol.kernel);
  if (!report.passed) throw NumericError("solver produced a kernel that violates the constraints");
  OutputBatch out;
  out.add(prefix + ".csv", solution_csv(sol));
  out.add(prefix + ".json", json_text(solution_json(sol)));
  out.commit();
  return 0;
}

// ---------------------------------------------------------------------------
// experiment

int run_experiment(const ExperimentSpec& spec, const fs::path& dir, unsigned threads) {
  if (!fs::is_directory(dir)) throw IoError("output directory '" + dir.string() + "' does not exist");
  OutputBatch out;
  auto path = [&](const std::string& file) { return dir / (spec.name + "_" + file); };
  nlohmann::ordered_json summary;
  summary["spec"] = spec_json(spec);

  if (spec.name == "theta") {
    const auto r = run_theta_experiment(spec, threads);
    summary.update(replication_json(r));
    out.add(path("histogram.csv"), histogram_csv(r.histogram));
    out.add(path("estimates.csv"), estimates_csv({"theta_hat"}, {&r.estimates}));
  } else if (spec.name == "banana") {
    const auto r = run_banana_experiment(spec, threads);
    summary.update(replication_json(r.fourier));
    summary["truth"] = r.truth;
    summary["bias"] = r.fourier.mean - r.truth;
    auto base = replication_json(r.baseline);
    base["bias"] = r.baseline.mean - r.truth;
    summary["baseline"] = base;
    out.add(path("histogram.csv"), histogram_csv(r.fourier.histogram));
    out.add(path("histogram_baseline.csv"), histogram_csv(r.baseline.histogram));
    out.add(path("estimates.csv"),
            estimates_csv({"fourier", "baseline"}, {&r.fourier.estimates, &r.baseline.estimates}));
  } else if (spec.name == "variance") {
    const auto t = run_variance_comparison(spec, threads);
    std::ostringstream table;
    table << "kernel,mean,empirical_var,n_var,predicted_n_var,ratio\n";
    auto rows = nlohmann::ordered_json::array();
    std::vector<std::string> names;
    std::vector<const std::vector<double>*> series;
    for (const auto& row : t.rows) {
      table << row.kernel << ',' << format_double(row.mean) << ',' << format_double(row.empirical_var) << ','
            << format_double(row.n_var) << ',' << format_double(row.predicted_n_var) << ','
            << format_double(row.ratio) << '\n';
      auto j = replication_json(row.result);
      j["kernel"] = row.kernel;
      j["empirical_var"] = row.empirical_var;
      j["n_var"] = row.n_var;
      j["predicted_n_var"] = row.predicted_n_var;
      j["ratio"] = row.ratio;
      rows.push_back(j);
      names.push_back(row.kernel);
      series.push_back(&row.result.estimates);
      out.add(path("histogram_" + row.kernel + ".csv"), histogram_csv(row.result.histogram));
    }
    summary["table"] = rows;
    out.add(path("table.csv"), table.str());
    out.add(path("estimates.csv"), estimates_csv(names, series));
  } else if (spec.name == "convergence") {
    const auto t = run_convergence_experiment(spec, threads);
    std::ostringstream table;
    table << "kernel,R,bias\n";
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      table << row.kernel << ',' << format_double(row.R) << ',' << format_double(row.bias) << '\n';
      rows.push_back({{"kernel", row.kernel}, {"R", row.R}, {"bias", row.bias}});
    }
    nlohmann::ordered_json dec;
    for (std::size_t k = 0; k < t.kernels.size(); ++k) dec[t.kernels[k]] = static_cast<bool>(t.decreasing[k]);
    summary["table"] = rows;
    summary["decreasing"] = dec;
    out.add(path("table.csv"), table.str());
  }
  out.add(path("summary.json"), json_text(summary));
  out.commit();
  return 0;
}

// ---------------------------------------------------------------------------
// --config support: the file's entries become flags placed before the user's
// own, and every option keeps its last value.

std::string find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

std::vector<std::string> config_args(const std::string& path, const CLI::App& sub) {
  const auto j = read_json(path);
  if (!j.is_object()) throw ValidationError("config '" + path + "' must hold a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config" || key == "help") {
      throw ValidationError("config '" + path + "': unknown key '" + key + "' for subcommand " +
                            sub.get_name());
    }
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) text += ',';
        text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
      }
    } else if (value.is_number()) {
      text = value.dump();
    } else {
      throw ValidationError("config '" + path + "': unsupported value for '" + key + "'");
    }
    args.push_back("--" + key);
    args.push_back(text);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyclic-kernel density estimation, optimal kernels and replication experiments"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config;

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Evaluate the estimator at query points");
  est->add_option("--samples", ea.samples, "CSV of observations, one per row")->required();
  est->add_option("--kernel", ea.kernel, "Built-in kernel name or x,phi tabulation file");
  est->add_option("--R", ea.R, "Smoothing parameter")->required();
  est->add_option("--query", ea.query, "CSV of query points");
  est->add_option("--point", ea.point, "Single query point, comma separated");
  est->add_flag("--clip", ea.clip, "Floor negative estimates at zero");
  est->add_flag("--header", ea.header, "Skip the first line of input CSVs");
  est->add_option("--out", ea.out, "Output CSV (default: standard output)");
  est->add_option("--threads", ea.threads, "Worker threads, 0 = all cores");

  KernelArgs ka;
  auto* ker = app.add_subcommand("kernel", "Tabulate a kernel and report its constraints");
  ker->add_option("--name", ka.name, "Built-in kernel name or tabulation file")->required();
  ker->add_option("--points", ka.points, "Number of tabulation points");
  ker->add_option("--out", ka.out, "Output CSV");
  ker->add_flag("--report", ka.report, "Print constraint residuals and square norm");

  std::string check_kernel;
  auto* chk = app.add_subcommand("check", "Check the kernel constraints");
  chk->add_option("--kernel", check_kernel, "Built-in kernel name or tabulation file")->required();

  std::string density, prefix;
  auto* sol = app.add_subcommand("solve", "Solve for the variance-optimal kernel under a density");
  sol->add_option("--density", density, "cauchy, gaussian or uniform")->required();
  sol->add_option("--out", prefix, "Output prefix for PREFIX.csv and PREFIX.json")->required();

  std::string exp_name, out_dir, r_list, kernel_list, exp_kernel, exp_density;
  std::uint64_t seed = ExperimentSpec{}.seed;
  long n = 0, reps = 0;
  double R = 0.0, theta0 = 0.0, sigma1 = 0.0, b = 0.0, y = 0.0;
  unsigned threads = 1;
  auto* exp = app.add_subcommand("experiment", "Run a seeded replication experiment");
  exp->add_option("--name", exp_name, "theta, banana, variance or convergence")->required();
  exp->add_option("--seed", seed, "Random seed");
  exp->add_option("--n", n, "Sample size per replication");
  exp->add_option("--R", R, "Smoothing parameter");
  exp->add_option("--reps", reps, "Number of replications");
  exp->add_option("--theta0", theta0, "theta: true parameter");
  exp->add_option("--kernel", exp_kernel, "theta: kernel");
  exp->add_option("--sigma1", sigma1, "banana: sd of the first coordinate");
  exp->add_option("--b", b, "banana: curvature");
  exp->add_option("--density", exp_density, "variance, convergence: data density");
  exp->add_option("--y", y, "variance, convergence: evaluation point");
  exp->add_option("--R-list", r_list, "convergence: comma separated R values");
  exp->add_option("--kernels", kernel_list, "variance, convergence: comma separated kernels");
  exp->add_option("--out", out_dir, "Output directory")->required();
  exp->add_option("--threads", threads, "Worker threads, 0 = all cores");

  for (auto* sub : {est, ker, chk, sol, exp}) {
    sub->add_option("--config", config, "JSON file with option values");
  }

  try {
    // Splice config entries in right after the subcommand name.
    std::vector<std::string> args(argv + 1, argv + argc);
    const std::string cfg_path = find_config(argc, argv);
    if (!cfg_path.empty() && !args.empty()) {
      CLI::App* sub = nullptr;
      for (auto* s : {est, ker, chk, sol, exp}) {
        if (s->get_name() == args[0]) sub = s;
      }
      if (sub != nullptr) {
        const auto extra = config_args(cfg_path, *sub);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
      }
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitValidation;
    }

    if (*est) return run_estimate(ea);
    if (*ker) return run_kernel(ka);
    if (*chk) return run_check(check_kernel);
    if (*sol) return run_solve(density, prefix);
    if (*exp) {
      ExperimentSpec spec;
      try {
        spec = default_spec(exp_name);
      } catch (const ValidationError&) {
        std::cerr << exp->help();
        throw;
      }
      auto given = [&](const char* flag) { return exp->get_option(flag)->count() > 0; };
      spec.seed = seed;
      if (given("--n")) {
        if (n < 1) throw ValidationError("--n must be at least 1");
        spec.n = static_cast<std::size_t>(n);
      }
      if (given("--reps")) {
        if (reps < 1) throw ValidationError("--reps must be at least 1");
        spec.reps = static_cast<std::size_t>(reps);
      }
      if (given("--R")) spec.R = R;
      if (given("--theta0")) spec.theta0 = theta0;
      if (given("--kernel")) spec.kernel = exp_kernel;
      if (given("--sigma1")) spec.banana.sigma1 = sigma1;
      if (given("--b")) spec.banana.b = b;
      if (given("--density")) spec.density = exp_density;
      if (given("--y")) spec.y = y;
      if (!r_list.empty()) {
        spec.R_list.clear();
        for (const auto& v : split_list(r_list)) spec.R_list.push_back(parse_double(v, "--R-list"));
      }
      if (!kernel_list.empty()) spec.kernels = split_list(kernel_list);
      return run_experiment(spec, out_dir, threads);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
