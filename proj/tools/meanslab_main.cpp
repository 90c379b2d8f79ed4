#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "meanslab/constants.hpp"
#include "meanslab/harness.hpp"
#include "meanslab/json_io.hpp"

namespace {

using meanslab::json;

int run_compute(const std::string& job_path) {
  json j;
  try {
    if (job_path.empty() || job_path == "-") {
      j = json::parse(std::cin);
    } else {
      std::ifstream in(job_path);
      if (!in) {
        std::cerr << "error: cannot open job file '" << job_path << "'\n";
        return 1;
      }
      j = json::parse(in);
    }
  } catch (const json::parse_error& e) {
    std::cerr << "error: job is not valid JSON: " << e.what() << "\n";
    return 1;
  }

  meanslab::ComputeJob job;
  try {
    job = meanslab::compute_job_from_json(j);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    meanslab::MeanResult res = [&]() -> meanslab::MeanResult {
      switch (job.op) {
        case meanslab::ComputeJob::Op::karcher:
          return meanslab::karcher_mean(job.mean.weights, job.matrices, job.solver);
        case meanslab::ComputeJob::Op::log_euclidean:
          return {meanslab::log_euclidean(job.mean.weights, job.matrices),
                  meanslab::SolveTrace{0, 0.0, true}};
        case meanslab::ComputeJob::Op::power: {
          const double a = job.power_alpha;
          if (a == 0.0 || a < -1.0 || a > 1.0)
            throw meanslab::ValidationError(
                "job.mean.alpha: power mean needs alpha in [-1, 1] \\ {0}");
          meanslab::NMeanSpec spec{meanslab::BaseMean::arithmetic, job.mean.weights,
                                   meanslab::MeanTwoSpec::geometric(std::abs(a))};
          if (a > 0.0) return meanslab::deformed_mean(spec, job.matrices, job.solver);
          std::vector<meanslab::SpdMatrix> inverses;
          inverses.reserve(job.matrices.size());
          for (const auto& m : job.matrices) inverses.push_back(meanslab::mat_inv(m));
          meanslab::MeanResult inner = meanslab::deformed_mean(spec, inverses, job.solver);
          return {meanslab::mat_inv(inner.value), inner.trace};
        }
        case meanslab::ComputeJob::Op::nmean:
          return meanslab::evaluate_nmean(job.mean, job.matrices, job.solver);
      }
      throw meanslab::ValidationError("unknown op");
    }();
    json out{{"result", meanslab::matrix_to_json(res.value)},
             {"trace", meanslab::trace_to_json(res.trace)}};
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const meanslab::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    json out{{"trace", meanslab::trace_to_json(e.trace)}};
    std::cout << out.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_const(const std::string& name, const std::vector<double>& args) {
  try {
    double value = 0.0;
    if (name == "kantorovich" && args.size() == 2) {
      value = meanslab::kantorovich(args[0], args[1]);
    } else if (name == "specht" && args.size() == 1) {
      value = meanslab::specht(args[0]);
    } else if (name == "beta" && args.size() == 3) {
      value = meanslab::beta(args[0], args[1], args[2]);
    } else if (name == "gamma" && args.size() == 4) {
      value = meanslab::gamma(args[0], args[1], args[2], args[3]);
    } else {
      std::cerr << "error: expected one of: kantorovich h p | specht h | beta m M alpha | "
                   "gamma m M r alpha\n";
      return 1;
    }
    std::printf("%.15g\n", value);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

bool parse_range(const std::string& text, int& lo, int& hi) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      lo = hi = std::stoi(text);
    } else {
      lo = std::stoi(text.substr(0, colon));
      hi = std::stoi(text.substr(colon + 1));
    }
  } catch (...) {
    return false;
  }
  return lo >= 1 && hi >= lo;
}

struct VerifyOptions {
  std::string suite = "all";
  int trials = 10;
  std::string dim = "2:6";
  std::string n = "2:5";
  double m = 1.0;
  double M = 4.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string report_path;
  std::string csv_path;
  std::string artifact_dir;
  int jobs = 1;
  int max_iter = 3000;
};

int run_verify(const VerifyOptions& opt) {
  meanslab::SuiteConfig cfg;
  if (opt.suite == "all") {
    cfg.names = meanslab::check_names();
  } else {
    std::stringstream ss(opt.suite);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.names.push_back(item);
    }
  }
  if (!parse_range(opt.dim, cfg.dim_lo, cfg.dim_hi)) {
    std::cerr << "error: --dim expects N or LO:HI with 1 <= LO <= HI\n";
    return 1;
  }
  if (!parse_range(opt.n, cfg.n_lo, cfg.n_hi)) {
    std::cerr << "error: --n expects N or LO:HI with 1 <= LO <= HI\n";
    return 1;
  }
  cfg.trials = opt.trials;
  cfg.jobs = opt.jobs;
  cfg.artifact_dir = opt.artifact_dir;
  cfg.harness.solver.max_iter = opt.max_iter;
  cfg.seed = opt.seed;
  if (!opt.seed_given) {
    if (const char* env = std::getenv("MEANSLAB_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
  }
  try {
    cfg.bounds_set = {meanslab::SpectralBounds(opt.m, opt.M)};
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  meanslab::SuiteResult result;
  try {
    result = meanslab::run_suite(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (!opt.report_path.empty()) {
    std::ofstream out(opt.report_path);
    if (!out) {
      std::cerr << "error: cannot write report to '" << opt.report_path << "'\n";
      return 1;
    }
    out << meanslab::suite_report_json(cfg, result).dump(2) << "\n";
  }
  if (!opt.csv_path.empty()) {
    std::ofstream out(opt.csv_path);
    if (!out) {
      std::cerr << "error: cannot write csv to '" << opt.csv_path << "'\n";
      return 1;
    }
    out << meanslab::suite_summary_csv(result);
  }

  std::printf("%-22s %8s %9s %7s %14s\n", "check", "count", "failures", "errors", "min margin");
  for (const auto& [name, s] : result.summary) {
    std::printf("%-22s %8d %9d %7d ", name.c_str(), s.count, s.failures, s.errors);
    if (std::isfinite(s.min_margin))
      std::printf("%14.6e\n", s.min_margin);
    else
      std::printf("%14s\n", "-");
  }
  std::printf("total failures: %d\n", result.total_failures);
  std::printf("# wall time %.2fs (non-canonical)\n", result.wall_seconds);
  return result.total_failures > 0 ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meanslab: positive-definite matrix means, scalar constants, and a randomized "
               "operator-inequality verification suite"};
  app.require_subcommand(1);

  auto* compute = app.add_subcommand("compute", "evaluate a mean job (JSON on stdin or --job)");
  std::string job_path;
  compute->add_option("--job", job_path, "job file path ('-' for stdin)");

  auto* cst = app.add_subcommand("const", "print a scalar constant with 15 significant digits");
  std::string const_name;
  std::vector<double> const_args;
  cst->add_option("name", const_name, "kantorovich | specht | beta | gamma")->required();
  cst->add_option("params", const_args, "numeric parameters");

  auto* verify = app.add_subcommand("verify", "run randomized inequality checks");
  VerifyOptions opt;
  verify->add_option("--suite", opt.suite, "comma-separated check names or 'all'");
  verify->add_option("--trials", opt.trials, "instances per check")->check(CLI::NonNegativeNumber);
  verify->add_option("--dim", opt.dim, "matrix dimension, N or LO:HI");
  verify->add_option("--n", opt.n, "operand count, N or LO:HI");
  verify->add_option("--m", opt.m, "lower spectral bound");
  verify->add_option("--M", opt.M, "upper spectral bound");
  auto* seed_opt = verify->add_option("--seed", opt.seed, "master seed (default MEANSLAB_SEED or 0)");
  verify->add_option("--report", opt.report_path, "write the JSON report here");
  verify->add_option("--csv", opt.csv_path, "write the summary table as CSV");
  verify->add_option("--artifacts", opt.artifact_dir, "directory for failing-instance files");
  verify->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--max-iter", opt.max_iter, "solver iteration cap")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (compute->parsed()) return run_compute(job_path);
  if (cst->parsed()) return run_const(const_name, const_args);
  opt.seed_given = seed_opt->count() > 0;
  return run_verify(opt);
}
