#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "meanslab/json_io.hpp"
#include "meanslab/posmaps.hpp"

namespace meanslab {

/// Named scalar parameters of a check evaluation (r, q, p, alpha as
/// applicable).
using CheckParams = std::map<std::string, double>;

/// One randomized instance: operands, bounds they were generated against
/// (tight by construction), the mean under test and the positive map for
/// checks that take one. `diagonal` marks commuting instances, whose mean
/// evaluations are cross-checked against entrywise scalar arithmetic.
struct CheckInstance {
  std::uint64_t seed = 0;
  int dim = 2;
  int n = 2;
  SpectralBounds bounds{1.0, 2.0};
  bool diagonal = false;
  NMeanSpec mean;
  PositiveMapSpec map = PositiveMapSpec::identity();
  std::vector<SpdMatrix> matrices;
};

struct CheckReport {
  std::string name;
  CheckParams params;  // parameter point with the worst margin
  double margin = std::numeric_limits<double>::quiet_NaN();
  bool holds = false;
  std::uint64_t seed = 0;
  int dim = 0;
  int n = 0;
  std::map<std::string, double> details;  // margin per sub-inequality
  std::string error;                      // nonempty if the check failed to run
  json artifacts;                         // serialized instance when retained
};

struct HarnessConfig {
  double loewner_tol = 1e-9;  // relative Loewner / norm-slack tolerance
  SolverConfig solver{1e-12, 3000, 1.0};
  bool retain_artifacts = false;
};

/// Registry order is canonical: sandwich, info_monotonicity,
/// reverse_info_mono, imah, abr, ahr, order_interpolation,
/// norm_monotonicity, karcher_ah.
const std::vector<std::string>& check_names();

/// The per-check default parameter grid; constants like K(h,-1) in alpha
/// grids are evaluated against the given bounds.
std::vector<CheckParams> default_param_grid(const std::string& name,
                                            const SpectralBounds& bounds);

/// Deterministic instance generation: dim and n are drawn from the closed
/// ranges, then weights, mean spec, map and operands all derive from `seed`.
CheckInstance make_instance(const std::string& check, int dim_lo, int dim_hi, int n_lo,
                            int n_hi, const SpectralBounds& bounds, std::uint64_t seed);

/// Evaluate one check. Empty params runs the full default grid; the report
/// margin is the minimum over every evaluated sub-inequality and the params
/// field identifies the binding point. Exceptions from solvers are caught
/// and recorded in report.error (holds = false).
CheckReport run_check(const std::string& name, const CheckInstance& instance,
                      const CheckParams& params = {}, const HarnessConfig& cfg = {});

/// Rebuild the instance embedded in an artifact (matrices are taken from the
/// serialized entries, not regenerated) and re-run its binding params.
CheckReport recheck_from_artifact(const json& artifact, const HarnessConfig& cfg = {});

json report_to_json(const CheckReport& report);
json instance_artifact(const std::string& name, const CheckInstance& instance,
                       const CheckParams& binding);

struct SuiteConfig {
  std::vector<std::string> names;  // subset of check_names()
  int trials = 10;                 // instances per check
  int dim_lo = 2, dim_hi = 6;
  int n_lo = 2, n_hi = 5;
  std::vector<SpectralBounds> bounds_set = {SpectralBounds(1, 2), SpectralBounds(0.5, 4),
                                            SpectralBounds(1, 16)};
  std::uint64_t seed = 0;
  int jobs = 1;
  HarnessConfig harness;
  std::string artifact_dir;  // failing instances serialized here when nonempty
};

struct CheckSummary {
  int count = 0;
  int failures = 0;
  int errors = 0;
  double min_margin = std::numeric_limits<double>::infinity();
};

struct SuiteResult {
  std::vector<CheckReport> reports;  // ordered by (requested name, trial)
  std::map<std::string, CheckSummary> summary;
  int total_failures = 0;
  double wall_seconds = 0.0;  // not part of the canonical report body
};

/// Runs trials x param-grid evaluations per check. Per-job seeds derive as
/// mix(mix(master, fnv1a(name)), trial), so reports are bit-identical for
/// identical (names, trials, dims, n, bounds, seed) regardless of `jobs`.
SuiteResult run_suite(const SuiteConfig& cfg);

/// Canonical report body: no timestamps or wall time.
json suite_report_json(const SuiteConfig& cfg, const SuiteResult& result);

std::string suite_summary_csv(const SuiteResult& result);

}  // namespace meanslab
