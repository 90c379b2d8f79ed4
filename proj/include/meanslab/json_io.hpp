#pragma once

#include <json.hpp>

#include "meanslab/meansn.hpp"
#include "meanslab/posmaps.hpp"

namespace meanslab {

using json = nlohmann::json;

// Matrix schema: {"dim": n, "entries": [[...], ...]} with row-major symmetric
// entries. Readers reject asymmetric or non-positive-definite input with a
// diagnostic naming the offending entry or eigenvalue.
json matrix_to_json(const SpdMatrix& a);
SpdMatrix matrix_from_json(const json& j, const std::string& field = "matrix");

json symmetric_to_json(const Eigen::MatrixXd& a);

json weights_to_json(const Weights& w);
Weights weights_from_json(const json& j, const std::string& field = "weights");

// Mean spec schema: {"kind":"geometric","alpha":0.5}, {"kind":"left_trivial"};
// custom means are in-process only and do not serialize.
json mean2_to_json(const MeanTwoSpec& s);
MeanTwoSpec mean2_from_json(const json& j, const std::string& field = "sigma");

// {"base":"arithmetic","sigma":{...}} with sigma optional.
json nmean_to_json(const NMeanSpec& s);
NMeanSpec nmean_from_json(const json& j, const Weights& w, const std::string& field = "mean");

json solver_to_json(const SolverConfig& cfg);
SolverConfig solver_from_json(const json& j, const std::string& field = "solver");

json trace_to_json(const SolveTrace& t);

// Map schema: {"kind":"identity"}, {"kind":"compression","V":[[...],...]},
// {"kind":"pinching","blocks":[[0,1],[2]],"dim":3}, {"kind":"normalized_trace"}.
json posmap_to_json(const PositiveMapSpec& phi);
PositiveMapSpec posmap_from_json(const json& j, const std::string& field = "map");

// CLI compute job. "mean" is either {"base":...,"sigma":...} or one of the
// named forms {"kind":"karcher"}, {"kind":"log_euclidean"},
// {"kind":"power","alpha":a}.
struct ComputeJob {
  enum class Op { nmean, karcher, log_euclidean, power };
  Op op = Op::nmean;
  double power_alpha = 0.5;
  NMeanSpec mean;
  std::vector<SpdMatrix> matrices;
  SolverConfig solver;
};

ComputeJob compute_job_from_json(const json& j);

}  // namespace meanslab
