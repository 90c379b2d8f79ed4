#include "meanslab/json_io.hpp"

#include <sstream>

namespace meanslab {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(field + "." + key, "missing");
  return *it;
}

double need_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

Eigen::MatrixXd rows_from_json(const json& j, int expect_rows, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  if (expect_rows > 0 && rows != expect_rows) {
    std::ostringstream os;
    os << "has " << rows << " rows, expected " << expect_rows;
    fail(field, os.str());
  }
  const json& first = j.at(0);
  if (!first.is_array() || first.empty()) fail(field + "[0]", "expected a non-empty row array");
  const int cols = static_cast<int>(first.size());
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    std::ostringstream rf;
    rf << field << "[" << i << "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail(rf.str(), "row length differs from the first row");
    for (int c = 0; c < cols; ++c)
      out(i, c) = need_number(row.at(static_cast<std::size_t>(c)), rf.str());
  }
  return out;
}

}  // namespace

json matrix_to_json(const SpdMatrix& a) { return symmetric_to_json(a.entries()); }

json symmetric_to_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"dim", a.rows()}, {"entries", std::move(rows)}};
}

SpdMatrix matrix_from_json(const json& j, const std::string& field) {
  const json& jd = need(j, "dim", field);
  if (!jd.is_number_integer() || jd.get<int>() < 1) fail(field + ".dim", "expected a positive integer");
  const int dim = jd.get<int>();
  Eigen::MatrixXd entries = rows_from_json(need(j, "entries", field), dim, field + ".entries");
  if (entries.cols() != dim) fail(field + ".entries", "row length differs from dim");
  try {
    return SpdMatrix(std::move(entries));
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
}

json weights_to_json(const Weights& w) { return json(w.values()); }

Weights weights_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array");
  std::vector<double> w;
  w.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::ostringstream os;
    os << field << "[" << i << "]";
    w.push_back(need_number(j.at(i), os.str()));
  }
  try {
    return Weights(std::move(w));
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
}

json mean2_to_json(const MeanTwoSpec& s) {
  switch (s.kind()) {
    case MeanKind::geometric:
      return json{{"kind", "geometric"}, {"alpha", s.alpha()}};
    case MeanKind::arithmetic:
      return json{{"kind", "arithmetic"}, {"alpha", s.alpha()}};
    case MeanKind::harmonic:
      return json{{"kind", "harmonic"}, {"alpha", s.alpha()}};
    case MeanKind::left_trivial:
      return json{{"kind", "left_trivial"}};
    case MeanKind::custom:
      throw ValidationError("mean2_to_json: custom means are in-process only");
  }
  throw ValidationError("mean2_to_json: unknown kind");
}

MeanTwoSpec mean2_from_json(const json& j, const std::string& field) {
  const json& jk = need(j, "kind", field);
  if (!jk.is_string()) fail(field + ".kind", "expected a string");
  const std::string kind = jk.get<std::string>();
  if (kind == "left_trivial") return MeanTwoSpec::left_trivial();
  if (kind == "geometric" || kind == "arithmetic" || kind == "harmonic") {
    const double alpha = need_number(need(j, "alpha", field), field + ".alpha");
    try {
      if (kind == "geometric") return MeanTwoSpec::geometric(alpha);
      if (kind == "arithmetic") return MeanTwoSpec::arithmetic(alpha);
      return MeanTwoSpec::harmonic(alpha);
    } catch (const std::exception& e) {
      fail(field, e.what());
    }
  }
  fail(field + ".kind", "unknown mean kind '" + kind +
                            "' (expected geometric, arithmetic, harmonic, left_trivial)");
}

json nmean_to_json(const NMeanSpec& s) {
  json out{{"base", s.base == BaseMean::arithmetic ? "arithmetic" : "harmonic"}};
  if (s.deform) out["sigma"] = mean2_to_json(*s.deform);
  return out;
}

NMeanSpec nmean_from_json(const json& j, const Weights& w, const std::string& field) {
  const json& jb = need(j, "base", field);
  if (!jb.is_string()) fail(field + ".base", "expected a string");
  const std::string base = jb.get<std::string>();
  NMeanSpec spec{BaseMean::arithmetic, w, std::nullopt};
  if (base == "harmonic")
    spec.base = BaseMean::harmonic;
  else if (base != "arithmetic")
    fail(field + ".base", "unknown base '" + base + "' (expected arithmetic or harmonic)");
  if (j.contains("sigma")) spec.deform = mean2_from_json(j.at("sigma"), field + ".sigma");
  return spec;
}

json solver_to_json(const SolverConfig& cfg) {
  return json{{"tol", cfg.tol}, {"max_iter", cfg.max_iter}, {"damping", cfg.damping}};
}

SolverConfig solver_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  SolverConfig cfg;
  if (j.contains("tol")) cfg.tol = need_number(j.at("tol"), field + ".tol");
  if (j.contains("max_iter")) {
    if (!j.at("max_iter").is_number_integer()) fail(field + ".max_iter", "expected an integer");
    cfg.max_iter = j.at("max_iter").get<int>();
  }
  if (j.contains("damping")) cfg.damping = need_number(j.at("damping"), field + ".damping");
  if (!(cfg.tol > 0.0)) fail(field + ".tol", "must be > 0");
  if (cfg.max_iter < 1) fail(field + ".max_iter", "must be >= 1");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) fail(field + ".damping", "must lie in (0, 1]");
  return cfg;
}

json trace_to_json(const SolveTrace& t) {
  return json{{"iterations", t.iterations}, {"residual", t.residual}, {"converged", t.converged}};
}

json posmap_to_json(const PositiveMapSpec& phi) {
  switch (phi.kind()) {
    case PositiveMapSpec::Kind::identity:
      return json{{"kind", "identity"}};
    case PositiveMapSpec::Kind::normalized_trace:
      return json{{"kind", "normalized_trace"}};
    case PositiveMapSpec::Kind::compression: {
      json rows = json::array();
      const Eigen::MatrixXd& v = phi.isometry();
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < v.cols(); ++j) row.push_back(v(i, j));
        rows.push_back(std::move(row));
      }
      return json{{"kind", "compression"}, {"V", std::move(rows)}};
    }
    case PositiveMapSpec::Kind::pinching: {
      int dim = 0;
      for (const auto& b : phi.blocks()) dim += static_cast<int>(b.size());
      return json{{"kind", "pinching"}, {"blocks", phi.blocks()}, {"dim", dim}};
    }
  }
  throw ValidationError("posmap_to_json: unknown kind");
}

PositiveMapSpec posmap_from_json(const json& j, const std::string& field) {
  const json& jk = need(j, "kind", field);
  if (!jk.is_string()) fail(field + ".kind", "expected a string");
  const std::string kind = jk.get<std::string>();
  try {
    if (kind == "identity") return PositiveMapSpec::identity();
    if (kind == "normalized_trace") return PositiveMapSpec::normalized_trace();
    if (kind == "compression")
      return PositiveMapSpec::compression(rows_from_json(need(j, "V", field), 0, field + ".V"));
    if (kind == "pinching") {
      const json& jd = need(j, "dim", field);
      if (!jd.is_number_integer()) fail(field + ".dim", "expected an integer");
      const json& jb = need(j, "blocks", field);
      if (!jb.is_array()) fail(field + ".blocks", "expected an array of index arrays");
      std::vector<std::vector<int>> blocks;
      for (const auto& b : jb) blocks.push_back(b.get<std::vector<int>>());
      return PositiveMapSpec::pinching(std::move(blocks), jd.get<int>());
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    fail(field, e.what());
  }
  fail(field + ".kind", "unknown map kind '" + kind + "'");
}

ComputeJob compute_job_from_json(const json& j) {
  ComputeJob job;
  job.matrices.clear();
  const json& jm = need(j, "matrices", "job");
  if (!jm.is_array() || jm.empty()) fail("job.matrices", "expected a non-empty array");
  for (std::size_t i = 0; i < jm.size(); ++i) {
    std::ostringstream os;
    os << "job.matrices[" << i << "]";
    job.matrices.push_back(matrix_from_json(jm.at(i), os.str()));
  }
  Weights w = weights_from_json(need(j, "weights", "job"), "job.weights");
  if (w.size() != job.matrices.size())
    fail("job.weights", "length differs from job.matrices");
  if (j.contains("solver")) job.solver = solver_from_json(j.at("solver"), "job.solver");

  const json& mean = need(j, "mean", "job");
  if (mean.contains("kind")) {
    const json& jk = mean.at("kind");
    if (!jk.is_string()) fail("job.mean.kind", "expected a string");
    const std::string kind = jk.get<std::string>();
    job.mean = NMeanSpec{BaseMean::arithmetic, w, std::nullopt};
    if (kind == "karcher") {
      job.op = ComputeJob::Op::karcher;
    } else if (kind == "log_euclidean") {
      job.op = ComputeJob::Op::log_euclidean;
    } else if (kind == "power") {
      job.op = ComputeJob::Op::power;
      job.power_alpha = need_number(need(mean, "alpha", "job.mean"), "job.mean.alpha");
    } else {
      fail("job.mean.kind", "unknown mean kind '" + kind +
                                "' (expected karcher, log_euclidean, power)");
    }
  } else {
    job.op = ComputeJob::Op::nmean;
    job.mean = nmean_from_json(mean, w, "job.mean");
  }
  return job;
}

}  // namespace meanslab
