#include "meanslab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "meanslab/constants.hpp"

namespace meanslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string with_params(const std::string& label, const CheckParams& params) {
  if (params.empty()) return label;
  std::string out = label + "[";
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) out += ",";
    out += k + "=" + fmt_value(v);
    first = false;
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// scalar twins for commuting (diagonal) instances

double scalar_mean2(const MeanTwoSpec& sigma, double x, double a) {
  return x * sigma.f(a / x);
}

double scalar_base(BaseMean base, const Weights& w, const std::vector<double>& vals) {
  if (base == BaseMean::arithmetic) {
    double s = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) s += w[j] * vals[j];
    return s;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < vals.size(); ++j)
    if (w[j] != 0.0) s += w[j] / vals[j];
  return 1.0 / s;
}

double scalar_nmean(const NMeanSpec& spec, const std::vector<double>& a) {
  const Weights& w = spec.weights;
  if (!spec.deform) return scalar_base(spec.base, w, a);
  double x = scalar_base(BaseMean::arithmetic, w, a);
  std::vector<double> mixed(a.size());
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t j = 0; j < a.size(); ++j)
      mixed[j] = w[j] != 0.0 ? scalar_mean2(*spec.deform, x, a[j]) : a[j];
    const double t = scalar_base(spec.base, w, mixed);
    if (std::abs(x - t) <= 1e-14 * std::abs(x)) return x;
    x = t;
  }
  return x;
}

double scalar_geometric(const Weights& w, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (w[j] != 0.0) s += w[j] * std::log(a[j]);
  return std::exp(s);
}

// ---------------------------------------------------------------------------
// evaluation context shared by the check functions

struct CheckContext {
  const CheckInstance& inst;
  const HarnessConfig& cfg;

  std::map<std::string, double> details;
  double min_margin = kInf;
  CheckParams binding;
  bool holds = true;

  double m() const { return inst.bounds.m; }
  double M() const { return inst.bounds.M; }
  double h() const { return inst.bounds.h(); }

  void note(const std::string& label, const CheckParams& at, double margin, bool ok) {
    details[label] = margin;
    if (margin < min_margin) {
      min_margin = margin;
      binding = at;
    }
    if (!ok) holds = false;
  }

  // lhs <= rhs in Loewner order, relative tolerance.
  void loewner(const std::string& label, const CheckParams& at, const Eigen::MatrixXd& lhs,
               const Eigen::MatrixXd& rhs) {
    const LoewnerResult r = loewner_leq(lhs, rhs, cfg.loewner_tol);
    note(with_params(label, at), at, r.margin, r.holds);
  }

  // achieved <= bound for scalar (norm) comparisons.
  void norm_slack(const std::string& label, const CheckParams& at, double achieved,
                  double bound) {
    const double slack = bound - achieved;
    const double scale = std::max({1.0, std::abs(bound), std::abs(achieved)});
    note(with_params(label, at), at, slack, slack >= -cfg.loewner_tol * scale);
  }

  // Diagonal-instance agreement with the entrywise scalar value.
  void diag_twin(const std::string& tag, const std::vector<SpdMatrix>& ops,
                 const SpdMatrix& got, bool karcher) {
    for (const SpdMatrix& o : ops)
      if (!o.is_diagonal()) return;
    const int d = got.dim();
    double gap = 0.0;
    std::vector<double> a(ops.size());
    for (int i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < ops.size(); ++j) a[j] = ops[j].entries()(i, i);
      const double want = karcher ? scalar_geometric(inst.mean.weights, a)
                                  : scalar_nmean(inst.mean, a);
      gap = std::max(gap, std::abs(got.entries()(i, i) - want) / std::max(1.0, want));
    }
    details[tag + ":diag_gap"] = gap;
    if (gap > 1e-9) holds = false;
  }

  SpdMatrix solve(const NMeanSpec& spec, const std::vector<SpdMatrix>& ops,
                  const std::string& tag) {
    SpdMatrix x = evaluate_nmean(spec, ops, cfg.solver).value;
    if (inst.diagonal && &spec == &inst.mean) diag_twin(tag, ops, x, false);
    return x;
  }

  SpdMatrix karcher(const std::vector<SpdMatrix>& ops, const std::string& tag) {
    SpdMatrix x = karcher_mean(inst.mean.weights, ops, cfg.solver).value;
    if (inst.diagonal) diag_twin(tag, ops, x, true);
    return x;
  }
};

std::vector<SpdMatrix> powered(const std::vector<SpdMatrix>& as, double r) {
  std::vector<SpdMatrix> out;
  out.reserve(as.size());
  for (const SpdMatrix& a : as) out.push_back(mat_pow(a, r));
  return out;
}

std::vector<SpdMatrix> mapped(const PositiveMapSpec& phi, const std::vector<SpdMatrix>& as) {
  std::vector<SpdMatrix> out;
  out.reserve(as.size());
  for (const SpdMatrix& a : as) out.push_back(SpdMatrix(apply_map(phi, a.entries())));
  return out;
}

Eigen::MatrixXd eye(int d) { return Eigen::MatrixXd::Identity(d, d); }

// ---------------------------------------------------------------------------
// checks

void check_sandwich(CheckContext& c, const std::vector<CheckParams>&) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  const SpdMatrix am = arithmetic_mean(c.inst.mean.weights, c.inst.matrices);
  const SpdMatrix hm = harmonic_mean(c.inst.mean.weights, c.inst.matrices);
  c.loewner("harmonic<=msigma", {}, hm.entries(), ms.entries());
  c.loewner("msigma<=arithmetic", {}, ms.entries(), am.entries());
}

void check_info_monotonicity(CheckContext& c, const std::vector<CheckParams>&) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  const SpdMatrix ms_phi = c.solve(c.inst.mean, mapped(c.inst.map, c.inst.matrices), "msigma_phi");
  c.loewner("phi(m)<=m(phi)", {}, apply_map(c.inst.map, ms.entries()), ms_phi.entries());
}

void check_reverse_info_mono(CheckContext& c, const std::vector<CheckParams>& grid) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  const SpdMatrix ms_phi = c.solve(c.inst.mean, mapped(c.inst.map, c.inst.matrices), "msigma_phi");
  const Eigen::MatrixXd phi_ms = apply_map(c.inst.map, ms.entries());
  const int k = static_cast<int>(phi_ms.rows());
  for (const CheckParams& at : grid) {
    const double a = at.at("alpha");
    const Eigen::MatrixXd rhs = a * phi_ms + beta(c.m(), c.M(), a) * eye(k);
    c.loewner("m(phi)<=a*phi(m)+beta", at, ms_phi.entries(), rhs);
  }
}

void check_imah(CheckContext& c, const std::vector<CheckParams>& grid) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  std::map<double, std::pair<SpdMatrix, Eigen::MatrixXd>> by_r;  // lhs mean, phi(ms^r)
  for (const CheckParams& at : grid) {
    const double r = at.at("r");
    const double a = at.at("alpha");
    auto it = by_r.find(r);
    if (it == by_r.end()) {
      SpdMatrix lhs = c.solve(c.inst.mean, mapped(c.inst.map, powered(c.inst.matrices, r)),
                              "msigma_phi_pow" + fmt_value(r));
      Eigen::MatrixXd core = apply_map(c.inst.map, mat_pow(ms, r).entries());
      it = by_r.emplace(r, std::make_pair(std::move(lhs), std::move(core))).first;
    }
    const SpdMatrix& lhs = it->second.first;
    const Eigen::MatrixXd& core = it->second.second;
    const int k = static_cast<int>(core.rows());

    const double g = gamma(1.0 / c.M(), 1.0 / c.m(), -r, a);
    c.loewner("gamma_bound", at, lhs.entries(), a * core + g * eye(k));

    const double kr = kantorovich(c.h(), -r);
    CheckParams rc{{"r", r}};
    c.loewner("ratio:upper", rc, lhs.entries(), kr * core);
    const double lo = 4.0 * c.M() * c.m() / ((c.M() + c.m()) * (c.M() + c.m())) / kr;
    c.loewner("ratio:lower", rc, lo * core, lhs.entries());
  }
}

void check_abr(CheckContext& c, const std::vector<CheckParams>& grid) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  std::map<double, std::pair<SpdMatrix, Eigen::MatrixXd>> by_r;
  for (const CheckParams& at : grid) {
    const double r = at.at("r");
    const double a = at.at("alpha");
    auto it = by_r.find(r);
    if (it == by_r.end()) {
      SpdMatrix lhs = c.solve(c.inst.mean, mapped(c.inst.map, powered(c.inst.matrices, r)),
                              "msigma_phi_pow" + fmt_value(r));
      Eigen::MatrixXd core = apply_map(c.inst.map, mat_pow(ms, r).entries());
      it = by_r.emplace(r, std::make_pair(std::move(lhs), std::move(core))).first;
    }
    const SpdMatrix& lhs = it->second.first;
    const Eigen::MatrixXd& core = it->second.second;
    const int k = static_cast<int>(core.rows());

    const double kr = kantorovich(c.h(), r);
    const double kmr = kantorovich(c.h(), -r);
    const double g = gamma(1.0 / c.M(), 1.0 / c.m(), -r, a / kr);
    c.loewner("gamma_bound", at, lhs.entries(), a * core + g * eye(k));

    CheckParams rc{{"r", r}};
    c.loewner("ratio:upper", rc, lhs.entries(), kmr * kr * core);
    const double mr = std::pow(c.m(), r), Mr = std::pow(c.M(), r);
    const double lo = (4.0 * Mr * mr / ((Mr + mr) * (Mr + mr))) / (kmr * kr);
    c.loewner("ratio:lower", rc, lo * core, lhs.entries());
  }
}

void check_ahr(CheckContext& c, const std::vector<CheckParams>& grid) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  const double norm_ms = op_norm(ms.entries());
  const bool power_mean_instance = c.inst.mean.base == BaseMean::arithmetic &&
                                   c.inst.mean.deform &&
                                   c.inst.mean.deform->kind() == MeanKind::geometric;
  for (const CheckParams& at : grid) {
    const double r = at.at("r");
    const SpdMatrix mr =
        c.solve(c.inst.mean, powered(c.inst.matrices, r), "msigma_pow" + fmt_value(r));
    const SpdMatrix pw = mat_pow(ms, r);
    const double cconst =
        r < 1.0 ? kantorovich(c.h(), -r) : kantorovich(c.h(), -r) * kantorovich(c.h(), r);
    c.loewner("upper", at, mr.entries(), cconst * pw.entries());
    c.loewner("lower", at, pw.entries() / cconst, mr.entries());

    // normalized implication form: M_sigma <= I after scaling by 1/||M_sigma||
    const double t = std::pow(1.0 / norm_ms, r);
    c.loewner("normalized", at, t * mr.entries(), cconst * eye(c.inst.dim));

    if (power_mean_instance && r < 1.0) {
      const double kan = (c.M() + c.m()) * (c.M() + c.m()) / (4.0 * c.M() * c.m());
      c.loewner("classical_ratio", at, mr.entries(), std::pow(kan, r) * pw.entries());
    }
  }
}

void check_order_interpolation(CheckContext& c, const std::vector<CheckParams>& grid) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  const SpdMatrix le = log_euclidean(c.inst.mean.weights, c.inst.matrices);
  const double sh = specht(c.h());
  c.loewner("specht_sandwich:upper", {}, le.entries(), sh * sh * ms.entries());
  c.loewner("specht_sandwich:lower", {}, ms.entries() / (sh * sh), le.entries());

  std::map<double, SpdMatrix> root_of_pow;  // exponent -> M_sigma(A^x)^{1/x}
  auto mean_root = [&](double x) -> const SpdMatrix& {
    auto it = root_of_pow.find(x);
    if (it == root_of_pow.end()) {
      SpdMatrix mx =
          c.solve(c.inst.mean, powered(c.inst.matrices, x), "msigma_pow" + fmt_value(x));
      it = root_of_pow.emplace(x, mat_pow(mx, 1.0 / x)).first;
    }
    return it->second;
  };

  for (const CheckParams& at : grid) {
    const double q = at.at("q");
    const double p = at.at("p");
    const SpdMatrix& mq = mean_root(q);
    const SpdMatrix& mp = mean_root(p);
    const double kp = std::pow(kantorovich(std::pow(c.h(), p), -q / p), 1.0 / q);
    const double cconst = q >= 1.0 ? kp : kantorovich(std::pow(c.h(), q), 1.0 / q) * kp;
    c.loewner("upper", at, mq.entries(), cconst * mp.entries());
    c.loewner("lower", at, mp.entries() / cconst, mq.entries());

    // q -> 0 limit constants against the log-Euclidean mean
    const double sp = sh * std::pow(specht(std::pow(c.h(), p)), 1.0 / p);
    CheckParams pc{{"p", p}};
    c.loewner("specht:upper", pc, le.entries(), sp * mp.entries());
    c.loewner("specht:lower", pc, mp.entries() / sp, le.entries());
  }
}

void check_norm_monotonicity(CheckContext& c, const std::vector<CheckParams>& grid) {
  const SpdMatrix ms = c.solve(c.inst.mean, c.inst.matrices, "msigma");
  const SpdMatrix le = log_euclidean(c.inst.mean.weights, c.inst.matrices);
  const double n_le = op_norm(le.entries());
  const double n_ms = op_norm(ms.entries());
  const double sh = specht(c.h());
  c.norm_slack("specht_norm:upper", {}, n_le, sh * n_ms);
  c.norm_slack("specht_norm:lower", {}, n_ms / sh, n_le);

  std::map<double, double> deformed_norm;  // x -> ||M_sigma(A^x)||^{1/x}
  std::map<double, double> karcher_norm;   // x -> ||G(A^x)||^{1/x}
  auto dn = [&](double x) {
    auto it = deformed_norm.find(x);
    if (it == deformed_norm.end()) {
      const SpdMatrix mx =
          c.solve(c.inst.mean, powered(c.inst.matrices, x), "msigma_pow" + fmt_value(x));
      it = deformed_norm.emplace(x, std::pow(op_norm(mx.entries()), 1.0 / x)).first;
    }
    return it->second;
  };
  auto gn = [&](double x) {
    auto it = karcher_norm.find(x);
    if (it == karcher_norm.end()) {
      const SpdMatrix gx = c.karcher(powered(c.inst.matrices, x), "karcher_pow" + fmt_value(x));
      it = karcher_norm.emplace(x, std::pow(op_norm(gx.entries()), 1.0 / x)).first;
    }
    return it->second;
  };

  for (const CheckParams& at : grid) {
    const double q = at.at("q");
    const double p = at.at("p");
    const double kp = std::pow(kantorovich(std::pow(c.h(), p), -q / p), 1.0 / q);
    c.norm_slack("upper", at, dn(q), kp * dn(p));
    c.norm_slack("lower", at, dn(p) / kp, dn(q));

    const double sp = std::pow(specht(std::pow(c.h(), p)), 1.0 / p);
    CheckParams pc{{"p", p}};
    c.norm_slack("specht:upper", pc, n_le, sp * dn(p));
    c.norm_slack("specht:lower", pc, dn(p) / sp, n_le);

    // Karcher norm chain and its classical-constant relaxation
    c.norm_slack("karcher_chain", at, gn(q), kp * gn(p));
    const double mp = std::pow(c.m(), p), Mp = std::pow(c.M(), p);
    const double relaxed = std::pow((Mp + mp) * (Mp + mp) / (4.0 * Mp * mp), 1.0 / p);
    c.norm_slack("karcher_chain_classical", at, gn(q), relaxed * gn(p));
  }
}

void check_karcher_ah(CheckContext& c, const std::vector<CheckParams>& grid) {
  const SpdMatrix g = c.karcher(c.inst.matrices, "karcher");
  const SpdMatrix hm = harmonic_mean(c.inst.mean.weights, c.inst.matrices);
  const double ng = op_norm(g.entries());
  const double nh = op_norm(hm.entries());

  // power means are the pmi-deformed harmonic-base family covered by the
  // norm form of the Ando-Hiai property
  const bool power_mean_instance = c.inst.mean.base == BaseMean::harmonic &&
                                   c.inst.mean.deform &&
                                   c.inst.mean.deform->kind() == MeanKind::geometric;
  double nms = 0.0;
  if (power_mean_instance)
    nms = op_norm(c.solve(c.inst.mean, c.inst.matrices, "msigma").entries());

  for (const CheckParams& at : grid) {
    const double r = at.at("r");
    const SpdMatrix gr = c.karcher(powered(c.inst.matrices, r), "karcher_pow" + fmt_value(r));
    const SpdMatrix hr = harmonic_mean(c.inst.mean.weights, powered(c.inst.matrices, r));
    if (r >= 1.0) {
      // Yamazaki implication after normalizing so G <= I
      const double t = std::pow(1.0 / ng, r);
      c.loewner("yamazaki", at, t * gr.entries(), eye(c.inst.dim));
      c.loewner("ah:karcher", at, gr.entries(), std::pow(ng, r - 1.0) * g.entries());
      c.loewner("ah:harmonic", at, hr.entries(), std::pow(nh, r - 1.0) * hm.entries());
      if (power_mean_instance)
        c.norm_slack("norm_ah", at,
                     op_norm(c.solve(c.inst.mean, powered(c.inst.matrices, r),
                                     "msigma_pow" + fmt_value(r))
                                 .entries()),
                     std::pow(nms, r));
    } else {
      c.loewner("reverse_ah:karcher", at, std::pow(ng, r - 1.0) * g.entries(), gr.entries());
      c.loewner("reverse_ah:harmonic", at, std::pow(nh, r - 1.0) * hm.entries(), hr.entries());
    }
  }
}

// ---------------------------------------------------------------------------
// registry

enum class MapPolicy { none, strict, any };

struct CheckDef {
  void (*fn)(CheckContext&, const std::vector<CheckParams>&);
  MapPolicy map_policy;
};

const std::map<std::string, CheckDef>& registry() {
  static const std::map<std::string, CheckDef> defs = {
      {"sandwich", {check_sandwich, MapPolicy::none}},
      {"info_monotonicity", {check_info_monotonicity, MapPolicy::strict}},
      {"reverse_info_mono", {check_reverse_info_mono, MapPolicy::any}},
      {"imah", {check_imah, MapPolicy::any}},
      {"abr", {check_abr, MapPolicy::any}},
      {"ahr", {check_ahr, MapPolicy::none}},
      {"order_interpolation", {check_order_interpolation, MapPolicy::none}},
      {"norm_monotonicity", {check_norm_monotonicity, MapPolicy::none}},
      {"karcher_ah", {check_karcher_ah, MapPolicy::none}},
  };
  return defs;
}

const CheckDef& lookup(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) {
    std::string names;
    for (const std::string& n : check_names()) names += (names.empty() ? "" : ", ") + n;
    throw ValidationError("unknown check '" + name + "' (valid: " + names + ")");
  }
  return it->second;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "sandwich",           "info_monotonicity", "reverse_info_mono",
      "imah",               "abr",               "ahr",
      "order_interpolation", "norm_monotonicity", "karcher_ah",
  };
  return names;
}

std::vector<CheckParams> default_param_grid(const std::string& name,
                                            const SpectralBounds& bounds) {
  lookup(name);
  const double h = bounds.h();
  std::vector<CheckParams> grid;
  if (name == "reverse_info_mono") {
    for (double a : {0.25, 0.5, 1.0, kantorovich(h, -1.0), 2.0}) grid.push_back({{"alpha", a}});
  } else if (name == "imah") {
    for (double r : {0.25, 0.5, 0.75})
      for (double a : {0.5, 1.0, kantorovich(h, -r), 2.0})
        grid.push_back({{"r", r}, {"alpha", a}});
  } else if (name == "abr") {
    for (double r : {1.5, 2.0, 3.0})
      for (double a : {1.0, kantorovich(h, r) * kantorovich(h, -r), 2.0})
        grid.push_back({{"r", r}, {"alpha", a}});
  } else if (name == "ahr" || name == "karcher_ah") {
    for (double r : {0.25, 0.5, 0.75, 1.5, 2.0, 3.0}) grid.push_back({{"r", r}});
  } else if (name == "order_interpolation" || name == "norm_monotonicity") {
    grid = {{{"q", 1.0}, {"p", 2.0}},
            {{"q", 1.5}, {"p", 3.0}},
            {{"q", 0.5}, {"p", 1.0}},
            {{"q", 0.25}, {"p", 2.0}}};
  } else {
    grid.push_back({});
  }
  return grid;
}

CheckInstance make_instance(const std::string& check, int dim_lo, int dim_hi, int n_lo,
                            int n_hi, const SpectralBounds& bounds, std::uint64_t seed) {
  const CheckDef& def = lookup(check);
  if (dim_lo < 1 || dim_hi < dim_lo || n_lo < 1 || n_hi < n_lo)
    throw ValidationError("make_instance: bad dim or n range");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto pick_int = [&](int lo, int hi) {
    return lo + static_cast<int>(std::uniform_int_distribution<int>(0, hi - lo)(rng));
  };

  CheckInstance inst;
  inst.seed = seed;
  inst.bounds = bounds;
  inst.dim = pick_int(dim_lo, dim_hi);
  inst.n = pick_int(n_lo, n_hi);
  inst.diagonal = u01(rng) < 0.2;

  // weights; occasionally zero one out (dropped operand path)
  std::vector<double> w(static_cast<std::size_t>(inst.n));
  for (double& v : w) v = 0.05 + 0.95 * u01(rng);
  const bool drop = inst.n >= 2 && u01(rng) < 0.1;
  if (drop) w[static_cast<std::size_t>(pick_int(0, inst.n - 1))] = 0.0;
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  double resid = 1.0;
  std::size_t largest = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    resid -= w[j];
    if (w[j] > w[largest]) largest = j;
  }
  w[largest] += resid;  // exact unit sum

  const BaseMean base = u01(rng) < 0.5 ? BaseMean::arithmetic : BaseMean::harmonic;
  const int sigma_kind = pick_int(0, 2);
  const double alpha = std::vector<double>{0.25, 0.5, 0.75}[static_cast<std::size_t>(pick_int(0, 2))];
  MeanTwoSpec sigma = sigma_kind == 0   ? MeanTwoSpec::geometric(alpha)
                      : sigma_kind == 1 ? MeanTwoSpec::arithmetic(alpha)
                                        : MeanTwoSpec::harmonic(alpha);
  inst.mean = NMeanSpec{base, Weights(std::move(w)), std::move(sigma)};

  if (def.map_policy != MapPolicy::none) {
    const bool allow_trace = def.map_policy == MapPolicy::any;
    const int choices = allow_trace ? 3 : 2;
    int kind = pick_int(0, choices - 1);
    if (inst.dim < 2 && kind == 0) kind = 1;  // compression needs k < dim
    if (kind == 0) {
      inst.map = random_compression(inst.dim, pick_int(1, inst.dim - 1),
                                    mix_seed(seed, 17));
    } else if (kind == 1) {
      const int cut = inst.dim >= 2 ? pick_int(1, inst.dim - 1) : 1;
      std::vector<std::vector<int>> blocks(2);
      for (int i = 0; i < inst.dim; ++i) blocks[i < cut ? 0 : 1].push_back(i);
      if (blocks[1].empty()) blocks.pop_back();
      inst.map = PositiveMapSpec::pinching(std::move(blocks), inst.dim);
    } else {
      inst.map = PositiveMapSpec::normalized_trace();
    }
  }

  inst.matrices.reserve(static_cast<std::size_t>(inst.n));
  for (int j = 0; j < inst.n; ++j) {
    const std::uint64_t s = mix_seed(seed, 1000 + static_cast<std::uint64_t>(j));
    inst.matrices.push_back(inst.diagonal ? random_spd_diagonal(inst.dim, bounds, s)
                                          : random_spd(inst.dim, bounds, s));
  }
  return inst;
}

json instance_artifact(const std::string& name, const CheckInstance& inst,
                       const CheckParams& binding) {
  json mats = json::array();
  for (const SpdMatrix& a : inst.matrices) mats.push_back(matrix_to_json(a));
  return json{{"check", name},
              {"params", binding},
              {"instance",
               {{"seed", inst.seed},
                {"dim", inst.dim},
                {"n", inst.n},
                {"bounds", {{"m", inst.bounds.m}, {"M", inst.bounds.M}}},
                {"diagonal", inst.diagonal},
                {"weights", weights_to_json(inst.mean.weights)},
                {"mean", nmean_to_json(inst.mean)},
                {"map", posmap_to_json(inst.map)},
                {"matrices", std::move(mats)}}}};
}

CheckReport run_check(const std::string& name, const CheckInstance& instance,
                      const CheckParams& params, const HarnessConfig& cfg) {
  const CheckDef& def = lookup(name);
  CheckReport report;
  report.name = name;
  report.seed = instance.seed;
  report.dim = instance.dim;
  report.n = instance.n;

  CheckContext ctx{instance, cfg};
  try {
    const std::vector<CheckParams> grid =
        params.empty() ? default_param_grid(name, instance.bounds)
                       : std::vector<CheckParams>{params};
    def.fn(ctx, grid);
    report.margin = ctx.min_margin;
    report.params = ctx.binding;
    report.holds = ctx.holds;
  } catch (const std::exception& e) {
    report.error = e.what();
    report.holds = false;
  }
  report.details = std::move(ctx.details);
  if (cfg.retain_artifacts || !report.holds)
    report.artifacts = instance_artifact(name, instance, report.params);
  return report;
}

CheckReport recheck_from_artifact(const json& artifact, const HarnessConfig& cfg) {
  const std::string name = artifact.at("check").get<std::string>();
  const json& ji = artifact.at("instance");
  CheckInstance inst;
  inst.seed = ji.at("seed").get<std::uint64_t>();
  inst.dim = ji.at("dim").get<int>();
  inst.n = ji.at("n").get<int>();
  inst.bounds = SpectralBounds(ji.at("bounds").at("m").get<double>(),
                               ji.at("bounds").at("M").get<double>());
  inst.diagonal = ji.at("diagonal").get<bool>();
  Weights w = weights_from_json(ji.at("weights"), "artifact.weights");
  inst.mean = nmean_from_json(ji.at("mean"), w, "artifact.mean");
  inst.map = posmap_from_json(ji.at("map"), "artifact.map");
  for (const json& jm : ji.at("matrices"))
    inst.matrices.push_back(matrix_from_json(jm, "artifact.matrix"));
  CheckParams params;
  if (artifact.contains("params"))
    params = artifact.at("params").get<std::map<std::string, double>>();
  return run_check(name, inst, params, cfg);
}

json report_to_json(const CheckReport& r) {
  json out{{"name", r.name}, {"params", r.params},   {"margin", r.margin},
           {"holds", r.holds}, {"seed", r.seed},       {"dim", r.dim},
           {"n", r.n},         {"details", r.details}};
  if (!r.error.empty()) out["error"] = r.error;
  return out;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  for (const std::string& name : cfg.names) lookup(name);
  if (cfg.trials < 0) throw ValidationError("run_suite: trials must be >= 0");
  if (cfg.bounds_set.empty()) throw ValidationError("run_suite: empty bounds set");

  struct Job {
    std::string name;
    SpectralBounds bounds;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::string& name : cfg.names) {
    const std::uint64_t stream = fnv1a(name);
    for (int t = 0; t < cfg.trials; ++t) {
      const SpectralBounds& b = cfg.bounds_set[static_cast<std::size_t>(t) % cfg.bounds_set.size()];
      jobs.push_back(Job{name, b, mix_seed(mix_seed(cfg.seed, stream), static_cast<std::uint64_t>(t))});
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult result;
  result.reports.resize(jobs.size());

  if (!cfg.artifact_dir.empty()) std::filesystem::create_directories(cfg.artifact_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      CheckReport report;
      try {
        const CheckInstance inst = make_instance(job.name, cfg.dim_lo, cfg.dim_hi, cfg.n_lo,
                                                 cfg.n_hi, job.bounds, job.seed);
        report = run_check(job.name, inst, {}, cfg.harness);
      } catch (const std::exception& e) {
        report.name = job.name;
        report.seed = job.seed;
        report.error = e.what();
        report.holds = false;
      }
      if (!report.holds && !cfg.artifact_dir.empty() && !report.artifacts.is_null()) {
        std::ostringstream path;
        path << cfg.artifact_dir << "/" << job.name << "-" << job.seed << ".json";
        std::ofstream out(path.str());
        out << report.artifacts.dump(2) << "\n";
      }
      result.reports[i] = std::move(report);
    }
  };

  const int jobs_n = std::max(1, cfg.jobs);
  if (jobs_n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs_n));
    for (int t = 0; t < jobs_n; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  for (const CheckReport& r : result.reports) {
    CheckSummary& s = result.summary[r.name];
    ++s.count;
    if (!r.holds) ++s.failures;
    if (!r.error.empty()) ++s.errors;
    if (std::isfinite(r.margin)) s.min_margin = std::min(s.min_margin, r.margin);
    if (!r.holds) ++result.total_failures;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

json suite_report_json(const SuiteConfig& cfg, const SuiteResult& result) {
  json bounds = json::array();
  for (const SpectralBounds& b : cfg.bounds_set) bounds.push_back({b.m, b.M});
  json checks = json::object();
  for (const auto& [name, s] : result.summary) {
    checks[name] = json{{"count", s.count},
                        {"failures", s.failures},
                        {"errors", s.errors},
                        {"min_margin", std::isfinite(s.min_margin) ? json(s.min_margin) : json()}};
  }
  json reports = json::array();
  for (const CheckReport& r : result.reports) reports.push_back(report_to_json(r));
  return json{{"suite", cfg.names},
              {"trials", cfg.trials},
              {"dim", {cfg.dim_lo, cfg.dim_hi}},
              {"n", {cfg.n_lo, cfg.n_hi}},
              {"bounds", std::move(bounds)},
              {"seed", cfg.seed},
              {"summary", {{"total_failures", result.total_failures}, {"checks", std::move(checks)}}},
              {"reports", std::move(reports)}};
}

std::string suite_summary_csv(const SuiteResult& result) {
  std::ostringstream os;
  os << "check,count,failures,errors,min_margin\n";
  for (const auto& [name, s] : result.summary) {
    os << name << "," << s.count << "," << s.failures << "," << s.errors << ",";
    if (std::isfinite(s.min_margin)) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", s.min_margin);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace meanslab
