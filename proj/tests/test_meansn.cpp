#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "meanslab/meansn.hpp"
#include "scalar_oracles.hpp"

using namespace meanslab;
using meanslab::testing::scalar_deformed_bisect;

namespace {

double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

SpdMatrix scalar1(double v) {
  Eigen::MatrixXd m(1, 1);
  m << v;
  return SpdMatrix(m);
}

std::vector<SpdMatrix> random_family(int dim, int n, const SpectralBounds& b,
                                     std::uint64_t seed) {
  std::vector<SpdMatrix> out;
  for (int j = 0; j < n; ++j) out.push_back(random_spd(dim, b, mix_seed(seed, j)));
  return out;
}

}  // namespace

TEST_CASE("weights validation") {
  CHECK_THROWS_AS(Weights({0.5, 0.4}), ValidationError);
  CHECK_THROWS_AS(Weights({1.5, -0.5}), ValidationError);
  CHECK_THROWS_AS(Weights(std::vector<double>{}), ValidationError);
  CHECK(Weights({0.25, 0.75}).size() == 2);
}

TEST_CASE("arithmetic and harmonic means: examples") {
  auto as = random_family(3, 3, SpectralBounds(1, 4), 1);
  Weights w({0.2, 0.5, 0.3});

  // all operands equal
  std::vector<SpdMatrix> equal(3, as[0]);
  CHECK(rel_err(arithmetic_mean(w, equal).entries(), as[0].entries()) < 1e-13);
  CHECK(rel_err(harmonic_mean(w, equal).entries(), as[0].entries()) < 1e-11);

  // scalars
  Weights half({0.5, 0.5});
  std::vector<SpdMatrix> sc = {scalar1(2), scalar1(4)};
  CHECK(arithmetic_mean(half, sc).entries()(0, 0) == doctest::Approx(3.0));
  CHECK(harmonic_mean(half, sc).entries()(0, 0) == doctest::Approx(8.0 / 3.0));

  // harmonic = inverse of arithmetic of inverses
  std::vector<SpdMatrix> inv;
  for (const auto& a : as) inv.push_back(mat_inv(a));
  CHECK(rel_err(harmonic_mean(w, as).entries(),
                mat_inv(arithmetic_mean(w, inv)).entries()) < 1e-10);

  CHECK_THROWS_AS(arithmetic_mean(half, as), ValidationError);  // length mismatch
}

TEST_CASE("AM-HM ordering") {
  auto as = random_family(4, 3, SpectralBounds(0.5, 4), 2);
  Weights w({0.3, 0.4, 0.3});
  CHECK(loewner_leq(harmonic_mean(w, as).entries(), arithmetic_mean(w, as).entries(), 1e-9)
            .holds);
}

TEST_CASE("zero weights drop operands; a single survivor is returned exactly") {
  auto as = random_family(3, 3, SpectralBounds(1, 4), 3);
  Weights w({0.0, 1.0, 0.0});
  CHECK(arithmetic_mean(w, as).entries() == as[1].entries());
  CHECK(harmonic_mean(w, as).entries() == as[1].entries());
  CHECK(log_euclidean(w, as).entries() == as[1].entries());
  NMeanSpec spec{BaseMean::arithmetic, w, MeanTwoSpec::geometric(0.5)};
  CHECK(rel_err(deformed_mean(spec, as).value.entries(), as[1].entries()) < 1e-12);
}

TEST_CASE("deformed mean: fixed point of equal operands in one iteration") {
  auto a = random_spd(4, SpectralBounds(1, 4), 4);
  std::vector<SpdMatrix> as(3, a);
  NMeanSpec spec{BaseMean::arithmetic, Weights({0.2, 0.3, 0.5}), MeanTwoSpec::geometric(0.5)};
  MeanResult r = deformed_mean(spec, as);
  CHECK(r.trace.converged);
  CHECK(r.trace.iterations == 1);
  CHECK(rel_err(r.value.entries(), a.entries()) < 1e-11);
}

TEST_CASE("deformed mean: scalar closed form for the power mean") {
  // x = (sum w_j a_j^alpha)^{1/alpha}; w = (1/2,1/2), alpha = 1/2, a = (1,4) -> 2.25
  NMeanSpec spec{BaseMean::arithmetic, Weights({0.5, 0.5}), MeanTwoSpec::geometric(0.5)};
  std::vector<SpdMatrix> as = {scalar1(1), scalar1(4)};
  SolverConfig tight;
  tight.tol = 1e-14;
  MeanResult r = deformed_mean(spec, as, tight);
  CHECK(r.value.entries()(0, 0) == doctest::Approx(2.25).epsilon(1e-13));
  CHECK(r.trace.converged);
  CHECK(r.trace.residual <= 1e-14);
}

TEST_CASE("deformed mean matches the entrywise scalar mean on commuting instances") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const int dim = 2 + static_cast<int>(rng() % 4);
    const int n = 2 + static_cast<int>(rng() % 3);
    std::vector<SpdMatrix> as;
    std::vector<std::vector<double>> diag(dim);
    for (int j = 0; j < n; ++j) {
      SpdMatrix d = random_spd_diagonal(dim, SpectralBounds(0.5, 4), rng());
      for (int i = 0; i < dim; ++i) diag[i].push_back(d.entries()(i, i));
      as.push_back(std::move(d));
    }
    std::vector<double> wv(n, 1.0 / n);
    wv[0] += 1.0 - std::accumulate(wv.begin(), wv.end(), 0.0);
    const BaseMean base = trial % 2 == 0 ? BaseMean::arithmetic : BaseMean::harmonic;
    const MeanTwoSpec sigma = trial % 3 == 0   ? MeanTwoSpec::geometric(0.5)
                              : trial % 3 == 1 ? MeanTwoSpec::arithmetic(0.25)
                                               : MeanTwoSpec::harmonic(0.75);
    NMeanSpec spec{base, Weights(wv), sigma};
    SolverConfig cfg;
    cfg.tol = 1e-13;
    MeanResult r = deformed_mean(spec, as, cfg);
    for (int i = 0; i < dim; ++i) {
      const double want = scalar_deformed_bisect(spec, diag[i]);
      CHECK(r.value.entries()(i, i) == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("deformed mean rejects the left trivial mean and alpha0 outside (0,1]") {
  auto as = random_family(3, 2, SpectralBounds(1, 4), 6);
  NMeanSpec ltriv{BaseMean::arithmetic, Weights({0.5, 0.5}), MeanTwoSpec::left_trivial()};
  CHECK_THROWS_AS(deformed_mean(ltriv, as), ValidationError);
  // geometric(0) degenerates to the left trivial mean: alpha0 = 0
  NMeanSpec geo0{BaseMean::arithmetic, Weights({0.5, 0.5}), MeanTwoSpec::geometric(0.0)};
  CHECK_THROWS_AS(deformed_mean(geo0, as), ValidationError);
  NMeanSpec none{BaseMean::arithmetic, Weights({0.5, 0.5}), std::nullopt};
  CHECK_THROWS_AS(deformed_mean(none, as), ValidationError);
}

TEST_CASE("deformed mean surfaces non-convergence with its trace") {
  auto as = random_family(3, 3, SpectralBounds(1, 16), 7);
  NMeanSpec spec{BaseMean::harmonic, Weights({0.3, 0.3, 0.4}), MeanTwoSpec::geometric(0.25)};
  SolverConfig cfg;
  cfg.max_iter = 2;
  try {
    deformed_mean(spec, as, cfg);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.trace.iterations == 2);
    CHECK_FALSE(e.trace.converged);
    CHECK(e.trace.residual > 1e-12);
  }
}

TEST_CASE("converged trace certifies the fixed-point residual") {
  auto as = random_family(4, 3, SpectralBounds(1, 16), 8);
  NMeanSpec spec{BaseMean::harmonic, Weights({0.25, 0.5, 0.25}), MeanTwoSpec::harmonic(0.5)};
  MeanResult r = deformed_mean(spec, as);
  CHECK(r.trace.converged);
  CHECK(r.trace.residual <= 1e-12);
  // recompute the defect at the returned X
  std::vector<SpdMatrix> mixed;
  for (const auto& a : as) mixed.push_back(mean2(*spec.deform, r.value, a));
  SpdMatrix t = harmonic_mean(spec.weights, mixed);
  CHECK(op_norm(r.value.entries() - t.entries()) / op_norm(r.value.entries()) <= 1e-12);
}

TEST_CASE("power mean degenerates to arithmetic and harmonic at the endpoints") {
  auto as = random_family(4, 3, SpectralBounds(0.5, 4), 9);
  Weights w({0.3, 0.4, 0.3});
  CHECK(rel_err(power_mean(w, 1.0, as).entries(), arithmetic_mean(w, as).entries()) < 1e-10);
  CHECK(rel_err(power_mean(w, -1.0, as).entries(), harmonic_mean(w, as).entries()) < 1e-10);
  CHECK_THROWS_AS(power_mean(w, 0.0, as), ValidationError);
  CHECK_THROWS_AS(power_mean(w, 1.5, as), ValidationError);

  Weights half({0.5, 0.5});
  std::vector<SpdMatrix> sc = {scalar1(1), scalar1(4)};
  SolverConfig tight;
  tight.tol = 1e-14;
  CHECK(power_mean(half, 0.5, sc, tight).entries()(0, 0) ==
        doctest::Approx(2.25).epsilon(1e-13));
}

TEST_CASE("negative power mean agrees with the direct harmonic-base fixed point") {
  auto as = random_family(4, 3, SpectralBounds(0.5, 4), 10);
  Weights w({0.2, 0.45, 0.35});
  for (double alpha : {0.25, 0.5, 0.75}) {
    SpdMatrix dual = power_mean(w, -alpha, as);
    NMeanSpec direct{BaseMean::harmonic, w, MeanTwoSpec::geometric(alpha)};
    SpdMatrix fixed = deformed_mean(direct, as).value;
    CHECK(rel_err(dual.entries(), fixed.entries()) < 1e-9);
  }
}

TEST_CASE("karcher mean: two equal-weight operands give the geodesic midpoint") {
  auto a = random_spd(4, SpectralBounds(1, 4), 11);
  auto b = random_spd(4, SpectralBounds(1, 4), 12);
  std::vector<SpdMatrix> as = {a, b};
  MeanResult g = karcher_mean(Weights({0.5, 0.5}), as);
  SpdMatrix mid = mean2(MeanTwoSpec::geometric(0.5), a, b);
  CHECK(rel_err(g.value.entries(), mid.entries()) < 1e-9);
  CHECK(g.trace.converged);
}

TEST_CASE("karcher mean on commuting operands equals the log-euclidean mean") {
  std::vector<SpdMatrix> as;
  for (int j = 0; j < 3; ++j) as.push_back(random_spd_diagonal(4, SpectralBounds(1, 16), 13 + j));
  Weights w({0.5, 0.25, 0.25});
  MeanResult g = karcher_mean(w, as);
  CHECK(rel_err(g.value.entries(), log_euclidean(w, as).entries()) < 1e-10);
}

TEST_CASE("karcher mean residual contract and equal-operand shortcut") {
  auto a = random_spd(3, SpectralBounds(1, 4), 17);
  std::vector<SpdMatrix> as(4, a);
  Weights w({0.25, 0.25, 0.25, 0.25});
  MeanResult g = karcher_mean(w, as);
  CHECK(g.trace.converged);
  CHECK(rel_err(g.value.entries(), a.entries()) < 1e-10);

  auto family = random_family(5, 4, SpectralBounds(1, 16), 18);
  MeanResult r = karcher_mean(w, family);
  CHECK(r.trace.converged);
  // residual reported relative to mean_j ||log A_j|| + 1
  double scale = 0.0;
  for (const auto& m : family) scale += op_norm(mat_log(m));
  scale = scale / 4.0 + 1.0;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(5, 5);
  const Eigen::MatrixXd xih = matrix_fn(r.value, [](double t) { return 1.0 / std::sqrt(t); });
  for (const auto& m : family)
    s += 0.25 * mat_log(SpdMatrix(symmetrize(xih * m.entries() * xih)));
  CHECK(op_norm(s) <= 1e-12 * scale);
}

TEST_CASE("log-euclidean mean basics") {
  auto a = random_spd(3, SpectralBounds(1, 4), 19);
  std::vector<SpdMatrix> as = {a, a, a};
  Weights w({0.2, 0.3, 0.5});
  CHECK(rel_err(log_euclidean(w, as).entries(), a.entries()) < 1e-11);

  std::vector<SpdMatrix> ds;
  for (int j = 0; j < 3; ++j) ds.push_back(random_spd_diagonal(3, SpectralBounds(0.5, 4), 20 + j));
  SpdMatrix le = log_euclidean(w, ds);
  for (int i = 0; i < 3; ++i) {
    double expect = 0.0;
    const double wv[] = {0.2, 0.3, 0.5};
    for (int j = 0; j < 3; ++j) expect += wv[j] * std::log(ds[j].entries()(i, i));
    CHECK(le.entries()(i, i) == doctest::Approx(std::exp(expect)).epsilon(1e-12));
  }
}

TEST_CASE("adjoint_nmean") {
  auto as = random_family(3, 3, SpectralBounds(0.5, 4), 23);
  Weights w({0.2, 0.5, 0.3});
  NMeanSpec arith{BaseMean::arithmetic, w, std::nullopt};
  CHECK(rel_err(adjoint_nmean(arith, as).value.entries(), harmonic_mean(w, as).entries()) <
        1e-10);

  NMeanSpec deformed{BaseMean::arithmetic, w, MeanTwoSpec::geometric(0.5)};
  SpdMatrix once = adjoint_nmean(deformed, as).value;
  std::vector<SpdMatrix> inv;
  for (const auto& a : as) inv.push_back(mat_inv(a));
  SpdMatrix twice = mat_inv(adjoint_nmean(deformed, inv).value);
  SpdMatrix plain = deformed_mean(deformed, as).value;
  CHECK(rel_err(twice.entries(), plain.entries()) < 1e-9);  // involution

  std::vector<SpdMatrix> equal(3, as[0]);
  CHECK(rel_err(adjoint_nmean(deformed, equal).value.entries(), as[0].entries()) < 1e-10);
}

TEST_CASE("adjoint identity: (M_sigma)* = (M*)_{sigma*}") {
  auto as = random_family(4, 3, SpectralBounds(0.5, 4), 24);
  Weights w({0.25, 0.35, 0.4});
  // arithmetic base with sigma: the adjoint is the harmonic base deformed by sigma*
  for (const MeanTwoSpec& sigma : {MeanTwoSpec::arithmetic(0.5), MeanTwoSpec::geometric(0.25)}) {
    NMeanSpec spec{BaseMean::arithmetic, w, sigma};
    SpdMatrix lhs = adjoint_nmean(spec, as).value;
    NMeanSpec dual{BaseMean::harmonic, w, adjoint2(sigma)};
    SpdMatrix rhs = deformed_mean(dual, as).value;
    CHECK(rel_err(lhs.entries(), rhs.entries()) < 1e-9);
  }
}

TEST_CASE("sandwich H <= M_sigma <= A on random instances") {
  for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
    auto as = random_family(4, 3, SpectralBounds(0.5, 4), seed);
    Weights w({0.3, 0.4, 0.3});
    for (const BaseMean base : {BaseMean::arithmetic, BaseMean::harmonic}) {
      for (const MeanTwoSpec& sigma : {MeanTwoSpec::geometric(0.5), MeanTwoSpec::arithmetic(0.25),
                                       MeanTwoSpec::harmonic(0.75)}) {
        NMeanSpec spec{base, w, sigma};
        SpdMatrix m = deformed_mean(spec, as).value;
        CHECK(loewner_leq(harmonic_mean(w, as).entries(), m.entries(), 1e-9).holds);
        CHECK(loewner_leq(m.entries(), arithmetic_mean(w, as).entries(), 1e-9).holds);
      }
    }
  }
}

TEST_CASE("congruence invariance of the deformed mean") {
  auto as = random_family(4, 3, SpectralBounds(0.5, 4), 34);
  Weights w({0.3, 0.4, 0.3});
  NMeanSpec spec{BaseMean::arithmetic, w, MeanTwoSpec::geometric(0.5)};
  // invertible S with condition <= 10
  SpdMatrix s_src = random_spd(4, SpectralBounds(0.5, 4.0), 35);
  const Eigen::MatrixXd s = s_src.entries();
  SpdMatrix lhs = congruence(s, deformed_mean(spec, as).value);
  std::vector<SpdMatrix> conj;
  for (const auto& a : as) conj.push_back(congruence(s, a));
  SpdMatrix rhs = deformed_mean(spec, conj).value;
  CHECK(rel_err(lhs.entries(), rhs.entries()) < 1e-8);
}

TEST_CASE("monotonicity of the deformed mean") {
  for (std::uint64_t seed : {36ull, 37ull}) {
    auto as = random_family(4, 3, SpectralBounds(0.5, 2), seed);
    std::vector<SpdMatrix> bs;
    for (int j = 0; j < 3; ++j) {
      SpdMatrix bump = random_spd(4, SpectralBounds(0.05, 0.4), mix_seed(seed, 50 + j));
      bs.push_back(SpdMatrix(as[j].entries() + bump.entries()));
    }
    Weights w({0.3, 0.4, 0.3});
    for (const BaseMean base : {BaseMean::arithmetic, BaseMean::harmonic}) {
      NMeanSpec spec{base, w, MeanTwoSpec::geometric(0.5)};
      SpdMatrix lo = deformed_mean(spec, as).value;
      SpdMatrix hi = deformed_mean(spec, bs).value;
      CHECK(loewner_leq(lo.entries(), hi.entries(), 1e-9).holds);
    }
  }
}

TEST_CASE("homogeneity of the deformed mean") {
  auto as = random_family(3, 3, SpectralBounds(0.5, 4), 38);
  Weights w({0.3, 0.4, 0.3});
  NMeanSpec spec{BaseMean::harmonic, w, MeanTwoSpec::geometric(0.5)};
  SpdMatrix base = deformed_mean(spec, as).value;
  for (double t : {0.1, 2.0, 10.0}) {
    std::vector<SpdMatrix> scaled;
    for (const auto& a : as) scaled.push_back(SpdMatrix(t * a.entries()));
    SpdMatrix got = deformed_mean(spec, scaled).value;
    CHECK(rel_err(got.entries(), (t * base.entries()).eval()) < 1e-10);
  }
}

TEST_CASE("Lie-Trotter convergence of deformed means of powers") {
  for (std::uint64_t seed : {41ull, 42ull, 43ull, 44ull, 45ull}) {
    auto as = random_family(3, 3, SpectralBounds(0.5, 4), seed);
    Weights w({0.3, 0.4, 0.3});
    NMeanSpec spec{seed % 2 == 0 ? BaseMean::arithmetic : BaseMean::harmonic, w,
                   MeanTwoSpec::geometric(0.5)};
    SpdMatrix le = log_euclidean(w, as);
    auto err_at = [&](double p) {
      std::vector<SpdMatrix> powed;
      for (const auto& a : as) powed.push_back(mat_pow(a, p));
      SpdMatrix mp = deformed_mean(spec, powed).value;
      return op_norm(mat_pow(mp, 1.0 / p).entries() - le.entries());
    };
    double prev = err_at(0.2);
    for (double p : {0.1, 0.05, 0.025, 0.0125}) {
      const double cur = err_at(p);
      CHECK(cur <= 0.75 * prev + 1e-11 * op_norm(le.entries()));
      prev = cur;
    }
  }
}

TEST_CASE("power means approach the karcher mean as alpha -> 0") {
  auto as = random_family(4, 3, SpectralBounds(1, 4), 46);
  Weights w({0.3, 0.4, 0.3});
  SolverConfig cfg;
  cfg.max_iter = 5000;  // alpha = 1/32 contracts at ratio 31/32
  SpdMatrix g = karcher_mean(w, as, cfg).value;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 5; ++k) {
    SpdMatrix p = power_mean(w, 1.0 / std::pow(2.0, k), as, cfg);
    const double dist = op_norm(p.entries() - g.entries());
    CHECK(dist < prev);
    prev = dist;
  }
}
