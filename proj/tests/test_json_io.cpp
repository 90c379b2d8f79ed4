#include <doctest.h>

#include "meanslab/json_io.hpp"

using namespace meanslab;

TEST_CASE("matrix round-trip") {
  SpdMatrix a = random_spd(3, SpectralBounds(0.5, 4), 1);
  const json j = matrix_to_json(a);
  CHECK(j.at("dim") == 3);
  SpdMatrix back = matrix_from_json(j);
  CHECK((back.entries() - a.entries()).norm() == 0.0);
}

TEST_CASE("matrix reader rejects malformed input with a field diagnostic") {
  CHECK_THROWS_WITH_AS(matrix_from_json(json{{"entries", json::array()}}),
                       doctest::Contains("matrix.dim"), ValidationError);
  CHECK_THROWS_WITH_AS(
      matrix_from_json(json{{"dim", 2}, {"entries", {{1.0, 0.0}}}}),
      doctest::Contains("rows"), ValidationError);
  // asymmetric
  CHECK_THROWS_WITH_AS(
      matrix_from_json(json{{"dim", 2}, {"entries", {{1.0, 0.5}, {0.0, 1.0}}}}),
      doctest::Contains("symmetric"), ValidationError);
  // not positive definite: diagnostic names the offending eigenvalue
  CHECK_THROWS_WITH_AS(
      matrix_from_json(json{{"dim", 2}, {"entries", {{1.0, 2.0}, {2.0, 1.0}}}}),
      doctest::Contains("eigenvalue"), ValidationError);
}

TEST_CASE("weights round-trip and validation") {
  Weights w({0.25, 0.75});
  CHECK(weights_from_json(weights_to_json(w)).values() == w.values());
  CHECK_THROWS_WITH_AS(weights_from_json(json{{"not", "array"}}), doctest::Contains("weights"),
                       ValidationError);
  CHECK_THROWS_AS(weights_from_json(json::array({0.5, 0.4})), ValidationError);
}

TEST_CASE("mean spec round-trip") {
  for (const MeanTwoSpec& s : {MeanTwoSpec::geometric(0.5), MeanTwoSpec::arithmetic(0.25),
                               MeanTwoSpec::harmonic(0.75), MeanTwoSpec::left_trivial()}) {
    const MeanTwoSpec back = mean2_from_json(mean2_to_json(s));
    CHECK(back.kind() == s.kind());
    CHECK(back.alpha() == s.alpha());
  }
  CHECK_THROWS_AS(mean2_to_json(MeanTwoSpec::custom("c", [](double) { return 1.0; }, true)),
                  ValidationError);
  CHECK_THROWS_WITH_AS(mean2_from_json(json{{"kind", "median"}}), doctest::Contains("median"),
                       ValidationError);
}

TEST_CASE("nmean spec round-trip") {
  Weights w({0.5, 0.5});
  NMeanSpec spec{BaseMean::harmonic, w, MeanTwoSpec::geometric(0.5)};
  NMeanSpec back = nmean_from_json(nmean_to_json(spec), w);
  CHECK(back.base == BaseMean::harmonic);
  REQUIRE(back.deform.has_value());
  CHECK(back.deform->kind() == MeanKind::geometric);

  NMeanSpec plain{BaseMean::arithmetic, w, std::nullopt};
  NMeanSpec back2 = nmean_from_json(nmean_to_json(plain), w);
  CHECK_FALSE(back2.deform.has_value());
}

TEST_CASE("positive map round-trip validates the isometry invariant on load") {
  PositiveMapSpec comp = random_compression(4, 2, 3);
  PositiveMapSpec back = posmap_from_json(posmap_to_json(comp));
  CHECK(back.kind() == PositiveMapSpec::Kind::compression);
  CHECK((back.isometry() - comp.isometry()).norm() == 0.0);

  json broken = posmap_to_json(comp);
  broken["V"][0][0] = broken["V"][0][0].get<double>() + 0.5;
  CHECK_THROWS_WITH_AS(posmap_from_json(broken), doctest::Contains("orthonormal"),
                       ValidationError);

  PositiveMapSpec pin = PositiveMapSpec::pinching({{0, 2}, {1}}, 3);
  PositiveMapSpec pin_back = posmap_from_json(posmap_to_json(pin));
  CHECK(pin_back.kind() == PositiveMapSpec::Kind::pinching);
  CHECK(pin_back.blocks() == pin.blocks());
}

TEST_CASE("compute job parsing names offending fields") {
  json good{{"mean", {{"base", "arithmetic"}, {"sigma", {{"kind", "geometric"}, {"alpha", 0.5}}}}},
            {"weights", {0.5, 0.5}},
            {"matrices",
             {json{{"dim", 1}, {"entries", {{1.0}}}}, json{{"dim", 1}, {"entries", {{4.0}}}}}},
            {"solver", {{"tol", 1e-12}, {"max_iter", 500}}}};
  ComputeJob job = compute_job_from_json(good);
  CHECK(job.op == ComputeJob::Op::nmean);
  CHECK(job.matrices.size() == 2);
  CHECK(job.solver.max_iter == 500);

  json bad = good;
  bad.erase("weights");
  CHECK_THROWS_WITH_AS(compute_job_from_json(bad), doctest::Contains("job.weights"),
                       ValidationError);

  json bad2 = good;
  bad2["weights"] = {0.5, 0.25, 0.25};
  CHECK_THROWS_WITH_AS(compute_job_from_json(bad2), doctest::Contains("job.weights"),
                       ValidationError);

  json bad3 = good;
  bad3["solver"]["damping"] = 1.5;
  CHECK_THROWS_WITH_AS(compute_job_from_json(bad3), doctest::Contains("job.solver.damping"),
                       ValidationError);

  json karcher{{"mean", {{"kind", "karcher"}}},
               {"weights", {1.0}},
               {"matrices", {json{{"dim", 1}, {"entries", {{2.0}}}}}}};
  CHECK(compute_job_from_json(karcher).op == ComputeJob::Op::karcher);

  json power = karcher;
  power["mean"] = {{"kind", "power"}, {"alpha", 0.5}};
  ComputeJob pj = compute_job_from_json(power);
  CHECK(pj.op == ComputeJob::Op::power);
  CHECK(pj.power_alpha == 0.5);
}
