#include <catch2/catch_amalgamated.hpp>

#include <seqmeas/tsvf.hpp>

#include <cmath>
#include <numbers>

using namespace seqmeas;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGoldenTheta = 1.0172219678978514;  // atan((1+sqrt 5)/2)

SelectionAngles<> randomAngles(std::uint64_t seed) {
  return {kPi * counterUniform(seed, 0), kPi * counterUniform(seed, 1)};
}

double ablFor(const SelectionAngles<>& angles, const KrausSet<>& set, const std::string& label) {
  return ablProbability(makeTwoStateVector(angles), set, label);
}

}  // namespace

TEST_CASE("transition amplitudes", "[tsvf]") {
  SECTION("aligned selections concentrate on the first path") {
    auto q = transitionAmplitudes(SelectionAngles<>{0, 0});
    REQUIRE(q.a == Catch::Approx(1 / std::sqrt(2.0)).margin(1e-15));
    REQUIRE(q.b == 0.0);
    REQUIRE(q.c == 0.0);
    REQUIRE(q.d == 0.0);
  }
  SECTION("symmetric point") {
    auto q = transitionAmplitudes(SelectionAngles<>{kPi / 4, kPi / 4});
    REQUIRE(q.a == Catch::Approx(0.3535534).margin(1e-7));
    REQUIRE(q.b == Catch::Approx(0.3535534).margin(1e-7));
    REQUIRE(q.c == Catch::Approx(0.3535534).margin(1e-7));
    REQUIRE(q.d == Catch::Approx(-0.3535534).margin(1e-7));
  }
  SECTION("golden point and its zero sums") {
    auto q = transitionAmplitudes(SelectionAngles<>{kGoldenTheta, kGoldenTheta});
    REQUIRE(q.a == Catch::Approx(0.1954395).margin(1e-7));
    REQUIRE(q.b == Catch::Approx(0.3162278).margin(1e-7));
    REQUIRE(q.c == Catch::Approx(0.3162278).margin(1e-7));
    REQUIRE(q.d == Catch::Approx(-0.5116673).margin(1e-7));
    REQUIRE(std::abs(q.a + q.c + q.d) < 1e-12);
    REQUIRE(std::abs(q.a + q.b + q.d) < 1e-12);
  }
  SECTION("squared sum is one half everywhere") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto q = transitionAmplitudes(randomAngles(seed));
      REQUIRE(q.squaredSum() == Catch::Approx(0.5).margin(1e-12));
    }
  }
  SECTION("closed form matches matrix algebra") {
    auto paths = pathOperators<double>();
    for (std::uint64_t seed = 300; seed < 340; ++seed) {
      SelectionAngles<> angles = randomAngles(seed);
      auto tsv = makeTwoStateVector(angles);
      auto q = transitionAmplitudes(angles);
      auto xs = q.asArray();
      for (int k = 0; k < 4; ++k) {
        Complex<> amp = tsv.post.amplitudes.dot(paths[k].entries * tsv.pre.amplitudes);
        REQUIRE(std::abs(amp - Complex<>(xs[k])) < 1e-14);
      }
      REQUIRE(std::abs(tsv.overlap() - Complex<>(q.sum())) < 1e-14);
    }
  }
}

TEST_CASE("sequential operator sets", "[tsvf]") {
  auto sets = sequentialKrausSets<double>();
  SECTION("first path operator is the cross projector") {
    Matrix<> expected(2, 2);
    expected << Complex<>(0.5), Complex<>(0), Complex<>(0.5), Complex<>(0);  // (1/sqrt2)|+><0|
    REQUIRE((sets.sequence.at("A").entries - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("paths sum to the identity") {
    Matrix<> acc = Matrix<>::Zero(2, 2);
    for (const auto& [name, op] : sets.sequence.outcomes) acc += op.entries;
    REQUIRE((acc - identityMatrix(1)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("parity sums in closed form") {
    auto mods = modularOperators<double>();
    Matrix<> even = 0.5 * (identityMatrix(1) - Complex<>(0, 1) * pauliY());
    Matrix<> odd = 0.5 * (identityMatrix(1) + Complex<>(0, 1) * pauliY());
    REQUIRE((mods.even.entries - even).cwiseAbs().maxCoeff() < 1e-15);
    REQUIRE((mods.odd.entries - odd).cwiseAbs().maxCoeff() < 1e-15);
    REQUIRE((mods.diff.entries - (even - odd)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("completeness tags are truthful") {
    REQUIRE(verifyCompleteness(sets.sequence, 1e-15));
    REQUIRE(verifyCompleteness(sets.modular, 1e-15));
    for (const auto& set : sets.distinctPath) {
      REQUIRE_FALSE(set.completenessTag);
      REQUIRE_FALSE(verifyCompleteness(set));
    }
  }
}

TEST_CASE("conditional outcome probabilities", "[tsvf]") {
  auto sets = sequentialKrausSets<double>();
  SECTION("aligned selections are certain of the first path") {
    REQUIRE(ablFor({0, 0}, sets.sequence, "A") == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("golden sequence probabilities") {
    SelectionAngles<> golden{kGoldenTheta, kGoldenTheta};
    REQUIRE(ablFor(golden, sets.sequence, "A") == Catch::Approx(0.0763932).margin(1e-7));
    REQUIRE(ablFor(golden, sets.sequence, "B") == Catch::Approx(0.2).margin(1e-10));
    REQUIRE(ablFor(golden, sets.sequence, "C") == Catch::Approx(0.2).margin(1e-10));
    REQUIRE(ablFor(golden, sets.sequence, "D") == Catch::Approx(0.5236068).margin(1e-7));
  }
  SECTION("golden two-outcome certainty") {
    SelectionAngles<> golden{kGoldenTheta, kGoldenTheta};
    REQUIRE(ablFor(golden, sets.distinctPath[1], "B") == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(ablFor(golden, sets.distinctPath[2], "C") == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("normalization over every set") {
    for (std::uint64_t seed = 1000; seed < 2000; ++seed) {
      SelectionAngles<> angles = randomAngles(seed);
      auto tsv = makeTwoStateVector(angles);
      for (const KrausSet<>* set : {&sets.sequence, &sets.modular}) {
        double total = 0;
        for (const auto& [name, op] : set->outcomes) total += ablProbability(tsv, *set, name);
        REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
      }
      for (const auto& set : sets.distinctPath) {
        double total = 0;
        for (const auto& [name, op] : set.outcomes) total += ablProbability(tsv, set, name);
        REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
      }
    }
  }
  SECTION("sequence probabilities equal twice the squared amplitudes") {
    for (std::uint64_t seed = 2000; seed < 2200; ++seed) {
      SelectionAngles<> angles = randomAngles(seed);
      auto tsv = makeTwoStateVector(angles);
      auto xs = transitionAmplitudes(angles).asArray();
      for (int k = 0; k < 4; ++k)
        REQUIRE(ablProbability(tsv, sets.sequence, std::string(kPathNames[k])) ==
                Catch::Approx(2 * xs[k] * xs[k]).margin(1e-12));
    }
  }
  SECTION("unknown labels and vanishing denominators are rejected") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{0.4, 0.9});
    REQUIRE_THROWS_AS(ablProbability(tsv, sets.sequence, "E"), std::invalid_argument);
    auto degenerate = makeTwoStateVector(SelectionAngles<>{kPi / 4, kPi / 2});
    REQUIRE_THROWS_AS(ablProbability(degenerate, sets.distinctPath[0], "A"), std::domain_error);
  }
}

TEST_CASE("weak values", "[tsvf]") {
  auto paths = pathOperators<double>();
  SECTION("aligned selections give a unit weak value for sigma z") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{0, 0});
    Complex<> w = weakValue(tsv, MatrixOp<>{pauliZ(), {}, {}});
    REQUIRE(std::abs(w - Complex<>(1)) < 1e-12);
  }
  SECTION("golden path weak values") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{kGoldenTheta, kGoldenTheta});
    double inverseGolden = (std::sqrt(5.0) - 1) / 2;
    REQUIRE(std::abs(weakValue(tsv, paths[0]) - Complex<>(inverseGolden)) < 1e-12);
    REQUIRE(std::abs(weakValue(tsv, paths[1]) - Complex<>(1)) < 1e-12);
    REQUIRE(std::abs(weakValue(tsv, paths[2]) - Complex<>(1)) < 1e-12);
    REQUIRE(std::abs(weakValue(tsv, paths[3]) - Complex<>(-1 - inverseGolden)) < 1e-12);
  }
  SECTION("symmetric point parity weak values") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{kPi / 4, kPi / 4});
    auto mods = modularOperators<double>();
    REQUIRE(std::abs(weakValue(tsv, mods.even)) < 1e-12);
    REQUIRE(std::abs(weakValue(tsv, mods.odd) - Complex<>(1)) < 1e-12);
  }
  SECTION("additivity, path sum, and parity identities") {
    auto mods = modularOperators<double>();
    for (std::uint64_t seed = 3000; seed < 3200; ++seed) {
      SelectionAngles<> angles = randomAngles(seed);
      auto tsv = makeTwoStateVector(angles);
      if (std::abs(tsv.overlap()) < 1e-6) continue;
      Complex<> sum = 0;
      for (const auto& op : paths) sum += weakValue(tsv, op);
      REQUIRE(std::abs(sum - Complex<>(1)) < 1e-12);
      Complex<> even = weakValue(tsv, mods.even);
      Complex<> odd = weakValue(tsv, mods.odd);
      REQUIRE(std::abs(even - weakValue(tsv, paths[0]) - weakValue(tsv, paths[3])) < 1e-12);
      REQUIRE(std::abs(weakValue(tsv, mods.diff) - (even - odd)) < 1e-12);
      REQUIRE(std::abs(std::imag(weakValue(tsv, paths[0]))) < 1e-12);
    }
  }
  SECTION("orthogonal selections are rejected") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{3 * kPi / 4, 0});
    REQUIRE(std::abs(tsv.overlap()) < 1e-12);
    REQUIRE_THROWS_AS(weakValue(tsv, paths[0]), std::domain_error);
  }
}

TEST_CASE("closed-form scenario tables", "[tsvf]") {
  SECTION("symmetric point parity probabilities") {
    ScenarioTable t = scenarioProbabilities(SelectionAngles<>{kPi / 4, kPi / 4}, Scheme::Modular);
    REQUIRE(t.rows.size() == 2);
    REQUIRE(t.rows[0].label == "ME");
    REQUIRE(t.rows[0].value == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(t.rows[1].value == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("golden distinct-path probabilities") {
    ScenarioTable t = scenarioProbabilities(SelectionAngles<>{kGoldenTheta, kGoldenTheta}, Scheme::DistinctPath);
    REQUIRE(t.rows[0].value == Catch::Approx(0.7236068).margin(1e-7));
    REQUIRE(t.rows[1].value == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(t.rows[2].value == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(t.rows[3].value == Catch::Approx(0.2763932).margin(1e-7));
  }
  SECTION("aligned selections, sequence scheme") {
    ScenarioTable t = scenarioProbabilities(SelectionAngles<>{0, 0}, Scheme::Sequence);
    REQUIRE(t.rows[0].value == Catch::Approx(1.0).margin(1e-12));
    for (int k = 1; k < 4; ++k) REQUIRE(t.rows[k].value == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("closed forms agree with the operator rule") {
    auto sets = sequentialKrausSets<double>();
    for (std::uint64_t seed = 4000; seed < 4100; ++seed) {
      SelectionAngles<> angles = randomAngles(seed);
      auto tsv = makeTwoStateVector(angles);
      for (Scheme scheme : {Scheme::Sequence, Scheme::Modular, Scheme::DistinctPath}) {
        ScenarioTable t = scenarioProbabilities(angles, scheme);
        for (const ScenarioRow& row : t.rows) {
          REQUIRE(row.value >= 0.0);
          REQUIRE(row.value <= 1.0);
          const KrausSet<>* set = nullptr;
          if (scheme == Scheme::Sequence) set = &sets.sequence;
          else if (scheme == Scheme::Modular) set = &sets.modular;
          else
            for (int k = 0; k < 4; ++k)
              if (std::string(kPathNames[k]) == row.label) set = &sets.distinctPath[k];
          REQUIRE(row.value == Catch::Approx(ablProbability(tsv, *set, row.label)).margin(1e-12));
        }
      }
    }
  }
  SECTION("reported angles are canonical") {
    ScenarioTable t = scenarioProbabilities(SelectionAngles<>{-0.5, kPi + 0.25}, Scheme::Sequence);
    REQUIRE(t.rows[0].theta == Catch::Approx(kPi - 0.5).margin(1e-14));
    REQUIRE(t.rows[0].phi == Catch::Approx(0.25).margin(1e-14));
  }
}

TEST_CASE("deterministic selection angles", "[tsvf]") {
  auto roots = deterministicAngles<double>();
  REQUIRE(roots.size() == 2);
  SECTION("closed-form root values") {
    REQUIRE(roots[0].cotangent == Catch::Approx(0.6180340).margin(1e-7));
    REQUIRE(roots[1].cotangent == Catch::Approx(-1.6180340).margin(1e-7));
    REQUIRE(roots[0].angles.theta == Catch::Approx(1.0172220).margin(1e-7));
    REQUIRE(roots[1].angles.theta == Catch::Approx(2.5880183).margin(1e-7));
  }
  for (const auto& root : roots) {
    SECTION("root '" + root.name + "' satisfies the defining equation") {
      double c = root.cotangent;
      REQUIRE(std::abs(c * c + c - 1) < 1e-12);
      REQUIRE(1 / std::tan(root.angles.theta) == Catch::Approx(c).margin(1e-12));
      auto q = transitionAmplitudes(root.angles);
      REQUIRE(std::abs(q.a + q.c + q.d) < 1e-12);
      REQUIRE(std::abs(q.a + q.b + q.d) < 1e-12);
      REQUIRE(root.angles.theta >= 0.0);
      REQUIRE(root.angles.theta < kPi);
    }
  }
}

TEST_CASE("certainty equals unit weak value for each path", "[tsvf]") {
  auto sets = sequentialKrausSets<double>();
  auto paths = pathOperators<double>();
  std::vector<SelectionAngles<>> grid;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) grid.push_back({i * kPi / 100, j * kPi / 100});
  for (const auto& root : deterministicAngles<double>()) grid.push_back(root.angles);

  int certainties = 0, exclusions = 0;
  for (const SelectionAngles<>& angles : grid) {
    auto tsv = makeTwoStateVector(angles);
    if (std::abs(tsv.overlap()) < 1e-6) continue;
    for (int k = 0; k < 4; ++k) {
      double p = ablProbability(tsv, sets.distinctPath[k], std::string(kPathNames[k]));
      Complex<> w = weakValue(tsv, paths[k]);
      bool pOne = std::abs(p - 1) < 1e-10, wOne = std::abs(w - Complex<>(1)) < 1e-10;
      bool pZero = std::abs(p) < 1e-10, wZero = std::abs(w) < 1e-10;
      REQUIRE(pOne == wOne);
      REQUIRE(pZero == wZero);
      certainties += pOne;
      exclusions += pZero;
    }
  }
  // the grid includes axes and the golden roots, so both directions bite
  REQUIRE(certainties >= 8);
  REQUIRE(exclusions >= 8);
}

TEST_CASE("two-time correlation closed form", "[tsvf]") {
  MatrixOp<> a1{outer(ket1(), ket1()), {}, {}};
  MatrixOp<> a2{outer(ketPlus(), ketPlus()), {}, {}};
  SECTION("golden cancellation at any strength") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{kGoldenTheta, kGoldenTheta});
    for (double g : {0.3, 0.1, 0.01}) REQUIRE(std::abs(reschSteinbergRHS(tsv, a1, a2, g)) < 1e-12);
  }
  SECTION("symmetric point value") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{kPi / 4, kPi / 4});
    REQUIRE(reschSteinbergRHS(tsv, a1, a2, 0.1) == Catch::Approx(0.0025).margin(1e-12));
  }
  SECTION("identity couplings") {
    auto tsv = makeTwoStateVector(SelectionAngles<>{0, 0});
    MatrixOp<> eye{identityMatrix(1), {}, {}};
    for (double g : {0.2, 0.05}) REQUIRE(reschSteinbergRHS(tsv, eye, eye, g) == Catch::Approx(g * g).margin(1e-15));
  }
}
