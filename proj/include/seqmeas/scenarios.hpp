#pragma once

// Executable experiments over the closed forms and the circuit: the
// deterministic-path report, parameter sweeps, weak-limit convergence
// studies, and the two-meter correlation cross-check. Everything here is a
// pure function; grid points are independent and the emitted row order is
// canonical regardless of execution order.

#include <seqmeas/erasure.hpp>
#include <seqmeas/table.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace seqmeas {

/// One swept parameter with the others held fixed. Angle sweeps may couple
/// phi to theta to walk the diagonal where the deterministic roots live.
struct SweepSpec {
  enum class Parameter { Theta, Phi, G, Shots };

  Parameter parameter = Parameter::Theta;
  double from = 0;
  double to = 1;
  int steps = 41;
  bool coupleAngles = false;  // swept angle drives both theta and phi

  double fixedTheta = 0;
  double fixedPhi = 0;
  double fixedG = 0;         // 0 keeps angle sweeps closed-form plus Lueders circuit
  std::uint64_t shots = 0;   // 0 disables sampled rows on angle sweeps
  std::uint64_t seed = 0;
};

/// Grid rows for one scheme. Angle sweeps emit closed-form rows, plus
/// Lueders-point circuit rows (and optional sampled rows) for the
/// distinct-path scheme; strength sweeps emit weak-value estimates against
/// the closed-form value; shot sweeps emit sampled frequencies against the
/// exact circuit value. Strength and shot sweeps require a path.
ScenarioTable sweep(const SweepSpec& spec, Scheme scheme, const PathLabel* path = nullptr);

struct ParadoxCheck {
  std::string name;
  double value = 0;
  double expected = 0;
  double tolerance = 0;
  bool passed = false;
  Quantity quantity = Quantity::Probability;  // what kind of number `value` is
  Source source = Source::ClosedForm;         // where `value` came from
};

struct ParadoxReport {
  GoldenRoot<double> root;
  ScenarioTable table;
  std::vector<ParadoxCheck> checks;
  bool allPassed = false;
};

/// The flagship experiment at one golden root: distinct-path probabilities
/// from closed form, Lueders-point circuit, and sampling; the path weak
/// values; weak-value estimates at each listed strength; and the paradox
/// checks (both certain paths are B and C, unit weak values, sum rules).
/// Sampling uses seed + pathIndex per path so the four streams decouple.
ParadoxReport runDeterministicPathExperiment(const std::string& rootName, const std::vector<double>& strengths,
                                             std::uint64_t shots, std::uint64_t seed);

struct ConvergenceRow {
  double g = 0;
  double nonDisturbanceError = 0;  // |P(post|success) - |<Phi|psi>|^2|, O(g^2)
  double pointerError = 0;         // |Re estimate - Re weak value|, O(g^2)
  double meterStateDistance = 0;   // trace distance to the rotated pointer, O(g^3)
};

/// Error scalings along a decreasing strength list (at least 4 entries).
/// For a halving sequence the first two columns contract by factors near 4;
/// the meter-state distance contracts faster (near 8).
std::vector<ConvergenceRow> weakLimitConvergence(const SelectionAngles<double>& angles, const PathLabel& path,
                                                 const std::vector<double>& gList);

struct RsRow {
  double g = 0;
  double simulated = 0;  // post-selected <(sigma_y/2) x (sigma_y/2)> of the two meters
  double rhs = 0;        // (g^2/2) Re[{A2 A1}_w + {A1}_w conj({A2}_w)]
  double ratio = 0;      // simulated / rhs, when defined
  bool ratioDefined = false;
};

/// Two independent qubit meters coupled e^{i g A1 sigma_x} then
/// e^{i g A2 sigma_x} (no ancilla, no erasure); compares the post-selected
/// product of sigma_y/2 readings to the closed-form right-hand side. Rows
/// with vanishing rhs report the absolute simulated value instead of a
/// ratio.
std::vector<RsRow> reschSteinbergCheck(const SelectionAngles<double>& angles, const MatrixOp<double>& a1,
                                       const MatrixOp<double>& a2, const std::vector<double>& gList);

}  // namespace seqmeas
