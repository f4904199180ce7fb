#include <seqmeas/scenarios.hpp>

#include <cmath>
#include <stdexcept>

namespace seqmeas {

namespace {

constexpr double kTightTol = 1e-10;

ScenarioRow makeRow(const SelectionAngles<double>& angles, std::string scheme, std::string label,
                    Quantity quantity, double value, Source source) {
  SelectionAngles<double> canon = angles.canonical();
  return {canon.theta, canon.phi, std::move(scheme), std::move(label), quantity, value, source};
}

/// Conditional meter-1 probability of the success branch, the circuit's
/// reading of one distinct-path probability at the Lueders point.
double circuitMeterOne(const SelectionAngles<double>& angles, const PathLabel& path, const Strength<double>& s) {
  auto out = runProtocol(angles, path, s);
  const Ket<double>& meter = out.success.postSelectedMeter;
  double n2 = meter.squaredNorm();
  if (n2 < 1e-24) throw std::domain_error("circuitMeterOne: post-selection annihilates the success branch");
  return std::norm(meter.amplitudes(1)) / n2;
}

void validate(const SweepSpec& spec) {
  if (!(spec.from < spec.to)) throw std::invalid_argument("sweep: require from < to");
  if (spec.steps < 2 || spec.steps > 100000) throw std::invalid_argument("sweep: steps must lie in [2, 100000]");
  if (spec.coupleAngles && spec.parameter != SweepSpec::Parameter::Theta &&
      spec.parameter != SweepSpec::Parameter::Phi)
    throw std::invalid_argument("sweep: coupled angles need an angle parameter");
  if (spec.parameter == SweepSpec::Parameter::G && !(spec.from > 0))
    throw std::invalid_argument("sweep: strength sweeps start above 0");
}

}  // namespace

ScenarioTable sweep(const SweepSpec& spec, Scheme scheme, const PathLabel* path) {
  validate(spec);
  const bool pathSweep = spec.parameter == SweepSpec::Parameter::G || spec.parameter == SweepSpec::Parameter::Shots;
  if (pathSweep && path == nullptr) throw std::invalid_argument("sweep: strength and shot sweeps need a path");

  ScenarioTable table;
  auto gridValue = [&](int i) { return spec.from + i * (spec.to - spec.from) / (spec.steps - 1); };

  switch (spec.parameter) {
    case SweepSpec::Parameter::Theta:
    case SweepSpec::Parameter::Phi: {
      Strength<double> lueders = Strength<double>::fromNormalized(1.0);
      for (int i = 0; i < spec.steps; ++i) {
        double v = gridValue(i);
        SelectionAngles<double> angles;
        if (spec.coupleAngles) angles = {v, v};
        else if (spec.parameter == SweepSpec::Parameter::Theta) angles = {v, spec.fixedPhi};
        else angles = {spec.fixedTheta, v};
        try {
          ScenarioTable point = scenarioProbabilities(angles, scheme);
          if (scheme == Scheme::DistinctPath)
            for (int k = 0; k < 4; ++k) {
              PathLabel p(k / 2, k % 2);
              if (path != nullptr && !(p == *path)) continue;
              std::string name = p.name();
              point.rows.push_back(makeRow(angles, std::string(schemeName(scheme)), name, Quantity::Probability,
                                           circuitMeterOne(angles, p, lueders), Source::Circuit));
              if (spec.shots > 0) {
                ShotTally tally = sampleProtocol(angles, p, lueders, spec.shots, spec.seed + p.pathIndex(),
                                                 static_cast<std::uint64_t>(i) * spec.shots);
                point.rows.push_back(makeRow(angles, std::string(schemeName(scheme)), name, Quantity::Probability,
                                             tally.conditionalMeterOne(), Source::Sampled));
              }
            }
          table.append(point);
        } catch (const std::domain_error&) {
          // Forbidden pre/post pairs fall off the grid instead of aborting it.
        }
      }
      break;
    }
    case SweepSpec::Parameter::G: {
      SelectionAngles<double> angles{spec.fixedTheta, spec.fixedPhi};
      auto tsv = makeTwoStateVector(angles);
      double w = std::real(weakValue(tsv, pathOperators<double>()[path->pathIndex()]));
      for (int i = 0; i < spec.steps; ++i) {
        double g = gridValue(i);
        std::string label = path->name() + "@g=" + formatReal(g);
        auto out = runProtocol(angles, *path, Strength<double>::fromAngle(g));
        double estimate = std::real(estimateWeakValueFromMeter(out, out.strength));
        table.rows.push_back(
            makeRow(angles, std::string(schemeName(scheme)), label, Quantity::WeakValueRe, w, Source::ClosedForm));
        table.rows.push_back(makeRow(angles, std::string(schemeName(scheme)), label, Quantity::WeakValueRe,
                                     estimate, Source::Circuit));
      }
      break;
    }
    case SweepSpec::Parameter::Shots: {
      SelectionAngles<double> angles{spec.fixedTheta, spec.fixedPhi};
      Strength<double> strength =
          spec.fixedG > 0 ? Strength<double>::fromAngle(spec.fixedG) : Strength<double>::fromNormalized(1.0);
      table.rows.push_back(makeRow(angles, std::string(schemeName(scheme)), path->name(), Quantity::Probability,
                                   circuitMeterOne(angles, *path, strength), Source::Circuit));
      for (int i = 0; i < spec.steps; ++i) {
        auto shots = static_cast<std::uint64_t>(std::llround(gridValue(i)));
        if (shots < 1) throw std::invalid_argument("sweep: shot counts must be at least 1");
        ShotTally tally = sampleProtocol(angles, *path, strength, shots, spec.seed);
        table.rows.push_back(makeRow(angles, std::string(schemeName(scheme)),
                                     path->name() + "@shots=" + std::to_string(shots), Quantity::Probability,
                                     tally.conditionalMeterOne(), Source::Sampled));
      }
      break;
    }
  }
  table.sortCanonical();
  return table;
}

ParadoxReport runDeterministicPathExperiment(const std::string& rootName, const std::vector<double>& strengths,
                                             std::uint64_t shots, std::uint64_t seed) {
  if (strengths.empty()) throw std::invalid_argument("paradox: need at least one strength");
  for (double s : strengths)
    if (!(s > 0 && s <= 1))
      throw std::invalid_argument("paradox: estimate strengths must lie in (0, 1]");
  if (shots < 1) throw std::invalid_argument("paradox: need at least one shot");

  ParadoxReport report;
  bool found = false;
  for (const auto& root : deterministicAngles<double>())
    if (root.name == rootName) {
      report.root = root;
      found = true;
    }
  if (!found) throw std::invalid_argument("paradox: unknown root '" + rootName + "' (use \"+\" or \"-\")");

  const SelectionAngles<double>& angles = report.root.angles;
  auto tsv = makeTwoStateVector(angles);
  auto paths = pathOperators<double>();
  Strength<double> lueders = Strength<double>::fromNormalized(1.0);
  const std::string scheme(schemeName(Scheme::DistinctPath));

  report.table = scenarioProbabilities(angles, Scheme::DistinctPath);
  double closed[4], circuit[4], sampled[4], weak[4];
  for (int k = 0; k < 4; ++k) closed[k] = report.table.rows[k].value;
  for (int k = 0; k < 4; ++k) {
    PathLabel p(k / 2, k % 2);
    circuit[k] = circuitMeterOne(angles, p, lueders);
    ShotTally tally = sampleProtocol(angles, p, lueders, shots, seed + p.pathIndex());
    sampled[k] = tally.conditionalMeterOne();
    weak[k] = std::real(weakValue(tsv, paths[k]));
    report.table.rows.push_back(makeRow(angles, scheme, p.name(), Quantity::Probability, circuit[k], Source::Circuit));
    report.table.rows.push_back(makeRow(angles, scheme, p.name(), Quantity::Probability, sampled[k], Source::Sampled));
    report.table.rows.push_back(makeRow(angles, scheme, p.name(), Quantity::WeakValueRe, weak[k], Source::ClosedForm));
  }
  for (double s : strengths)
    for (int k = 0; k < 4; ++k) {
      PathLabel p(k / 2, k % 2);
      auto out = runProtocol(angles, p, Strength<double>::fromNormalized(s));
      double estimate = std::real(estimateWeakValueFromMeter(out, out.strength));
      report.table.rows.push_back(makeRow(angles, scheme, p.name() + "@s=" + formatReal(s), Quantity::WeakValueRe,
                                          estimate, Source::Circuit));
    }

  auto check = [&](std::string name, double value, double expected, double tolerance, Quantity quantity,
                   Source source) {
    report.checks.push_back(
        {std::move(name), value, expected, tolerance, std::abs(value - expected) <= tolerance, quantity, source});
  };
  check("PB_closedForm", closed[1], 1.0, kTightTol, Quantity::Probability, Source::ClosedForm);
  check("PC_closedForm", closed[2], 1.0, kTightTol, Quantity::Probability, Source::ClosedForm);
  check("PB_circuit", circuit[1], 1.0, kTightTol, Quantity::Probability, Source::Circuit);
  check("PC_circuit", circuit[2], 1.0, kTightTol, Quantity::Probability, Source::Circuit);
  check("PB_sampled", sampled[1], 1.0, 0.0, Quantity::Probability, Source::Sampled);
  check("PC_sampled", sampled[2], 1.0, 0.0, Quantity::Probability, Source::Sampled);
  check("WB_unit", weak[1], 1.0, kTightTol, Quantity::WeakValueRe, Source::ClosedForm);
  check("WC_unit", weak[2], 1.0, kTightTol, Quantity::WeakValueRe, Source::ClosedForm);
  check("WA_plus_WD", weak[0] + weak[3], -1.0, kTightTol, Quantity::WeakValueRe, Source::ClosedForm);
  check("weakValueSum", weak[0] + weak[1] + weak[2] + weak[3], 1.0, kTightTol, Quantity::WeakValueRe,
        Source::ClosedForm);
  int certain = 0;
  for (double p : closed) certain += std::abs(p - 1.0) <= kTightTol;
  bool bc = certain == 2 && std::abs(closed[1] - 1.0) <= kTightTol && std::abs(closed[2] - 1.0) <= kTightTol;
  check("certainPathsAreBC", bc ? 1.0 : 0.0, 1.0, 0.0, Quantity::MeterStat, Source::ClosedForm);
  for (double s : strengths) {
    auto out = runProtocol(angles, PathLabel::fromName("C"), Strength<double>::fromNormalized(s));
    double estimate = std::real(estimateWeakValueFromMeter(out, out.strength));
    check("estimateC@s=" + formatReal(s), estimate, 1.0, kTightTol, Quantity::WeakValueRe, Source::Circuit);
  }

  report.allPassed = true;
  for (const ParadoxCheck& c : report.checks) report.allPassed = report.allPassed && c.passed;
  report.table.sortCanonical();
  return report;
}

std::vector<ConvergenceRow> weakLimitConvergence(const SelectionAngles<double>& angles, const PathLabel& path,
                                                 const std::vector<double>& gList) {
  if (gList.size() < 4) throw std::invalid_argument("weakLimitConvergence: need at least 4 strengths");
  for (std::size_t i = 0; i < gList.size(); ++i) {
    if (!(gList[i] > 0)) throw std::invalid_argument("weakLimitConvergence: strengths must be positive");
    if (i > 0 && !(gList[i] < gList[i - 1]))
      throw std::invalid_argument("weakLimitConvergence: strengths must strictly decrease");
  }

  auto tsv = makeTwoStateVector(angles);
  double selectProbability = std::norm(tsv.overlap());
  double w = std::real(weakValue(tsv, pathOperators<double>()[path.pathIndex()]));

  std::vector<ConvergenceRow> rows;
  rows.reserve(gList.size());
  for (double g : gList) {
    auto out = runProtocol(angles, path, Strength<double>::fromAngle(g));
    ConvergenceRow row;
    row.g = g;
    row.nonDisturbanceError = std::abs(out.success.postSelectProbability - selectProbability);
    row.pointerError = std::abs(std::real(estimateWeakValueFromMeter(out, out.strength)) - w);
    Ket<double> reference = applyGate(ket0<double>(), pointerRotation(g * w).entries, {0});
    double f = fidelity(out.success.postSelectedMeter, reference);
    row.meterStateDistance = std::sqrt(std::max(0.0, 1.0 - f * f));
    rows.push_back(row);
  }
  return rows;
}

std::vector<RsRow> reschSteinbergCheck(const SelectionAngles<double>& angles, const MatrixOp<double>& a1,
                                       const MatrixOp<double>& a2, const std::vector<double>& gList) {
  if (gList.empty()) throw std::invalid_argument("reschSteinbergCheck: need at least one strength");
  auto tsv = makeTwoStateVector(angles);
  if (std::abs(tsv.overlap()) < 1e-12)
    throw std::domain_error("reschSteinbergCheck: orthogonal pre/post selection");

  Matrix<double> sigmaX = pauliX<double>();
  Matrix<double> coupling1 = Eigen::kroneckerProduct(a1.entries, sigmaX).eval();
  Matrix<double> coupling2 = Eigen::kroneckerProduct(a2.entries, sigmaX).eval();
  Matrix<double> product = Eigen::kroneckerProduct(pauliY<double>(), pauliY<double>()).eval();

  std::vector<RsRow> rows;
  rows.reserve(gList.size());
  for (double g : gList) {
    if (!(g > 0)) throw std::invalid_argument("reschSteinbergCheck: strengths must be positive");
    Ket<double> state = tensor(tensor(tsv.pre, ket0<double>()), ket0<double>());
    state = applyGate(state, expiHermitian(coupling1, g), {0, 1});
    state = applyGate(state, expiHermitian(coupling2, g), {0, 2});
    Ket<double> meters = contractWire(state, 0, tsv.post);
    RsRow row;
    row.g = g;
    row.simulated = meterExpectation(meters, product) / 4;
    row.rhs = reschSteinbergRHS(tsv, a1, a2, g);
    row.ratioDefined = std::abs(row.rhs) > 1e-10 * g * g;
    row.ratio = row.ratioDefined ? row.simulated / row.rhs : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace seqmeas
