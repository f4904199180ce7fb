#include <seqmeas/cli.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <seqmeas/scenarios.hpp>

namespace seqmeas::cli {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutDirVariable = "SEQMEAS_OUT_DIR";

double goldenAngle(const std::string& rootName) {
  for (const auto& root : deterministicAngles<double>())
    if (root.name == rootName) return root.angles.theta;
  throw std::invalid_argument("unknown deterministic root '" + rootName + "'");
}

/// Angles arrive as radians or as the keywords golden / golden- naming the
/// two deterministic roots.
double parseAngle(const std::string& text) {
  if (text == "golden" || text == "golden+") return goldenAngle("+");
  if (text == "golden-") return goldenAngle("-");
  try {
    std::size_t used = 0;
    double value = std::stod(text, &used);
    if (used == text.size() && std::isfinite(value)) return value;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("angle '" + text + "' is neither a number nor golden/golden-");
}

Scheme parseScheme(const std::string& name) {
  if (name == "sequence") return Scheme::Sequence;
  if (name == "modular") return Scheme::Modular;
  if (name == "distinctPath") return Scheme::DistinctPath;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

/// The double nearest the 10-digit rendering, so JSON numbers agree with
/// the CSV text.
double roundTrip(double value) { return std::strtod(formatReal(value).c_str(), nullptr); }

struct CommandResult {
  ScenarioTable table;
  std::vector<ScenarioRow> checkRows;  // trailing CSV rows, paradox only
  nlohmann::ordered_json checks;       // paradox only
  bool hasChecks = false;
  bool allPassed = false;
  std::uint64_t seed = 0;
};

void writeCsvRow(std::ostream& os, const ScenarioRow& row) {
  os << formatReal(row.theta) << ',' << formatReal(row.phi) << ',' << row.scheme << ',' << row.label << ','
     << quantityName(row.quantity) << ',' << formatReal(row.value) << ',' << sourceName(row.source) << '\n';
}

void emit(std::ostream& os, const std::string& format, const std::string& commandLine,
          const CommandResult& result) {
  if (format == "csv") {
    os << "theta,phi,scheme,label,quantity,value,source\n";
    for (const ScenarioRow& row : result.table.rows) writeCsvRow(os, row);
    for (const ScenarioRow& row : result.checkRows) writeCsvRow(os, row);
    return;
  }
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = commandLine;
  j["seed"] = result.seed;
  auto rows = nlohmann::ordered_json::array();
  for (const ScenarioRow& row : result.table.rows)
    rows.push_back({{"theta", roundTrip(row.theta)},
                    {"phi", roundTrip(row.phi)},
                    {"scheme", row.scheme},
                    {"label", row.label},
                    {"quantity", std::string(quantityName(row.quantity))},
                    {"value", roundTrip(row.value)},
                    {"source", std::string(sourceName(row.source))}});
  j["rows"] = std::move(rows);
  if (result.hasChecks) {
    j["checks"] = result.checks;
    j["allPassed"] = result.allPassed;
  }
  os << j.dump(2) << '\n';
}

struct ParadoxArgs {
  std::string root = "+";
  std::vector<double> strengths;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 42;
};

CommandResult runParadox(const ParadoxArgs& args) {
  std::vector<double> strengths = args.strengths.empty() ? std::vector<double>{1.0} : args.strengths;
  ParadoxReport report = runDeterministicPathExperiment(args.root, strengths, args.shots, args.seed);
  CommandResult result;
  result.table = report.table;
  result.seed = args.seed;
  result.hasChecks = true;
  result.allPassed = report.allPassed;
  result.checks = nlohmann::ordered_json::array();
  for (const ParadoxCheck& check : report.checks) {
    result.checkRows.push_back({report.root.angles.theta, report.root.angles.phi, "check", check.name,
                                check.quantity, check.value, check.source});
    result.checks.push_back({{"name", check.name},
                             {"value", roundTrip(check.value)},
                             {"expected", roundTrip(check.expected)},
                             {"tolerance", check.tolerance},
                             {"passed", check.passed}});
  }
  return result;
}

struct SweepArgs {
  std::string param = "theta";
  double from = 0;
  double to = 1;
  int steps = 41;
  std::string scheme = "distinctPath";
  std::string path;
  std::string theta = "0";
  std::string phi = "0";
  bool coupleAngles = false;
  double g = 0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 42;
};

CommandResult runSweep(const SweepArgs& args) {
  SweepSpec spec;
  if (args.param == "theta") spec.parameter = SweepSpec::Parameter::Theta;
  else if (args.param == "phi") spec.parameter = SweepSpec::Parameter::Phi;
  else if (args.param == "g") spec.parameter = SweepSpec::Parameter::G;
  else if (args.param == "shots") spec.parameter = SweepSpec::Parameter::Shots;
  else throw std::invalid_argument("unknown sweep parameter '" + args.param + "'");
  spec.from = args.from;
  spec.to = args.to;
  spec.steps = args.steps;
  spec.coupleAngles = args.coupleAngles;
  spec.fixedTheta = parseAngle(args.theta);
  spec.fixedPhi = parseAngle(args.phi);
  spec.fixedG = args.g;
  spec.shots = args.shots;
  spec.seed = args.seed;

  CommandResult result;
  result.seed = args.seed;
  if (args.path.empty()) {
    result.table = sweep(spec, parseScheme(args.scheme));
  } else {
    PathLabel path = PathLabel::fromName(args.path);
    result.table = sweep(spec, parseScheme(args.scheme), &path);
  }
  return result;
}

struct CircuitArgs {
  std::string theta;
  std::string phi;
  std::string path;
  double strength = 1.0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 42;
};

CommandResult runCircuit(const CircuitArgs& args) {
  SelectionAngles<double> angles{parseAngle(args.theta), parseAngle(args.phi)};
  PathLabel path = PathLabel::fromName(args.path);
  Strength<double> strength = Strength<double>::fromNormalized(args.strength);
  SelectionAngles<double> canon = angles.canonical();
  const std::string scheme(schemeName(Scheme::DistinctPath));
  const std::string tag = "@s=" + formatReal(args.strength);

  CommandResult result;
  result.seed = args.seed;
  auto push = [&](std::string label, Quantity quantity, double value, Source source) {
    result.table.rows.push_back({canon.theta, canon.phi, scheme, std::move(label), quantity, value, source});
  };

  ScenarioTable closed = scenarioProbabilities(angles, Scheme::DistinctPath);
  push(path.name(), Quantity::Probability, closed.rows[path.pathIndex()].value, Source::ClosedForm);
  Complex<double> w = weakValue(makeTwoStateVector(angles), pathOperators<double>()[path.pathIndex()]);
  push(path.name(), Quantity::WeakValueRe, std::real(w), Source::ClosedForm);
  push(path.name(), Quantity::WeakValueIm, std::imag(w), Source::ClosedForm);

  ProtocolOutcome<double> outcome = runProtocol(angles, path, strength);
  const Ket<double>& meter = outcome.success.postSelectedMeter;
  double meterNorm = meter.squaredNorm();
  if (meterNorm < 1e-24) throw std::domain_error("circuit: post-selection annihilates the success branch");
  push("success" + tag, Quantity::MeterStat, outcome.success.probability, Source::Circuit);
  push("postSelect" + tag, Quantity::MeterStat, outcome.success.postSelectProbability, Source::Circuit);
  push("meterOne" + tag, Quantity::MeterStat, std::norm(meter.amplitudes(1)) / meterNorm, Source::Circuit);
  if (strength.g > 0) {
    Complex<double> estimate = estimateWeakValueFromMeter(outcome, outcome.strength);
    push(path.name() + tag, Quantity::WeakValueRe, std::real(estimate), Source::Circuit);
    push(path.name() + tag, Quantity::WeakValueIm, std::imag(estimate), Source::Circuit);
  }
  if (args.shots > 0) {
    ShotTally tally = sampleProtocol(angles, path, strength, args.shots, args.seed);
    push("meterOne" + tag, Quantity::MeterStat, tally.conditionalMeterOne(), Source::Sampled);
  }
  result.table.sortCanonical();
  return result;
}

CommandResult runAbl(const std::string& thetaText, const std::string& phiText, const std::string& schemeText) {
  SelectionAngles<double> angles{parseAngle(thetaText), parseAngle(phiText)};
  CommandResult result;
  result.table = scenarioProbabilities(angles, parseScheme(schemeText));
  result.table.sortCanonical();
  return result;
}

CommandResult runWeakValue(const std::string& thetaText, const std::string& phiText, const std::string& opName) {
  SelectionAngles<double> angles{parseAngle(thetaText), parseAngle(phiText)};
  MatrixOp<double> op;
  std::string scheme;
  bool isPath = opName.size() == 1 && opName.find_first_of("ABCD") == 0;
  if (isPath) {
    op = pathOperators<double>()[opName[0] - 'A'];
    scheme = schemeName(Scheme::Sequence);
  } else {
    ModularOperators<double> mods = modularOperators<double>();
    if (opName == "ME") op = mods.even;
    else if (opName == "MO") op = mods.odd;
    else if (opName == "SXZ") op = mods.diff;
    else throw std::invalid_argument("unknown operator '" + opName + "'");
    scheme = schemeName(Scheme::Modular);
  }
  Complex<double> w = weakValue(makeTwoStateVector(angles), op);
  SelectionAngles<double> canon = angles.canonical();
  CommandResult result;
  result.table.rows.push_back(
      {canon.theta, canon.phi, scheme, opName, Quantity::WeakValueRe, std::real(w), Source::ClosedForm});
  result.table.rows.push_back(
      {canon.theta, canon.phi, scheme, opName, Quantity::WeakValueIm, std::imag(w), Source::ClosedForm});
  return result;
}

CommandResult runResch(const std::string& thetaText, const std::string& phiText, std::vector<double> gList) {
  SelectionAngles<double> angles{parseAngle(thetaText), parseAngle(phiText)};
  if (gList.empty()) gList = {0.1, 0.05, 0.025};
  MatrixOp<double> a1{outer(ket1<double>(), ket1<double>()), {}, {}};
  MatrixOp<double> a2{outer(ketPlus<double>(), ketPlus<double>()), {}, {}};
  std::vector<RsRow> rows = reschSteinbergCheck(angles, a1, a2, gList);
  SelectionAngles<double> canon = angles.canonical();
  CommandResult result;
  auto push = [&](std::string label, double value, Source source) {
    result.table.rows.push_back(
        {canon.theta, canon.phi, "correlation", std::move(label), Quantity::MeterStat, value, source});
  };
  for (const RsRow& row : rows) {
    std::string tag = "@g=" + formatReal(row.g);
    push("RS" + tag, row.rhs, Source::ClosedForm);
    push("RS" + tag, row.simulated, Source::Circuit);
    if (row.ratioDefined) push("RSratio" + tag, row.ratio, Source::Circuit);
    else push("RSabs" + tag, std::abs(row.simulated), Source::Circuit);
  }
  result.table.sortCanonical();
  return result;
}

std::ostream& openTarget(const std::string& outputPath, std::ofstream& file, std::ostream& fallback) {
  if (outputPath.empty()) return fallback;
  std::filesystem::path path(outputPath);
  if (path.is_relative()) {
    const char* dir = std::getenv(kOutDirVariable);
    if (dir != nullptr && *dir != '\0') path = std::filesystem::path(dir) / path;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output file " + path.string());
  return file;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential weak and strong measurements on pre- and post-selected qubits"};
  app.name("seqmeas");
  app.require_subcommand(1);

  std::string format = "csv";
  std::string outputPath;
  auto addCommonOptions = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output", outputPath,
                    "output file; relative paths land in $" + std::string(kOutDirVariable) + " when set");
  };

  ParadoxArgs paradoxArgs;
  CLI::App* paradox = app.add_subcommand("paradox", "deterministic-path experiment at a golden root");
  paradox->add_option("--root", paradoxArgs.root, "deterministic root")->check(CLI::IsMember({"+", "-"}));
  paradox->add_option("--strength", paradoxArgs.strengths, "normalized strengths for estimate checks");
  paradox->add_option("--shots", paradoxArgs.shots, "shots per path");
  paradox->add_option("--seed", paradoxArgs.seed, "base sampling seed");
  addCommonOptions(paradox);

  SweepArgs sweepArgs;
  CLI::App* sweepCmd = app.add_subcommand("sweep", "scan one parameter with the others fixed");
  sweepCmd->add_option("--param", sweepArgs.param, "swept parameter")
      ->check(CLI::IsMember({"theta", "phi", "g", "shots"}));
  sweepCmd->add_option("--from", sweepArgs.from, "first grid value")->required();
  sweepCmd->add_option("--to", sweepArgs.to, "last grid value")->required();
  sweepCmd->add_option("--steps", sweepArgs.steps, "grid size")->check(CLI::Range(2, 100000));
  sweepCmd->add_option("--scheme", sweepArgs.scheme, "measurement scheme")
      ->check(CLI::IsMember({"sequence", "modular", "distinctPath"}));
  sweepCmd->add_option("--path", sweepArgs.path, "path for circuit rows")
      ->check(CLI::IsMember({"A", "B", "C", "D"}));
  sweepCmd->add_option("--theta", sweepArgs.theta, "fixed theta (radians or golden/golden-)");
  sweepCmd->add_option("--phi", sweepArgs.phi, "fixed phi (radians or golden/golden-)");
  sweepCmd->add_flag("--couple-angles", sweepArgs.coupleAngles, "drive theta and phi together");
  sweepCmd->add_option("--g", sweepArgs.g, "meter rotation angle for shot sweeps (0 = maximal)");
  sweepCmd->add_option("--shots", sweepArgs.shots, "shots per sampled row (0 = none)");
  sweepCmd->add_option("--seed", sweepArgs.seed, "base sampling seed");
  addCommonOptions(sweepCmd);

  CircuitArgs circuitArgs;
  CLI::App* circuit = app.add_subcommand("circuit", "run the erasure protocol once");
  circuit->add_option("--theta", circuitArgs.theta, "pre-selection angle")->required();
  circuit->add_option("--phi", circuitArgs.phi, "post-selection angle")->required();
  circuit->add_option("--path", circuitArgs.path, "marked path")->required()
      ->check(CLI::IsMember({"A", "B", "C", "D"}));
  circuit->add_option("--strength", circuitArgs.strength, "normalized strength in [0, 1]");
  circuit->add_option("--shots", circuitArgs.shots, "sampled shots (0 = none)");
  circuit->add_option("--seed", circuitArgs.seed, "sampling seed");
  addCommonOptions(circuit);

  std::string ablTheta, ablPhi, ablScheme = "sequence";
  CLI::App* abl = app.add_subcommand("abl", "closed-form outcome probabilities");
  abl->add_option("--theta", ablTheta, "pre-selection angle")->required();
  abl->add_option("--phi", ablPhi, "post-selection angle")->required();
  abl->add_option("--scheme", ablScheme, "measurement scheme")
      ->check(CLI::IsMember({"sequence", "modular", "distinctPath"}));
  addCommonOptions(abl);

  std::string wvTheta, wvPhi, wvOp;
  CLI::App* weakvalue = app.add_subcommand("weakvalue", "closed-form weak value of one operator");
  weakvalue->add_option("--theta", wvTheta, "pre-selection angle")->required();
  weakvalue->add_option("--phi", wvPhi, "post-selection angle")->required();
  weakvalue->add_option("--op", wvOp, "operator name")
      ->required()
      ->check(CLI::IsMember({"A", "B", "C", "D", "ME", "MO", "SXZ"}));
  addCommonOptions(weakvalue);

  std::string rsTheta, rsPhi;
  std::vector<double> rsG;
  CLI::App* resch = app.add_subcommand("resch", "two-pointer correlation against its closed form");
  resch->add_option("--theta", rsTheta, "pre-selection angle")->required();
  resch->add_option("--phi", rsPhi, "post-selection angle")->required();
  resch->add_option("--g", rsG, "meter rotation angles (default 0.1 0.05 0.025)");
  addCommonOptions(resch);

  std::string commandLine;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) commandLine += ' ';
    commandLine += argv[i];
  }

  try {
    app.parse(argc, argv);
    CommandResult result;
    if (paradox->parsed()) result = runParadox(paradoxArgs);
    else if (sweepCmd->parsed()) result = runSweep(sweepArgs);
    else if (circuit->parsed()) result = runCircuit(circuitArgs);
    else if (abl->parsed()) result = runAbl(ablTheta, ablPhi, ablScheme);
    else if (weakvalue->parsed()) result = runWeakValue(wvTheta, wvPhi, wvOp);
    else result = runResch(rsTheta, rsPhi, rsG);
    std::ofstream file;
    emit(openTarget(outputPath, file, out), format, commandLine, result);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace seqmeas::cli
