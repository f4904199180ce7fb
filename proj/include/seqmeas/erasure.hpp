#pragma once

// Variable-strength sequential measurement of one path operator on a 3-wire
// register (system = wire 0, ancilla = wire 1, meter = wire 2):
//
//   1. prepare pre x |0> x |0>
//   2. CNOT, system controlling ancilla (records the early Z outcome)
//   3. C_ij R(g): rotate the meter by R(g) = e^{i g sigma_x} exactly when the
//      system is |i> in the X basis and the ancilla is |j> in Z
//   4. measure sigma_x on the ancilla; |+> erases the record (success), |->
//      leaves a branch needing correction (failure)
//   5. post-select the system on <Phi| and read the meter
//
// Both erasure branches are retained. The failure branch equals, after a
// sigma_z on the system, the success branch of the label-swapped run.

#include <seqmeas/qcore.hpp>
#include <seqmeas/tsvf.hpp>

#include <array>
#include <cmath>
#include <string>

namespace seqmeas {

inline constexpr int kSystemWire = 0;
inline constexpr int kAncillaWire = 1;
inline constexpr int kMeterWire = 2;

/// Which path operator the protocol measures: xIndex picks |+> (0) or |->
/// (1) at the later time, zIndex picks |0> or |1> at the earlier time.
/// Names: A=(+,0), B=(+,1), C=(-,0), D=(-,1).
struct PathLabel {
  int xIndex = 0;
  int zIndex = 0;

  PathLabel() = default;
  PathLabel(int x, int z) : xIndex(x), zIndex(z) {
    if ((x != 0 && x != 1) || (z != 0 && z != 1)) throw std::invalid_argument("PathLabel: indices must be 0 or 1");
  }

  static PathLabel fromName(const std::string& name) {
    for (int k = 0; k < 4; ++k)
      if (name == kPathNames[k]) return PathLabel(k / 2, k % 2);
    throw std::invalid_argument("PathLabel: unknown path name '" + name + "'");
  }

  int pathIndex() const { return 2 * xIndex + zIndex; }
  std::string name() const { return std::string(kPathNames[pathIndex()]); }

  /// The label the failure branch effectively measures: A<->C, B<->D.
  PathLabel swapped() const { return PathLabel(1 - xIndex, zIndex); }

  bool operator==(const PathLabel&) const = default;
};

/// Measurement strength: s in [0,1] normalized so that s=1 is the Lueders
/// point, g = s*pi/2 the meter rotation angle.
template <typename Real = double>
struct Strength {
  Real s = 0;
  Real g = 0;

  static Strength fromNormalized(Real s) {
    if (!(s >= Real{0} && s <= Real{1})) throw std::invalid_argument("Strength: s must lie in [0, 1]");
    return {s, s * std::acos(Real{-1}) / 2};
  }

  static Strength fromAngle(Real g) {
    const Real halfPi = std::acos(Real{-1}) / 2;
    if (!(g >= Real{0} && g <= halfPi)) throw std::invalid_argument("Strength: g must lie in [0, pi/2]");
    return {g / halfPi, g};
  }
};

// ---- circuit gates ----

template <typename Real = double>
MatrixOp<Real> cnotGate() {
  Matrix<Real> m = Matrix<Real>::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  return {m, {kSystemWire, kAncillaWire}, true};
}

/// R(g) = e^{i g sigma_x} = cos(g) I + i sin(g) sigma_x; R(g)|0> is the
/// shifted pointer |g>.
template <typename Real = double>
MatrixOp<Real> pointerRotation(Real g) {
  Matrix<Real> m = std::cos(g) * identityMatrix<Real>(1) + Complex<Real>(0, std::sin(g)) * pauliX<Real>();
  return {m, {kMeterWire}, true};
}

/// C_ij R(g): applies R(g) to the meter exactly on the (system |i> in X,
/// ancilla |j> in Z) subspace, identity elsewhere.
template <typename Real = double>
MatrixOp<Real> controlledPointerRotation(const PathLabel& path, Real g) {
  Ket<Real> xAxis = basisKet<Real>(Basis::X, path.xIndex);
  Ket<Real> zAxis = basisKet<Real>(Basis::Z, path.zIndex);
  Matrix<Real> control = Eigen::kroneckerProduct(outer(xAxis, xAxis), outer(zAxis, zAxis)).eval();
  Matrix<Real> rest = identityMatrix<Real>(2) - control;
  Matrix<Real> m = Eigen::kroneckerProduct(control, pointerRotation<Real>(g).entries).eval() +
                   Eigen::kroneckerProduct(rest, identityMatrix<Real>(1)).eval();
  return {m, {kSystemWire, kAncillaWire, kMeterWire}, true};
}

template <typename Real = double>
struct GateSet {
  MatrixOp<Real> cnot;
  MatrixOp<Real> pointer;
  MatrixOp<Real> controlled;
};

template <typename Real>
GateSet<Real> buildGates(const Strength<Real>& strength, const PathLabel& path) {
  return {cnotGate<Real>(), pointerRotation(strength.g), controlledPointerRotation(path, strength.g)};
}

// ---- protocol execution ----

/// One erasure branch: the system x meter state left after the ancilla
/// X-basis outcome (unnormalized; its squared norm is the branch
/// probability), plus the <Phi|-contracted meter state and the conditional
/// post-selection probability within the branch.
template <typename Real = double>
struct BranchOutcome {
  Ket<Real> state;                 // 2 wires: system, meter
  Real probability = 0;            // P(this erasure outcome)
  Ket<Real> postSelectedMeter;     // 1 wire, unnormalized
  Real postSelectProbability = 0;  // P(Phi | this erasure outcome)
};

template <typename Real = double>
struct ProtocolOutcome {
  Ket<Real> psi1, psi2, psi3;  // 3-wire states after steps 1-3
  BranchOutcome<Real> success;  // ancilla read |+>
  BranchOutcome<Real> fail;     // ancilla read |->
  PathLabel path;
  Strength<Real> strength;
  SelectionAngles<Real> angles;
};

namespace detail {

template <typename Real>
BranchOutcome<Real> analyzeBranch(const Ket<Real>& psi3, int ancillaOutcome, const Ket<Real>& post) {
  BranchOutcome<Real> branch;
  branch.state = contractWire(psi3, kAncillaWire, basisKet<Real>(Basis::X, ancillaOutcome));
  branch.probability = branch.state.squaredNorm();
  branch.postSelectedMeter = contractWire(branch.state, kSystemWire, post);
  Real joint = branch.postSelectedMeter.squaredNorm();
  branch.postSelectProbability = branch.probability > Real{1e-30} ? joint / branch.probability : Real{0};
  return branch;
}

}  // namespace detail

/// Runs steps 1-5, retaining both erasure branches. Throws domain_error when
/// neither branch has any post-selection weight.
template <typename Real>
ProtocolOutcome<Real> runProtocol(const SelectionAngles<Real>& angles, const PathLabel& path,
                                  const Strength<Real>& strength) {
  TwoStateVector<Real> tsv = makeTwoStateVector(angles);
  GateSet<Real> gates = buildGates(strength, path);

  ProtocolOutcome<Real> out;
  out.path = path;
  out.strength = strength;
  out.angles = angles;
  out.psi1 = tensor(tensor(tsv.pre, ket0<Real>()), ket0<Real>());
  out.psi2 = applyGate(out.psi1, gates.cnot);
  out.psi3 = applyGate(out.psi2, gates.controlled);
  out.success = detail::analyzeBranch(out.psi3, 0, tsv.post);
  out.fail = detail::analyzeBranch(out.psi3, 1, tsv.post);
  if (out.success.postSelectedMeter.squaredNorm() < Real{1e-24} &&
      out.fail.postSelectedMeter.squaredNorm() < Real{1e-24})
    throw std::domain_error("runProtocol: post-selection annihilates both erasure branches");
  return out;
}

/// Applies sigma_z to the system wire of the failure branch and swaps the
/// path label; the corrected branch coincides with the success branch of a
/// run measuring the swapped path. The success branch gets the same
/// treatment so the returned outcome is internally consistent.
template <typename Real>
ProtocolOutcome<Real> correctFailedErasure(const ProtocolOutcome<Real>& outcome) {
  TwoStateVector<Real> tsv = makeTwoStateVector(outcome.angles);
  auto correct = [&](const BranchOutcome<Real>& branch) {
    BranchOutcome<Real> fixed;
    fixed.state = applyGate(branch.state, pauliZ<Real>(), {kSystemWire});
    fixed.probability = branch.probability;
    fixed.postSelectedMeter = contractWire(fixed.state, kSystemWire, tsv.post);
    Real joint = fixed.postSelectedMeter.squaredNorm();
    fixed.postSelectProbability = fixed.probability > Real{1e-30} ? joint / fixed.probability : Real{0};
    return fixed;
  };
  ProtocolOutcome<Real> corrected = outcome;
  corrected.path = outcome.path.swapped();
  corrected.success = correct(outcome.fail);
  corrected.fail = correct(outcome.success);
  return corrected;
}

// ---- meter readout ----

template <typename Real>
Real meterExpectation(const Ket<Real>& meter, const Matrix<Real>& observable) {
  Real n2 = meter.squaredNorm();
  if (n2 < Real{1e-30}) throw std::domain_error("meterExpectation: null meter state");
  return std::real(meter.amplitudes.dot(observable * meter.amplitudes)) / n2;
}

/// Weak-value estimate from the success-branch post-selected meter. The real
/// part inverts the pointer rotation angle from <sigma_y>, unfolding past
/// the arcsin principal branch via the sign of <sigma_z> so the readout
/// stays exact up to g = pi/2 on deterministic paths; the imaginary part is
/// read from -<sigma_x>/(2g). Error is O(g^2) for g -> 0.
template <typename Real>
Complex<Real> estimateWeakValueFromMeter(const ProtocolOutcome<Real>& outcome, const Strength<Real>& strength) {
  if (!(strength.g > Real{0})) throw std::invalid_argument("estimateWeakValueFromMeter: strength must be positive");
  if (outcome.success.postSelectedMeter.squaredNorm() < Real{1e-24})
    throw std::domain_error("estimateWeakValueFromMeter: degenerate success branch");
  const Ket<Real>& meter = outcome.success.postSelectedMeter;
  Real ey = meterExpectation(meter, pauliY<Real>());
  Real ex = meterExpectation(meter, pauliX<Real>());
  Real ez = meterExpectation(meter, pauliZ<Real>());
  Real angle = std::asin(std::clamp(ey, Real{-1}, Real{1}));
  if (ez < 0) angle = std::acos(Real{-1}) - angle;
  return {angle / (2 * strength.g), -ex / (2 * strength.g)};
}

// ---- shot sampling ----

/// Shot counts keyed by (erasure outcome, post-selection outcome, meter Z
/// readout). Merging is associative, so chunked sampling reproduces a serial
/// tally as long as draw indices partition [0, shotCount).
struct ShotTally {
  std::array<std::uint64_t, 8> counts{};  // index 4*erasureFail + 2*postFail + meter
  std::uint64_t seed = 0;
  std::uint64_t shotCount = 0;

  std::uint64_t count(int erasureFail, int postFail, int meter) const {
    return counts[4 * erasureFail + 2 * postFail + meter];
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (std::uint64_t c : counts) t += c;
    return t;
  }

  /// Fraction of meter-1 readouts among successful-erasure, post-selected
  /// shots; the paradox's observable.
  double conditionalMeterOne() const {
    std::uint64_t kept = count(0, 0, 0) + count(0, 0, 1);
    if (kept == 0) throw std::domain_error("ShotTally: no post-selected successful shots");
    return static_cast<double>(count(0, 0, 1)) / static_cast<double>(kept);
  }

  ShotTally merged(const ShotTally& other) const {
    if (seed != other.seed) throw std::invalid_argument("ShotTally: cannot merge tallies from different seeds");
    ShotTally out = *this;
    out.shotCount += other.shotCount;
    for (int k = 0; k < 8; ++k) out.counts[k] += other.counts[k];
    return out;
  }
};

/// Exact joint distribution over (erasure, post-selection, meter Z) for one
/// protocol setting; the squared amplitudes of the four contracted meter
/// states enumerate all eight cells.
template <typename Real>
std::array<Real, 8> protocolDistribution(const ProtocolOutcome<Real>& outcome,
                                         const SelectionAngles<Real>& angles) {
  TwoStateVector<Real> tsv = makeTwoStateVector(angles);
  Vector<Real> ortho(2);
  ortho << -std::conj(tsv.post.amplitudes(1)), std::conj(tsv.post.amplitudes(0));
  Ket<Real> orthoPost(ortho, 1, NormTag::Normalized);

  std::array<Real, 8> joint{};
  const BranchOutcome<Real>* branches[2] = {&outcome.success, &outcome.fail};
  for (int e = 0; e < 2; ++e) {
    Ket<Real> keptMeter = branches[e]->postSelectedMeter;
    Ket<Real> lostMeter = contractWire(branches[e]->state, kSystemWire, orthoPost);
    for (int m = 0; m < 2; ++m) {
      joint[4 * e + 0 + m] = std::norm(keptMeter.amplitudes(m));
      joint[4 * e + 2 + m] = std::norm(lostMeter.amplitudes(m));
    }
  }
  return joint;
}

/// Samples shots [firstShot, firstShot + shots) from the exact joint
/// distribution; the draw index offset makes chunked runs merge into the
/// serial result.
template <typename Real>
ShotTally sampleProtocol(const SelectionAngles<Real>& angles, const PathLabel& path,
                         const Strength<Real>& strength, std::uint64_t shots, std::uint64_t seed,
                         std::uint64_t firstShot = 0) {
  if (shots < 1) throw std::invalid_argument("sampleProtocol: need at least one shot");
  ProtocolOutcome<Real> outcome = runProtocol(angles, path, strength);
  std::array<Real, 8> joint = protocolDistribution(outcome, angles);
  std::vector<Real> distribution(joint.begin(), joint.end());
  Real total = 0;
  for (Real& p : distribution) {
    p = std::max(p, Real{0});
    total += p;
  }
  for (Real& p : distribution) p /= total;  // remove O(1e-16) closure error

  ShotTally tally;
  tally.seed = seed;
  tally.shotCount = shots;
  for (std::uint64_t k = firstShot; k < firstShot + shots; ++k)
    ++tally.counts[static_cast<std::size_t>(sampleOutcome(distribution, seed, k))];
  return tally;
}

}  // namespace seqmeas
