#pragma once

// Exact dense state-vector core for small qubit registers: kets, operators,
// tensor products, gate embedding, projective branching, and counter-based
// sampling. Wire order is big-endian: wire 0 is the most significant bit of
// the basis-state index.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace seqmeas {

template <typename Real = double>
using Complex = std::complex<Real>;

template <typename Real = double>
using Vector = Eigen::Vector<Complex<Real>, Eigen::Dynamic>;

template <typename Real = double>
using Matrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

enum class NormTag { Normalized, Unnormalized };

enum class Basis { Z, X };

/// Amplitude vector over an ordered qubit register.
/// Invariants: amplitudes.size() == 2^wireCount; if norm == Normalized the
/// 2-norm is within 1e-12 of 1; all magnitudes finite.
template <typename Real = double>
struct Ket {
  Vector<Real> amplitudes;
  int wireCount = 0;
  NormTag norm = NormTag::Unnormalized;

  Ket() = default;
  Ket(Vector<Real> amps, int wires, NormTag tag) : amplitudes(std::move(amps)), wireCount(wires), norm(tag) {
    if (wireCount < 1 || amplitudes.size() != (Eigen::Index{1} << wireCount))
      throw std::invalid_argument("Ket: amplitude count must be 2^wireCount");
    if (!amplitudes.allFinite()) throw std::invalid_argument("Ket: non-finite amplitude");
    if (norm == NormTag::Normalized && std::abs(amplitudes.norm() - Real{1}) > Real{1e-12})
      throw std::invalid_argument("Ket: normalized tag but 2-norm deviates from 1");
  }

  Real squaredNorm() const { return amplitudes.squaredNorm(); }

  Ket normalized() const {
    Real n = amplitudes.norm();
    if (n < Real{1e-150}) throw std::domain_error("Ket: cannot normalize a null state");
    return Ket(amplitudes / n, wireCount, NormTag::Normalized);
  }
};

/// Dense operator on k wires. targetWires may be empty for an unplaced
/// operator; when set, its length fixes k. unitaryTag, when set true,
/// asserts U^H U = I within 1e-12 (verified by verifyUnitary, not on
/// construction).
template <typename Real = double>
struct MatrixOp {
  Matrix<Real> entries;
  std::vector<int> targetWires;
  std::optional<bool> unitaryTag;
};

namespace detail {

inline int log2Exact(Eigen::Index dim) {
  int k = 0;
  while ((Eigen::Index{1} << k) < dim) ++k;
  if ((Eigen::Index{1} << k) != dim) throw std::invalid_argument("dimension is not a power of two");
  return k;
}

}  // namespace detail

template <typename Real>
int wireCountOf(const MatrixOp<Real>& op) {
  if (op.entries.rows() != op.entries.cols()) throw std::invalid_argument("MatrixOp: matrix must be square");
  int k = detail::log2Exact(op.entries.rows());
  if (!op.targetWires.empty() && static_cast<int>(op.targetWires.size()) != k)
    throw std::invalid_argument("MatrixOp: targetWires length does not match dimension");
  return k;
}

template <typename Real>
bool verifyUnitary(const MatrixOp<Real>& op, Real tol = Real{1e-12}) {
  Matrix<Real> gram = op.entries.adjoint() * op.entries;
  return (gram - Matrix<Real>::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= tol;
}

// ---- elementary states and operators ----

template <typename Real = double>
Ket<Real> basisKet(Basis basis, int outcome) {
  if (outcome != 0 && outcome != 1) throw std::invalid_argument("basisKet: outcome must be 0 or 1");
  Vector<Real> v(2);
  if (basis == Basis::Z) {
    v << Complex<Real>(outcome == 0 ? 1 : 0), Complex<Real>(outcome == 0 ? 0 : 1);
  } else {
    const Real r = Real{1} / std::sqrt(Real{2});
    v << Complex<Real>(r), Complex<Real>(outcome == 0 ? r : -r);
  }
  return Ket<Real>(v, 1, NormTag::Normalized);
}

template <typename Real = double>
Ket<Real> ket0() { return basisKet<Real>(Basis::Z, 0); }
template <typename Real = double>
Ket<Real> ket1() { return basisKet<Real>(Basis::Z, 1); }
template <typename Real = double>
Ket<Real> ketPlus() { return basisKet<Real>(Basis::X, 0); }
template <typename Real = double>
Ket<Real> ketMinus() { return basisKet<Real>(Basis::X, 1); }

template <typename Real = double>
Matrix<Real> identityMatrix(int wires) {
  Eigen::Index dim = Eigen::Index{1} << wires;
  return Matrix<Real>::Identity(dim, dim);
}

template <typename Real = double>
Matrix<Real> pauliX() {
  Matrix<Real> m(2, 2);
  m << Complex<Real>(0), Complex<Real>(1), Complex<Real>(1), Complex<Real>(0);
  return m;
}

template <typename Real = double>
Matrix<Real> pauliY() {
  Matrix<Real> m(2, 2);
  m << Complex<Real>(0), Complex<Real>(0, -1), Complex<Real>(0, 1), Complex<Real>(0);
  return m;
}

template <typename Real = double>
Matrix<Real> pauliZ() {
  Matrix<Real> m(2, 2);
  m << Complex<Real>(1), Complex<Real>(0), Complex<Real>(0), Complex<Real>(-1);
  return m;
}

/// |ket><bra| as a dense matrix.
template <typename Real>
Matrix<Real> outer(const Ket<Real>& ket, const Ket<Real>& bra) {
  return ket.amplitudes * bra.amplitudes.adjoint();
}

// ---- tensor products ----

/// Kronecker product with a's wires ordered before b's.
template <typename Real>
Ket<Real> tensor(const Ket<Real>& a, const Ket<Real>& b) {
  Vector<Real> v = Eigen::kroneckerProduct(a.amplitudes, b.amplitudes);
  NormTag tag = (a.norm == NormTag::Normalized && b.norm == NormTag::Normalized) ? NormTag::Normalized
                                                                                : NormTag::Unnormalized;
  return Ket<Real>(v, a.wireCount + b.wireCount, tag);
}

template <typename Real>
MatrixOp<Real> tensor(const MatrixOp<Real>& a, const MatrixOp<Real>& b) {
  int ka = wireCountOf(a);
  (void)wireCountOf(b);
  MatrixOp<Real> out;
  out.entries = Eigen::kroneckerProduct(a.entries, b.entries);
  if (!a.targetWires.empty() && !b.targetWires.empty()) {
    out.targetWires = a.targetWires;
    for (int w : b.targetWires) out.targetWires.push_back(w + ka);
  }
  if (a.unitaryTag && b.unitaryTag) out.unitaryTag = *a.unitaryTag && *b.unitaryTag;
  return out;
}

// ---- gate application ----

/// Embeds a 2^k x 2^k gate on the listed wires, identity elsewhere.
/// Preserves the 2-norm when the gate is unitary.
template <typename Real>
Ket<Real> applyGate(const Ket<Real>& state, const Matrix<Real>& gate, const std::vector<int>& wires) {
  const int n = state.wireCount;
  const int k = static_cast<int>(wires.size());
  if (gate.rows() != gate.cols() || gate.rows() != (Eigen::Index{1} << k))
    throw std::invalid_argument("applyGate: gate dimension does not match wire count");
  std::uint64_t targetMask = 0;
  for (int w : wires) {
    if (w < 0 || w >= n) throw std::invalid_argument("applyGate: wire index out of range");
    std::uint64_t bit = std::uint64_t{1} << (n - 1 - w);
    if (targetMask & bit) throw std::invalid_argument("applyGate: duplicate wire index");
    targetMask |= bit;
  }

  // scatter[j]: basis index with the bits of sub-index j placed on the target
  // wires (big-endian within the wire list) and zeros elsewhere.
  const std::uint64_t subDim = std::uint64_t{1} << k;
  std::vector<std::uint64_t> scatter(subDim, 0);
  for (std::uint64_t j = 0; j < subDim; ++j)
    for (int t = 0; t < k; ++t)
      if ((j >> (k - 1 - t)) & 1u) scatter[j] |= std::uint64_t{1} << (n - 1 - wires[t]);

  const std::uint64_t dim = std::uint64_t{1} << n;
  Vector<Real> out(state.amplitudes.size());
  Vector<Real> sub(subDim);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & targetMask) continue;
    for (std::uint64_t j = 0; j < subDim; ++j) sub(j) = state.amplitudes(base | scatter[j]);
    sub = (gate * sub).eval();
    for (std::uint64_t j = 0; j < subDim; ++j) out(base | scatter[j]) = sub(j);
  }
  NormTag tag = state.norm;
  if (tag == NormTag::Normalized && std::abs(out.norm() - Real{1}) > Real{1e-12}) tag = NormTag::Unnormalized;
  return Ket<Real>(out, n, tag);
}

template <typename Real>
Ket<Real> applyGate(const Ket<Real>& state, const MatrixOp<Real>& gate, const std::vector<int>& wires) {
  return applyGate(state, gate.entries, wires);
}

/// Uses the gate's own targetWires.
template <typename Real>
Ket<Real> applyGate(const Ket<Real>& state, const MatrixOp<Real>& gate) {
  if (gate.targetWires.empty()) throw std::invalid_argument("applyGate: gate has no target wires");
  return applyGate(state, gate.entries, gate.targetWires);
}

// ---- projective branching and contraction ----

/// Single-wire projection branch, not renormalized; probability is the
/// branch's squared norm. The two outcomes' probabilities sum to 1 for a
/// normalized input.
template <typename Real>
std::pair<Ket<Real>, Real> projectWire(const Ket<Real>& state, int wire, Basis basis, int outcome) {
  Ket<Real> axis = basisKet<Real>(basis, outcome);
  Matrix<Real> projector = axis.amplitudes * axis.amplitudes.adjoint();
  Ket<Real> branch = applyGate(state, projector, {wire});
  branch.norm = NormTag::Unnormalized;
  return {branch, branch.squaredNorm()};
}

/// Contracts <bra| onto one wire, returning the unnormalized state of the
/// remaining wires: out[rest] = sum_b conj(bra[b]) * state[..b at wire..].
template <typename Real>
Ket<Real> contractWire(const Ket<Real>& state, int wire, const Ket<Real>& bra) {
  const int n = state.wireCount;
  if (n < 2) throw std::invalid_argument("contractWire: register must keep at least one wire");
  if (wire < 0 || wire >= n) throw std::invalid_argument("contractWire: wire index out of range");
  if (bra.wireCount != 1) throw std::invalid_argument("contractWire: bra must be a single-wire ket");
  const int shift = n - 1 - wire;
  const std::uint64_t lowMask = (std::uint64_t{1} << shift) - 1;
  const std::uint64_t dimOut = std::uint64_t{1} << (n - 1);
  Vector<Real> out(static_cast<Eigen::Index>(dimOut));
  for (std::uint64_t r = 0; r < dimOut; ++r) {
    std::uint64_t high = (r & ~lowMask) << 1;
    std::uint64_t low = r & lowMask;
    Complex<Real> acc = 0;
    for (std::uint64_t b = 0; b < 2; ++b)
      acc += std::conj(bra.amplitudes(b)) * state.amplitudes(high | (b << shift) | low);
    out(r) = acc;
  }
  return Ket<Real>(out, n - 1, NormTag::Unnormalized);
}

// ---- spectral helpers ----

/// e^{i g H} for Hermitian H, by eigendecomposition.
template <typename Real>
Matrix<Real> expiHermitian(const Matrix<Real>& h, Real g) {
  Eigen::SelfAdjointEigenSolver<Matrix<Real>> solver(h);
  if (solver.info() != Eigen::Success) throw std::invalid_argument("expiHermitian: eigendecomposition failed");
  Vector<Real> phases = (Complex<Real>(0, 1) * g * solver.eigenvalues().template cast<Complex<Real>>()).array().exp();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

/// Global-phase-insensitive overlap |<u|v>| / (||u|| ||v||).
template <typename Real>
Real fidelity(const Ket<Real>& u, const Ket<Real>& v) {
  Real nu = u.amplitudes.norm(), nv = v.amplitudes.norm();
  if (nu < Real{1e-150} || nv < Real{1e-150}) throw std::domain_error("fidelity: null state");
  return std::abs(u.amplitudes.dot(v.amplitudes)) / (nu * nv);
}

// ---- counter-based sampling ----
// Deterministic function of (seed, draw index); independent of execution
// layout, so parallel shot chunks reproduce the serial stream.

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double counterUniform(std::uint64_t seed, std::uint64_t drawIndex) {
  std::uint64_t word = mix64(seed + (drawIndex + 1) * 0x9E3779B97F4A7C15ull);
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Draws an outcome index from a distribution; probabilities must be
/// nonnegative and sum to 1 within 1e-9.
template <typename Real>
int sampleOutcome(const std::vector<Real>& probabilities, std::uint64_t seed, std::uint64_t drawIndex) {
  if (probabilities.empty()) throw std::invalid_argument("sampleOutcome: empty distribution");
  Real sum = 0;
  for (Real p : probabilities) {
    if (!(p >= Real{0})) throw std::invalid_argument("sampleOutcome: negative probability");
    sum += p;
  }
  if (std::abs(sum - Real{1}) > Real{1e-9}) throw std::invalid_argument("sampleOutcome: probabilities must sum to 1");
  Real u = static_cast<Real>(counterUniform(seed, drawIndex));
  Real acc = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probabilities.size()) - 1;
}

}  // namespace seqmeas
