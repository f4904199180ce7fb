#pragma once

// Two-state-vector formalism over a single qubit held between a pre-selected
// state and a post-selected one: conditional outcome probabilities over Kraus
// sets, weak values, the sequential measurement schemes, and the
// deterministic-path selection angles.
//
// Conventions: pre = cos(theta)|0> + sin(theta)|1>; post = cos(phi)|+> +
// sin(phi)|->. The four path operators combine an X-basis projector at the
// later time with a Z-basis projector at the earlier time.

#include <seqmeas/qcore.hpp>
#include <seqmeas/table.hpp>

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace seqmeas {

template <typename Real = double>
struct SelectionAngles {
  Real theta = 0;
  Real phi = 0;

  /// Reporting range [0, pi); computations accept any real angle.
  SelectionAngles canonical() const {
    const Real pi = std::acos(Real{-1});
    auto wrap = [pi](Real x) {
      Real r = std::fmod(x, pi);
      if (r < 0) r += pi;
      return r;
    };
    return {wrap(theta), wrap(phi)};
  }
};

template <typename Real = double>
struct TwoStateVector {
  Ket<Real> pre;   // forward-evolving |psi>
  Ket<Real> post;  // the ket whose conjugate is the backward-evolving <Phi|

  Complex<Real> overlap() const { return post.amplitudes.dot(pre.amplitudes); }
};

template <typename Real = double>
TwoStateVector<Real> makeTwoStateVector(const SelectionAngles<Real>& angles) {
  Vector<Real> pre(2), post(2);
  pre << Complex<Real>(std::cos(angles.theta)), Complex<Real>(std::sin(angles.theta));
  const Real r = Real{1} / std::sqrt(Real{2});
  post << Complex<Real>(r * (std::cos(angles.phi) + std::sin(angles.phi))),
      Complex<Real>(r * (std::cos(angles.phi) - std::sin(angles.phi)));
  return {Ket<Real>(pre, 1, NormTag::Normalized), Ket<Real>(post, 1, NormTag::Normalized)};
}

/// Transition amplitudes through the four paths; a^2+b^2+c^2+d^2 = 1/2 for
/// any angles.
template <typename Real = double>
struct AmplitudeQuad {
  Real a = 0, b = 0, c = 0, d = 0;

  Real sum() const { return a + b + c + d; }
  Real squaredSum() const { return a * a + b * b + c * c + d * d; }
  std::array<Real, 4> asArray() const { return {a, b, c, d}; }
};

template <typename Real>
AmplitudeQuad<Real> transitionAmplitudes(const SelectionAngles<Real>& angles) {
  const Real r = Real{1} / std::sqrt(Real{2});
  const Real ct = std::cos(angles.theta), st = std::sin(angles.theta);
  const Real cp = std::cos(angles.phi), sp = std::sin(angles.phi);
  return {ct * cp * r, st * cp * r, ct * sp * r, -st * sp * r};
}

/// Labeled measurement operators for one scheme's outcome set. When
/// completenessTag is set, sum K^H K = I holds within 1e-12; the two-outcome
/// path sets {X, 1-X} are deliberately left untagged.
template <typename Real = double>
struct KrausSet {
  std::vector<std::pair<std::string, MatrixOp<Real>>> outcomes;
  bool completenessTag = false;

  const MatrixOp<Real>& at(const std::string& label) const {
    for (const auto& [name, op] : outcomes)
      if (name == label) return op;
    throw std::invalid_argument("KrausSet: unknown outcome label '" + label + "'");
  }
};

template <typename Real>
bool verifyCompleteness(const KrausSet<Real>& set, Real tol = Real{1e-12}) {
  if (set.outcomes.empty()) return false;
  Eigen::Index dim = set.outcomes.front().second.entries.rows();
  Matrix<Real> acc = Matrix<Real>::Zero(dim, dim);
  for (const auto& [name, op] : set.outcomes) acc += op.entries.adjoint() * op.entries;
  return (acc - Matrix<Real>::Identity(dim, dim)).cwiseAbs().maxCoeff() <= tol;
}

/// Conditional probability of outcome k between the two selections:
/// |<Phi|K_k|psi>|^2 normalized over the set's outcomes. Well defined
/// whether or not the set is trace preserving.
template <typename Real>
Real ablProbability(const TwoStateVector<Real>& tsv, const KrausSet<Real>& kraus, const std::string& label) {
  Real numerator = -1, denominator = 0;
  for (const auto& [name, op] : kraus.outcomes) {
    Real term = std::norm(tsv.post.amplitudes.dot(op.entries * tsv.pre.amplitudes));
    denominator += term;
    if (name == label) numerator = term;
  }
  if (numerator < 0) throw std::invalid_argument("ablProbability: unknown outcome label '" + label + "'");
  if (denominator < Real{1e-24})
    throw std::domain_error("ablProbability: vanishing denominator, forbidden pre/post pair for this scheme");
  return numerator / denominator;
}

/// <Phi|op|psi> / <Phi|psi>; rejects near-orthogonal selections.
template <typename Real>
Complex<Real> weakValue(const TwoStateVector<Real>& tsv, const MatrixOp<Real>& op) {
  Complex<Real> s = tsv.overlap();
  if (std::abs(s) < Real{1e-12}) throw std::domain_error("weakValue: orthogonal pre/post selection");
  return tsv.post.amplitudes.dot(op.entries * tsv.pre.amplitudes) / s;
}

// ---- the sequential measurement family ----

enum class Scheme { Sequence, Modular, DistinctPath };

inline std::string_view schemeName(Scheme s) {
  switch (s) {
    case Scheme::Sequence: return "sequence";
    case Scheme::Modular: return "modular";
    case Scheme::DistinctPath: return "distinctPath";
  }
  throw std::invalid_argument("schemeName: unknown tag");
}

inline constexpr std::array<std::string_view, 4> kPathNames{"A", "B", "C", "D"};

/// The four path operators: X-basis projector at the later time composed
/// with a Z-basis projector at the earlier time. They sum to the identity.
template <typename Real = double>
std::array<MatrixOp<Real>, 4> pathOperators() {
  auto proj = [](const Ket<Real>& k) { return outer(k, k); };
  Matrix<Real> pPlus = proj(ketPlus<Real>()), pMinus = proj(ketMinus<Real>());
  Matrix<Real> p0 = proj(ket0<Real>()), p1 = proj(ket1<Real>());
  return {MatrixOp<Real>{pPlus * p0, {}, {}}, MatrixOp<Real>{pPlus * p1, {}, {}},
          MatrixOp<Real>{pMinus * p0, {}, {}}, MatrixOp<Real>{pMinus * p1, {}, {}}};
}

/// Parity sums of the path operators: even = A+D = (I - i sigma_y)/2, odd =
/// B+C = (I + i sigma_y)/2, and their difference sigma_XZ = -i sigma_y.
template <typename Real = double>
struct ModularOperators {
  MatrixOp<Real> even, odd, diff;
};

template <typename Real = double>
ModularOperators<Real> modularOperators() {
  auto paths = pathOperators<Real>();
  ModularOperators<Real> m;
  m.even = MatrixOp<Real>{paths[0].entries + paths[3].entries, {}, {}};
  m.odd = MatrixOp<Real>{paths[1].entries + paths[2].entries, {}, {}};
  m.diff = MatrixOp<Real>{m.even.entries - m.odd.entries, {}, {}};
  return m;
}

template <typename Real = double>
struct SequentialKrausSets {
  KrausSet<Real> sequence;                     // {A,B,C,D}, complete
  KrausSet<Real> modular;                      // {ME,MO}, complete
  std::array<KrausSet<Real>, 4> distinctPath;  // {X, 1-X} per path, not complete
};

template <typename Real = double>
SequentialKrausSets<Real> sequentialKrausSets() {
  auto paths = pathOperators<Real>();
  auto mods = modularOperators<Real>();
  SequentialKrausSets<Real> sets;
  for (int k = 0; k < 4; ++k) sets.sequence.outcomes.emplace_back(std::string(kPathNames[k]), paths[k]);
  sets.sequence.completenessTag = true;
  sets.modular.outcomes.emplace_back("ME", mods.even);
  sets.modular.outcomes.emplace_back("MO", mods.odd);
  sets.modular.completenessTag = true;
  Matrix<Real> eye = identityMatrix<Real>(1);
  for (int k = 0; k < 4; ++k) {
    std::string name(kPathNames[k]);
    sets.distinctPath[k].outcomes.emplace_back(name, paths[k]);
    sets.distinctPath[k].outcomes.emplace_back("not" + name, MatrixOp<Real>{eye - paths[k].entries, {}, {}});
    sets.distinctPath[k].completenessTag = false;
  }
  return sets;
}

/// Closed-form outcome probabilities for one scheme, one row per outcome.
/// The distinctPath rows are four separate two-outcome experiments and do
/// not sum to 1.
template <typename Real>
ScenarioTable scenarioProbabilities(const SelectionAngles<Real>& angles, Scheme scheme) {
  AmplitudeQuad<Real> q = transitionAmplitudes(angles);
  SelectionAngles<Real> canon = angles.canonical();
  ScenarioTable table;
  auto push = [&](std::string_view label, Real value) {
    table.rows.push_back({static_cast<double>(canon.theta), static_cast<double>(canon.phi),
                          std::string(schemeName(scheme)), std::string(label), Quantity::Probability,
                          static_cast<double>(value), Source::ClosedForm});
  };
  switch (scheme) {
    case Scheme::Sequence: {
      Real denom = q.squaredSum();
      if (denom < Real{1e-24}) throw std::domain_error("scenarioProbabilities: forbidden pre/post pair");
      auto xs = q.asArray();
      for (int k = 0; k < 4; ++k) push(kPathNames[k], xs[k] * xs[k] / denom);
      break;
    }
    case Scheme::Modular: {
      Real even = q.a + q.d, odd = q.b + q.c;
      Real denom = even * even + odd * odd;
      if (denom < Real{1e-24}) throw std::domain_error("scenarioProbabilities: forbidden pre/post pair");
      push("ME", even * even / denom);
      push("MO", odd * odd / denom);
      break;
    }
    case Scheme::DistinctPath: {
      Real s = q.sum();
      auto xs = q.asArray();
      for (int k = 0; k < 4; ++k) {
        Real rest = s - xs[k];
        Real denom = xs[k] * xs[k] + rest * rest;
        if (denom < Real{1e-24}) throw std::domain_error("scenarioProbabilities: forbidden pre/post pair");
        push(kPathNames[k], xs[k] * xs[k] / denom);
      }
      break;
    }
  }
  return table;
}

// ---- deterministic-path selection angles ----

/// A selection with cot(theta) = cot(phi) = root of cot^2 + cot - 1 = 0, at
/// which two of the four path probabilities are simultaneously certain.
template <typename Real = double>
struct GoldenRoot {
  std::string name;  // "+" or "-"
  Real cotangent = 0;
  SelectionAngles<Real> angles;
};

template <typename Real = double>
std::vector<GoldenRoot<Real>> deterministicAngles() {
  const Real pi = std::acos(Real{-1});
  const Real root5 = std::sqrt(Real{5});
  Real cotPlus = (-1 + root5) / 2;
  Real cotMinus = (-1 - root5) / 2;
  Real thetaPlus = std::atan(1 / cotPlus);
  Real thetaMinus = pi + std::atan(1 / cotMinus);  // canonical [0, pi)
  return {{"+", cotPlus, {thetaPlus, thetaPlus}}, {"-", cotMinus, {thetaMinus, thetaMinus}}};
}

// ---- two-time correlation, closed form ----

/// Leading-order product-pointer correlation for two weak couplings, first
/// A1 then A2: (g^2/2) Re[{A2 A1}_w + {A1}_w conj({A2}_w)].
template <typename Real>
Real reschSteinbergRHS(const TwoStateVector<Real>& tsv, const MatrixOp<Real>& a1, const MatrixOp<Real>& a2,
                       Real g) {
  Complex<Real> w21 = weakValue(tsv, MatrixOp<Real>{a2.entries * a1.entries, {}, {}});
  Complex<Real> w1 = weakValue(tsv, a1);
  Complex<Real> w2 = weakValue(tsv, a2);
  return g * g / 2 * std::real(w21 + w1 * std::conj(w2));
}

}  // namespace seqmeas
