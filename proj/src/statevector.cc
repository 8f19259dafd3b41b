// Copyright 2026 The SQPC Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sqpc/statevector.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sqpc {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Bell basis vectors over |ab>, index 2a + b. All entries are real.
constexpr std::array<std::array<double, 4>, 4> kBellVectors = {{
    {kInvSqrt2, 0.0, 0.0, kInvSqrt2},    // phi+
    {kInvSqrt2, 0.0, 0.0, -kInvSqrt2},   // phi-
    {0.0, kInvSqrt2, kInvSqrt2, 0.0},    // psi+
    {0.0, kInvSqrt2, -kInvSqrt2, 0.0},   // psi-
}};

void CheckQubit(const StateVector& state, std::size_t qubit) {
  if (qubit >= state.num_qubits()) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) +
                            " out of range for " +
                            std::to_string(state.num_qubits()) + "-qubit state");
  }
}

void CheckDistinct(std::size_t a, std::size_t b) {
  if (a == b) {
    throw std::invalid_argument("duplicate qubit index " + std::to_string(a));
  }
}

// Index of the basis state obtained from `base` (which has 0 at both
// positions) by setting the pair bits to (a, b).
inline std::size_t PairIndex(std::size_t base, std::size_t mask_i,
                             std::size_t mask_j, int ab) {
  return base | ((ab & 2) ? mask_i : 0) | ((ab & 1) ? mask_j : 0);
}

// Samples an outcome index from `probs`, skipping negligible ones. Draws one
// uniform from `rng` regardless of the distribution.
template <std::size_t N>
std::size_t SampleOutcome(const std::array<double, N>& probs, Rng& rng) {
  const double u = rng.Uniform();
  double total = 0.0;
  for (double p : probs) {
    if (p > kNegligibleProbability) total += p;
  }
  const double target = u * total;
  double cumulative = 0.0;
  std::size_t last = N;
  for (std::size_t k = 0; k < N; ++k) {
    if (probs[k] <= kNegligibleProbability) continue;
    cumulative += probs[k];
    last = k;
    if (target < cumulative) return k;
  }
  if (last == N) throw std::logic_error("measurement on a zero state");
  return last;
}

}  // namespace

namespace detail {
StateVector MakeState(std::size_t num_qubits, std::vector<Amplitude> amplitudes) {
  return StateVector(num_qubits, std::move(amplitudes));
}
}  // namespace detail

BellKind BellKindFromCode(int code) {
  if (code < 0 || code > 3) throw std::invalid_argument("Bell code must be 0..3");
  return static_cast<BellKind>(code);
}

std::string_view BellKindName(BellKind kind) {
  switch (kind) {
    case BellKind::kPhiPlus: return "phi+";
    case BellKind::kPhiMinus: return "phi-";
    case BellKind::kPsiPlus: return "psi+";
    case BellKind::kPsiMinus: return "psi-";
  }
  return "?";
}

std::optional<BellKind> ParseBellKind(std::string_view text) {
  for (BellKind kind : kAllBellKinds) {
    if (text == BellKindName(kind)) return kind;
  }
  if (text == "phi-plus") return BellKind::kPhiPlus;
  if (text == "phi-minus") return BellKind::kPhiMinus;
  if (text == "psi-plus") return BellKind::kPsiPlus;
  if (text == "psi-minus") return BellKind::kPsiMinus;
  return std::nullopt;
}

std::string BellCodeString(BellKind kind) {
  const int code = BellCode(kind);
  return {static_cast<char>('0' + (code >> 1)), static_cast<char>('0' + (code & 1))};
}

bool IsUnitary(const Matrix2& m, double tolerance) {
  const Matrix2 p = Multiply(Adjoint(m), m);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const Amplitude expected = (r == c) ? 1.0 : 0.0;
      if (std::abs(p[2 * r + c] - expected) > tolerance) return false;
    }
  }
  return true;
}

bool IsUnitary(const Matrix4& m, double tolerance) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      Amplitude sum = 0.0;
      for (int k = 0; k < 4; ++k) sum += std::conj(m[4 * k + r]) * m[4 * k + c];
      const Amplitude expected = (r == c) ? 1.0 : 0.0;
      if (std::abs(sum - expected) > tolerance) return false;
    }
  }
  return true;
}

Matrix2 Multiply(const Matrix2& a, const Matrix2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Matrix2 Adjoint(const Matrix2& m) {
  return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

Matrix4 ControlledBlock(const Matrix2& v0, const Matrix2& v1) {
  Matrix4 m{};
  m[0] = v0[0];
  m[1] = v0[1];
  m[4] = v0[2];
  m[5] = v0[3];
  m[10] = v1[0];
  m[11] = v1[1];
  m[14] = v1[2];
  m[15] = v1[3];
  return m;
}

Matrix4 Multiply(const Matrix4& a, const Matrix4& b) {
  Matrix4 m{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      Amplitude sum = 0.0;
      for (int k = 0; k < 4; ++k) sum += a[4 * r + k] * b[4 * k + c];
      m[4 * r + c] = sum;
    }
  }
  return m;
}

Matrix4 Identity4() {
  Matrix4 m{};
  for (int k = 0; k < 4; ++k) m[5 * k] = 1.0;
  return m;
}

StateVector::StateVector(std::size_t num_qubits)
    : num_qubits_(num_qubits), amplitudes_(std::size_t{1} << num_qubits) {
  if (num_qubits == 0 || num_qubits > 24) {
    throw std::invalid_argument("StateVector supports 1..24 qubits");
  }
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Amplitude> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::BasisState(std::span<const int> bits) {
  StateVector state(bits.size());
  std::size_t index = 0;
  for (int bit : bits) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("basis bits must be 0 or 1");
    index = (index << 1) | static_cast<std::size_t>(bit);
  }
  state.amplitudes_[0] = 0.0;
  state.amplitudes_[index] = 1.0;
  return state;
}

StateVector StateVector::FromKet(std::string_view ket) {
  std::vector<int> bits;
  for (char c : ket) {
    if (c != '0' && c != '1') throw std::invalid_argument("ket must be a 0/1 string");
    bits.push_back(c - '0');
  }
  return BasisState(bits);
}

StateVector StateVector::FromAmplitudes(std::vector<Amplitude> amplitudes) {
  const std::size_t size = amplitudes.size();
  if (size < 2 || !std::has_single_bit(size)) {
    throw std::invalid_argument("amplitude count must be a power of two >= 2");
  }
  double norm = 0.0;
  for (const Amplitude& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::invalid_argument("amplitudes must be finite");
    }
    norm += std::norm(a);
  }
  if (std::abs(norm - 1.0) > kAmplitudeTolerance) {
    throw std::invalid_argument("amplitudes are not normalized");
  }
  return StateVector(static_cast<std::size_t>(std::countr_zero(size)),
                     std::move(amplitudes));
}

Amplitude StateVector::amplitude(std::string_view ket) const {
  if (ket.size() != num_qubits_) throw std::invalid_argument("ket width mismatch");
  std::size_t index = 0;
  for (char c : ket) index = (index << 1) | static_cast<std::size_t>(c == '1');
  return amplitudes_[index];
}

double StateVector::SquaredNorm() const {
  double norm = 0.0;
  for (const Amplitude& a : amplitudes_) norm += std::norm(a);
  return norm;
}

StateVector PrepareBell(BellKind kind) {
  const auto& v = kBellVectors[BellCode(kind)];
  return detail::MakeState(2, {v[0], v[1], v[2], v[3]});
}

StateVector Compose(const StateVector& a, const StateVector& b) {
  std::vector<Amplitude> out(a.dimension() * b.dimension());
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    const Amplitude ai = a.amplitudes()[i];
    if (ai == Amplitude{}) continue;
    for (std::size_t j = 0; j < b.dimension(); ++j) {
      out[i * b.dimension() + j] = ai * b.amplitudes()[j];
    }
  }
  return detail::MakeState(a.num_qubits() + b.num_qubits(), std::move(out));
}

StateVector Compose(std::span<const StateVector> states) {
  if (states.empty()) throw std::invalid_argument("Compose needs at least one state");
  StateVector result = states.front();
  for (std::size_t k = 1; k < states.size(); ++k) result = Compose(result, states[k]);
  return result;
}

StateVector ApplyUnitary(const StateVector& state, const Matrix2& u,
                         std::size_t qubit) {
  CheckQubit(state, qubit);
  std::vector<Amplitude> out = state.amplitudes();
  const std::size_t mask = state.Mask(qubit);
  for (std::size_t i0 = 0; i0 < out.size(); ++i0) {
    if (i0 & mask) continue;
    const std::size_t i1 = i0 | mask;
    const Amplitude a0 = out[i0];
    const Amplitude a1 = out[i1];
    out[i0] = u[0] * a0 + u[1] * a1;
    out[i1] = u[2] * a0 + u[3] * a1;
  }
  return detail::MakeState(state.num_qubits(), std::move(out));
}

StateVector ApplyUnitary(const StateVector& state, const Matrix4& u,
                         std::size_t first, std::size_t second) {
  CheckQubit(state, first);
  CheckQubit(state, second);
  CheckDistinct(first, second);
  std::vector<Amplitude> out = state.amplitudes();
  const std::size_t mi = state.Mask(first);
  const std::size_t mj = state.Mask(second);
  for (std::size_t base = 0; base < out.size(); ++base) {
    if (base & (mi | mj)) continue;
    std::array<Amplitude, 4> v;
    for (int ab = 0; ab < 4; ++ab) v[ab] = out[PairIndex(base, mi, mj, ab)];
    for (int r = 0; r < 4; ++r) {
      Amplitude sum = 0.0;
      for (int c = 0; c < 4; ++c) sum += u[4 * r + c] * v[c];
      out[PairIndex(base, mi, mj, r)] = sum;
    }
  }
  return detail::MakeState(state.num_qubits(), std::move(out));
}

StateVector ApplyGate(const StateVector& state, GateKind gate,
                      std::span<const std::size_t> qubits) {
  const std::size_t arity =
      (gate == GateKind::kCnot || gate == GateKind::kSwap) ? 2 : 1;
  if (qubits.size() != arity) {
    throw std::invalid_argument("gate expects " + std::to_string(arity) + " indices");
  }
  switch (gate) {
    case GateKind::kH:
      return ApplyUnitary(state, Matrix2{kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2},
                          qubits[0]);
    case GateKind::kX:
      return ApplyUnitary(state, Matrix2{0.0, 1.0, 1.0, 0.0}, qubits[0]);
    case GateKind::kZ:
      return ApplyUnitary(state, Matrix2{1.0, 0.0, 0.0, -1.0}, qubits[0]);
    case GateKind::kCnot:
      return ApplyUnitary(state,
                          Matrix4{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0},
                          qubits[0], qubits[1]);
    case GateKind::kSwap:
      return ApplyUnitary(state,
                          Matrix4{1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1},
                          qubits[0], qubits[1]);
  }
  throw std::invalid_argument("unknown gate");
}

StateVector ApplyGate(const StateVector& state, GateKind gate,
                      std::initializer_list<std::size_t> qubits) {
  return ApplyGate(state, gate, std::span<const std::size_t>(qubits.begin(), qubits.size()));
}

std::array<double, 2> ZProbabilities(const StateVector& state, std::size_t qubit) {
  CheckQubit(state, qubit);
  std::array<double, 2> probs{0.0, 0.0};
  const std::size_t mask = state.Mask(qubit);
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    probs[(i & mask) ? 1 : 0] += std::norm(state.amplitudes()[i]);
  }
  return probs;
}

std::array<double, 4> BellProbabilities(const StateVector& state, std::size_t i,
                                        std::size_t j) {
  CheckQubit(state, i);
  CheckQubit(state, j);
  CheckDistinct(i, j);
  std::array<double, 4> probs{};
  const std::size_t mi = state.Mask(i);
  const std::size_t mj = state.Mask(j);
  const auto& amps = state.amplitudes();
  for (std::size_t base = 0; base < amps.size(); ++base) {
    if (base & (mi | mj)) continue;
    for (int k = 0; k < 4; ++k) {
      Amplitude c = 0.0;
      for (int ab = 0; ab < 4; ++ab) c += kBellVectors[k][ab] * amps[PairIndex(base, mi, mj, ab)];
      probs[k] += std::norm(c);
    }
  }
  return probs;
}

double ProjectZ(StateVector& state, std::size_t qubit, int bit) {
  const double p = ZProbabilities(state, qubit)[bit];
  if (p <= kNegligibleProbability) return p;
  std::vector<Amplitude> out = state.amplitudes();
  const std::size_t mask = state.Mask(qubit);
  const double scale = 1.0 / std::sqrt(p);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int b = (i & mask) ? 1 : 0;
    out[i] = (b == bit) ? out[i] * scale : Amplitude{};
  }
  state = detail::MakeState(state.num_qubits(), std::move(out));
  return p;
}

ZMeasurement MeasureZ(const StateVector& state, std::size_t qubit, Rng& rng) {
  const std::array<double, 2> probs = ZProbabilities(state, qubit);
  const int bit = static_cast<int>(SampleOutcome(probs, rng));
  StateVector collapsed = state;
  ProjectZ(collapsed, qubit, bit);
  return {bit, std::move(collapsed),
          MeasurementRecord{Basis::kZ, {qubit}, bit, probs[bit]}};
}

BellMeasurement MeasureBell(const StateVector& state, std::size_t i,
                            std::size_t j, Rng& rng) {
  const std::array<double, 4> probs = BellProbabilities(state, i, j);
  const std::size_t k = SampleOutcome(probs, rng);
  const std::size_t mi = state.Mask(i);
  const std::size_t mj = state.Mask(j);
  const auto& amps = state.amplitudes();
  std::vector<Amplitude> out(amps.size());
  const double scale = 1.0 / std::sqrt(probs[k]);
  for (std::size_t base = 0; base < amps.size(); ++base) {
    if (base & (mi | mj)) continue;
    Amplitude c = 0.0;
    for (int ab = 0; ab < 4; ++ab) c += kBellVectors[k][ab] * amps[PairIndex(base, mi, mj, ab)];
    for (int ab = 0; ab < 4; ++ab) {
      out[PairIndex(base, mi, mj, ab)] = kBellVectors[k][ab] * c * scale;
    }
  }
  const BellKind kind = BellKindFromCode(static_cast<int>(k));
  return {kind, detail::MakeState(state.num_qubits(), std::move(out)),
          MeasurementRecord{Basis::kBell, {i, j}, static_cast<int>(k), probs[k]}};
}

StateVector SwapPairing(const StateVector& group) {
  if (group.num_qubits() != 4) {
    throw std::invalid_argument("SwapPairing expects a 4-qubit group");
  }
  return ApplyGate(group, GateKind::kSwap, {1, 2});
}

std::map<BellBellKey, Amplitude> BellDecomposition(const StateVector& group,
                                                   const BellPairing& pairing) {
  if (group.num_qubits() != 4) {
    throw std::invalid_argument("BellDecomposition expects a 4-qubit group");
  }
  const auto [first, second] = pairing;
  const std::array<std::size_t, 4> q = {first.first, first.second, second.first,
                                        second.second};
  std::array<bool, 4> seen{};
  for (std::size_t x : q) {
    if (x >= 4 || seen[x]) throw std::invalid_argument("invalid Bell pairing");
    seen[x] = true;
  }
  std::map<BellBellKey, Amplitude> coefficients;
  for (BellKind k : kAllBellKinds) {
    for (BellKind l : kAllBellKinds) {
      Amplitude c = 0.0;
      for (std::size_t index = 0; index < 16; ++index) {
        const int ab = 2 * group.BitOf(index, q[0]) + group.BitOf(index, q[1]);
        const int cd = 2 * group.BitOf(index, q[2]) + group.BitOf(index, q[3]);
        c += kBellVectors[BellCode(k)][ab] * kBellVectors[BellCode(l)][cd] *
             group.amplitudes()[index];
      }
      coefficients[{k, l}] = c;
    }
  }
  return coefficients;
}

Amplitude Overlap(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("overlap of states with different qubit counts");
  }
  Amplitude sum = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    sum += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  }
  return sum;
}

double TraceDistancePure(const StateVector& a, const StateVector& b) {
  return std::sqrt(std::max(0.0, 1.0 - std::norm(Overlap(a, b))));
}

Matrix2 ReducedQubit(const StateVector& state, std::size_t qubit) {
  CheckQubit(state, qubit);
  Matrix2 rho{};
  const std::size_t mask = state.Mask(qubit);
  const auto& amps = state.amplitudes();
  for (std::size_t i0 = 0; i0 < amps.size(); ++i0) {
    if (i0 & mask) continue;
    const Amplitude a0 = amps[i0];
    const Amplitude a1 = amps[i0 | mask];
    rho[0] += std::norm(a0);
    rho[1] += a0 * std::conj(a1);
    rho[3] += std::norm(a1);
  }
  rho[2] = std::conj(rho[1]);
  return rho;
}

double QubitTraceDistance(const Matrix2& rho, const Matrix2& sigma) {
  // The difference is traceless Hermitian with eigenvalues +-sqrt(d^2 + |o|^2).
  const double d = (rho[0] - sigma[0]).real();
  const Amplitude o = rho[1] - sigma[1];
  return std::sqrt(d * d + std::norm(o));
}

}  // namespace sqpc
