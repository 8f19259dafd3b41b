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

#ifndef SQPC_STATEVECTOR_H_
#define SQPC_STATEVECTOR_H_

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqpc/rng.h"

// Minimal pure-state simulator.
//
// Qubit ordering: kets read left to right as qubit 0, 1, ..., k-1 and
// qubit 0 is the most significant bit of the amplitude index. So for
// |q0 q1 q2> the amplitude index is q0*4 + q1*2 + q2. Register strings in
// the other direction (highest qubit leftmost) are produced only by the
// analysis layer.

namespace sqpc {

using Amplitude = std::complex<double>;

// Absolute tolerance for exact-amplitude assertions.
inline constexpr double kAmplitudeTolerance = 1e-12;
// Outcomes whose Born probability is below this are never sampled.
inline constexpr double kNegligibleProbability = 1e-14;

// The four Bell states. The numeric value is the two-bit measurement code
// (PhiPlus 00, PhiMinus 01, PsiPlus 10, PsiMinus 11): the high bit is the
// parity bit (0 for phi, 1 for psi), the low bit the phase bit.
enum class BellKind : std::uint8_t {
  kPhiPlus = 0,
  kPhiMinus = 1,
  kPsiPlus = 2,
  kPsiMinus = 3,
};

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::kPhiPlus, BellKind::kPhiMinus, BellKind::kPsiPlus,
    BellKind::kPsiMinus};

inline int BellCode(BellKind kind) { return static_cast<int>(kind); }
BellKind BellKindFromCode(int code);
// "phi+", "phi-", "psi+", "psi-".
std::string_view BellKindName(BellKind kind);
std::optional<BellKind> ParseBellKind(std::string_view text);
// Two-character code string, e.g. "01" for PhiMinus.
std::string BellCodeString(BellKind kind);

// Row-major 2x2 and 4x4 complex matrices. For a two-qubit matrix the row
// index is 2*a + b where a is the first (more significant) qubit.
using Matrix2 = std::array<Amplitude, 4>;
using Matrix4 = std::array<Amplitude, 16>;

bool IsUnitary(const Matrix2& m, double tolerance = 1e-10);
bool IsUnitary(const Matrix4& m, double tolerance = 1e-10);
Matrix2 Multiply(const Matrix2& a, const Matrix2& b);
Matrix2 Adjoint(const Matrix2& m);
// Matrix of |0><0| (x) v0 + |1><1| (x) v1 on (control, target).
Matrix4 ControlledBlock(const Matrix2& v0, const Matrix2& v1);
Matrix4 Multiply(const Matrix4& a, const Matrix4& b);
Matrix4 Identity4();

class StateVector;
namespace detail {
// Wraps amplitudes without re-validating them; for use inside the library.
StateVector MakeState(std::size_t num_qubits, std::vector<Amplitude> amplitudes);
}  // namespace detail

// Normalized pure state of k qubits.
class StateVector {
 public:
  // |0...0> on num_qubits qubits.
  explicit StateVector(std::size_t num_qubits = 1);

  // Computational basis state; bits[i] is the value of qubit i.
  static StateVector BasisState(std::span<const int> bits);
  // Basis state from a ket string such as "0110" (qubit 0 leftmost).
  static StateVector FromKet(std::string_view ket);
  // Validates the length (a power of two) and normalization (1e-12).
  static StateVector FromAmplitudes(std::vector<Amplitude> amplitudes);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  const std::vector<Amplitude>& amplitudes() const { return amplitudes_; }
  Amplitude amplitude(std::size_t index) const { return amplitudes_.at(index); }
  // Amplitude of the basis state given as a ket string.
  Amplitude amplitude(std::string_view ket) const;

  double SquaredNorm() const;

  // Bit of `qubit` inside basis index `index`.
  int BitOf(std::size_t index, std::size_t qubit) const {
    return static_cast<int>((index >> (num_qubits_ - 1 - qubit)) & 1U);
  }
  std::size_t Mask(std::size_t qubit) const {
    return std::size_t{1} << (num_qubits_ - 1 - qubit);
  }

 private:
  StateVector(std::size_t num_qubits, std::vector<Amplitude> amplitudes);

  std::size_t num_qubits_;
  std::vector<Amplitude> amplitudes_;

  friend StateVector detail::MakeState(std::size_t, std::vector<Amplitude>);
};

StateVector PrepareBell(BellKind kind);

// Tensor product; qubit indices concatenate left to right.
StateVector Compose(std::span<const StateVector> states);
StateVector Compose(const StateVector& a, const StateVector& b);

enum class GateKind { kH, kX, kZ, kCnot, kSwap };

// Applies a named gate. H, X and Z take one index; CNOT takes
// (control, target) and SWAP two positions. Throws std::out_of_range for
// an index outside the register and std::invalid_argument for duplicate
// indices or the wrong number of indices.
StateVector ApplyGate(const StateVector& state, GateKind gate,
                      std::span<const std::size_t> qubits);
StateVector ApplyGate(const StateVector& state, GateKind gate,
                      std::initializer_list<std::size_t> qubits);
StateVector ApplyUnitary(const StateVector& state, const Matrix2& u,
                         std::size_t qubit);
StateVector ApplyUnitary(const StateVector& state, const Matrix4& u,
                         std::size_t first, std::size_t second);

enum class Basis { kZ, kBell };

struct MeasurementRecord {
  Basis basis = Basis::kZ;
  std::vector<std::size_t> qubits;
  // Z: the bit. Bell: the BellKind code.
  int outcome = 0;
  // Born probability of `outcome` before the measurement.
  double probability = 0.0;
};

struct ZMeasurement {
  int bit;
  StateVector state;
  MeasurementRecord record;
};

struct BellMeasurement {
  BellKind kind;
  StateVector state;
  MeasurementRecord record;
};

std::array<double, 2> ZProbabilities(const StateVector& state, std::size_t qubit);
// Indexed by BellCode; qubit i is the first qubit of the pair.
std::array<double, 4> BellProbabilities(const StateVector& state, std::size_t i,
                                        std::size_t j);

// Projective measurements. Each draws exactly one value from `rng`, so the
// stream position after a measurement does not depend on the state.
ZMeasurement MeasureZ(const StateVector& state, std::size_t qubit, Rng& rng);
BellMeasurement MeasureBell(const StateVector& state, std::size_t i,
                            std::size_t j, Rng& rng);

// Projects `qubit` onto |bit> and renormalizes. Returns the prior
// probability; the state is left unchanged if that probability is
// negligible.
double ProjectZ(StateVector& state, std::size_t qubit, int bit);

// The group re-pairing: SWAP of positions 1 and 2 of a 4-qubit group.
// Involutive. Throws std::invalid_argument unless the state has 4 qubits.
StateVector SwapPairing(const StateVector& group);

using QubitPair = std::pair<std::size_t, std::size_t>;
using BellPairing = std::pair<QubitPair, QubitPair>;
using BellBellKey = std::pair<BellKind, BellKind>;

// Coefficients of a 4-qubit state in the Bell (x) Bell basis of the given
// pairing: c[(k, l)] = (<k|_{ab} <l|_{cd}) |state>. All 16 keys present.
std::map<BellBellKey, Amplitude> BellDecomposition(const StateVector& group,
                                                   const BellPairing& pairing);

// <a|b>. Throws std::invalid_argument on a qubit-count mismatch.
Amplitude Overlap(const StateVector& a, const StateVector& b);
// sqrt(1 - |<a|b>|^2).
double TraceDistancePure(const StateVector& a, const StateVector& b);

// Reduced density matrix of one qubit, row-major {rho00, rho01, rho10, rho11}.
Matrix2 ReducedQubit(const StateVector& state, std::size_t qubit);
// Trace distance between two single-qubit density matrices; equals
// TraceDistancePure when both are pure.
double QubitTraceDistance(const Matrix2& rho, const Matrix2& sigma);

}  // namespace sqpc

#endif  // SQPC_STATEVECTOR_H_
