#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qwp/state.hpp"
#include "qwp/types.hpp"

namespace qwp {

// Largest qubit count for which dense operator matrices are materialized;
// the applicative paths below have no such cap.
inline constexpr std::size_t kMaxDenseExchangeQubits = 10;

// An observer modeled as n qubits whose two macroscopic records are the
// all-zeros and all-ones product states.
struct MacroAgent {
  std::size_t qubits = 1;

  std::size_t dimension() const { return std::size_t{1} << qubits; }
  // Record state with every qubit at 0.
  std::vector<cplx> macro_up() const;
  // Record state with every qubit at 1.
  std::vector<cplx> macro_down() const;
  // Equal superpositions (up +/- down)/sqrt(2) of the two records.
  std::vector<cplx> record_superposition(int sign) const;
};

// Record exchange: the n-fold single-qubit bit flip, the minimal Hermitian
// unitary involution mapping macro_up <-> macro_down.  Dense form, capped at
// kMaxDenseExchangeQubits.
Eigen::MatrixXcd exchange_operator(const MacroAgent& agent);

// Applies the exchange without materializing it: index i maps to its
// complement, so the amplitude array is reversed in place.  Works for any
// power-of-two length.
void apply_exchange(std::vector<cplx>& amplitudes);

// Pointer on a periodic lattice coupled to the exchange operator through the
// lattice momentum: h = coupling * momentum (x) exchange, hbar = 1.  The
// +1 / -1 exchange eigenspaces translate the pointer by +/- coupling *
// duration, which must land on a whole number of sites.
struct NeedleModel {
  std::size_t lattice_size = 64;  // power of two, at least 8
  double spacing = 1.0;           // distance between neighboring sites
  double coupling = 1.0;
  double duration = 0.0;
};

// Site displacement coupling*duration/spacing; throws unless it is an
// integer within 1e-9.
std::ptrdiff_t needle_shift_sites(const NeedleModel& needle);

// Exact evolution under exp(-i * duration * coupling * momentum (x)
// exchange) on a two-subsystem state (agent register of agent.dimension(),
// then pointer lattice): splits the state into exchange eigencomponents and
// circularly shifts each pointer wavefunction.
StateVector needle_evolution(const NeedleModel& needle,
                             const MacroAgent& agent,
                             const StateVector& joint_state);

// Standard layout for needle states: agent register first, pointer second.
SystemLayout needle_layout(const NeedleModel& needle, const MacroAgent& agent);

// Dense lattice momentum (discrete-Fourier convention, hbar = 1): the
// operator whose exponential generates circular shifts.
Eigen::MatrixXcd lattice_momentum(std::size_t sites, double spacing);

// Dense coupling Hamiltonian on (agent (x) pointer), row-major with the
// pointer index fastest.
Eigen::MatrixXcd needle_hamiltonian(const NeedleModel& needle,
                                    const MacroAgent& agent);

// Truncated harmonic oscillator scaled by `a`: x = (A + A*)/sqrt(2a),
// p = i sqrt(a/2) (A* - A), hbar = 1.
struct ParityModel {
  std::size_t levels = 16;  // number-basis truncation, at least 8
  double a = 1.0;           // positive frequency/scale parameter
};

Eigen::MatrixXcd truncated_position(const ParityModel& model);
Eigen::MatrixXcd truncated_momentum(const ParityModel& model);

// Generator g = a x^2 + p^2/a - 1.  In the truncated number basis the
// ladder terms cancel algebraically, leaving the diagonal (2n), softened to
// levels-2 at the top edge.
Eigen::MatrixXcd parity_generator(const ParityModel& model);

// The position-and-momentum reversal exp(i (pi/2) g), diagonal +1/-1
// alternating in the matched number basis.
Eigen::MatrixXcd parity_matrix(const ParityModel& model);

// Largest singular value of the operator restricted to states 0..block-1,
// where truncation artifacts are absent.
double lower_block_norm(const Eigen::MatrixXcd& m, std::size_t block);

// Order-k Taylor truncation of parity_matrix and how badly it fails to be
// unitary, measured away from the truncation edge.
struct TaylorTruncation {
  std::size_t order = 0;
  Eigen::MatrixXcd matrix;
  // ||T*T - I|| on the lower half-block.
  double unitarity_defect = 0.0;
  // ||T - P|| on the lower half-block.
  double distance_to_exact = 0.0;
};

TaylorTruncation parity_taylor_truncation(const ParityModel& model,
                                          std::size_t order);

// One repeatability experiment: prepare the register at macro_up, read it
// out in the record-superposition basis, flip each qubit's phase
// independently with probability flip_probability, read it out again.
struct DephasingTrial {
  std::string first;
  std::string second;
  bool agree = false;
};

DephasingTrial dephasing_trial(std::size_t qubits, double flip_probability,
                               std::uint64_t seed);

struct DephasingReport {
  std::size_t qubits = 0;
  double flip_probability = 0.0;
  std::size_t trials = 0;
  // Frequency of the "plus" outcome on the first readout (1/2 regardless of
  // noise; the marginal never moves).
  double first_plus_frequency = 0.0;
  // Fraction of trials whose two readouts disagree; zero without noise.
  double distortion = 0.0;
  // (1 - (1 - 2p)^n) / 2, the expected distortion.
  double analytic_distortion = 0.0;
  // (1 - 2p)^n, the surviving weight of the record superposition.
  double coherence = 0.0;
};

// Monte-Carlo estimate over `trials` independent experiments.  Per-trial
// seeds derive from `seed`, so the result is independent of evaluation
// order.  Requires 1 <= qubits <= 12 and 0 <= flip_probability <= 1/2.
DephasingReport cat_measurement_dephasing(std::size_t qubits,
                                          double flip_probability,
                                          std::size_t trials,
                                          std::uint64_t seed);

}  // namespace qwp
