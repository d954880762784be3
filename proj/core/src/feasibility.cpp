#include "qwp/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qwp/rng.hpp"

namespace qwp {

namespace {

constexpr std::size_t kMaxAgentQubits = 20;
constexpr std::size_t kMaxDenseNeedleDimension = 2048;
constexpr std::size_t kMaxParityLevels = 512;
constexpr std::size_t kMaxDephasingQubits = 12;
constexpr double kShiftIntegerTolerance = 1e-9;

void check_agent(const MacroAgent& agent) {
  if (agent.qubits == 0 || agent.qubits > kMaxAgentQubits) {
    throw std::invalid_argument("macro agent needs between 1 and " +
                                std::to_string(kMaxAgentQubits) +
                                " qubits, got " +
                                std::to_string(agent.qubits));
  }
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_needle(const NeedleModel& needle) {
  if (needle.lattice_size < 8 || !is_power_of_two(needle.lattice_size)) {
    throw std::invalid_argument(
        "needle lattice size must be a power of two of at least 8, got " +
        std::to_string(needle.lattice_size));
  }
  if (!(needle.spacing > 0.0)) {
    throw std::invalid_argument("needle spacing must be positive");
  }
}

void check_parity(const ParityModel& model) {
  if (model.levels < 8 || model.levels > kMaxParityLevels) {
    throw std::invalid_argument(
        "parity truncation must have between 8 and " +
        std::to_string(kMaxParityLevels) + " levels, got " +
        std::to_string(model.levels));
  }
  if (!(model.a > 0.0)) {
    throw std::invalid_argument("parity scale parameter must be positive");
  }
}

Eigen::MatrixXcd lowering_operator(std::size_t levels) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
  for (std::size_t n = 1; n < levels; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

}  // namespace

std::vector<cplx> MacroAgent::macro_up() const {
  check_agent(*this);
  std::vector<cplx> v(dimension(), 0.0);
  v.front() = 1.0;
  return v;
}

std::vector<cplx> MacroAgent::macro_down() const {
  check_agent(*this);
  std::vector<cplx> v(dimension(), 0.0);
  v.back() = 1.0;
  return v;
}

std::vector<cplx> MacroAgent::record_superposition(int sign) const {
  check_agent(*this);
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("record superposition sign must be +1 or -1");
  }
  const double w = 1.0 / std::sqrt(2.0);
  std::vector<cplx> v(dimension(), 0.0);
  v.front() = w;
  v.back() = sign > 0 ? w : -w;
  return v;
}

Eigen::MatrixXcd exchange_operator(const MacroAgent& agent) {
  check_agent(agent);
  if (agent.qubits > kMaxDenseExchangeQubits) {
    throw std::invalid_argument("dense exchange operator capped at " +
                                std::to_string(kMaxDenseExchangeQubits) +
                                " qubits; use apply_exchange beyond that");
  }
  const std::size_t dim = agent.dimension();
  Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    pi(static_cast<Eigen::Index>(dim - 1 - i), static_cast<Eigen::Index>(i)) =
        1.0;
  }
  return pi;
}

void apply_exchange(std::vector<cplx>& amplitudes) {
  if (amplitudes.size() < 2 || !is_power_of_two(amplitudes.size())) {
    throw std::invalid_argument(
        "exchange acts on a power-of-two amplitude array of at least 2");
  }
  // Flipping every qubit complements the index, which reverses the array.
  std::reverse(amplitudes.begin(), amplitudes.end());
}

std::ptrdiff_t needle_shift_sites(const NeedleModel& needle) {
  check_needle(needle);
  const double sites = needle.coupling * needle.duration / needle.spacing;
  const double rounded = std::round(sites);
  if (std::abs(sites - rounded) > kShiftIntegerTolerance) {
    throw std::invalid_argument(
        "needle displacement must be a whole number of lattice sites, got " +
        std::to_string(sites));
  }
  return static_cast<std::ptrdiff_t>(rounded);
}

SystemLayout needle_layout(const NeedleModel& needle,
                           const MacroAgent& agent) {
  check_agent(agent);
  check_needle(needle);
  return SystemLayout({{"agent", agent.dimension()},
                       {"needle", needle.lattice_size}});
}

StateVector needle_evolution(const NeedleModel& needle,
                             const MacroAgent& agent,
                             const StateVector& joint_state) {
  check_agent(agent);
  const std::ptrdiff_t shift = needle_shift_sites(needle);
  const SystemLayout& layout = joint_state.layout();
  const std::size_t m = agent.dimension();
  const std::size_t l = needle.lattice_size;
  if (layout.size() != 2 || layout.at(0).dimension != m ||
      layout.at(1).dimension != l) {
    throw std::invalid_argument(
        "needle evolution expects an (agent register, pointer lattice) "
        "layout matching the models");
  }

  const std::ptrdiff_t ls = static_cast<std::ptrdiff_t>(l);
  const std::size_t forward = static_cast<std::size_t>(((shift % ls) + ls) % ls);
  const std::size_t backward = (l - forward) % l;
  const std::span<const cplx> in = joint_state.amplitudes();
  std::vector<cplx> out(in.size(), 0.0);
  // Split into exchange eigencomponents; the +1 component translates
  // forward, the -1 component backward.
  for (std::size_t row = 0; row < m; ++row) {
    const std::size_t partner = m - 1 - row;
    for (std::size_t j = 0; j < l; ++j) {
      const cplx even = 0.5 * (in[row * l + j] + in[partner * l + j]);
      const cplx odd = 0.5 * (in[row * l + j] - in[partner * l + j]);
      out[row * l + (j + forward) % l] += even;
      out[row * l + (j + backward) % l] += odd;
    }
  }
  return StateVector(layout, std::move(out));
}

Eigen::MatrixXcd lattice_momentum(std::size_t sites, double spacing) {
  if (sites < 2 || !is_power_of_two(sites)) {
    throw std::invalid_argument(
        "lattice momentum needs a power-of-two site count of at least 2");
  }
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("lattice spacing must be positive");
  }
  const std::size_t l = sites;
  const double tau = 2.0 * std::numbers::pi;
  Eigen::MatrixXcd fourier(l, l);
  Eigen::VectorXd wavenumbers(l);
  const double scale = 1.0 / std::sqrt(static_cast<double>(l));
  for (std::size_t k = 0; k < l; ++k) {
    const double mode = k < l / 2 ? static_cast<double>(k)
                                  : static_cast<double>(k) -
                                        static_cast<double>(l);
    wavenumbers(static_cast<Eigen::Index>(k)) =
        tau * mode / (static_cast<double>(l) * spacing);
    for (std::size_t j = 0; j < l; ++j) {
      const double angle =
          -tau * static_cast<double>(k) * static_cast<double>(j) /
          static_cast<double>(l);
      fourier(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          scale * cplx(std::cos(angle), std::sin(angle));
    }
  }
  return fourier.adjoint() * wavenumbers.asDiagonal() * fourier;
}

Eigen::MatrixXcd needle_hamiltonian(const NeedleModel& needle,
                                    const MacroAgent& agent) {
  check_agent(agent);
  check_needle(needle);
  const std::size_t m = agent.dimension();
  const std::size_t l = needle.lattice_size;
  if (m * l > kMaxDenseNeedleDimension) {
    throw std::invalid_argument(
        "dense needle Hamiltonian capped at joint dimension " +
        std::to_string(kMaxDenseNeedleDimension));
  }
  const Eigen::MatrixXcd momentum =
      needle.coupling * lattice_momentum(l, needle.spacing);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m * l, m * l);
  for (std::size_t row = 0; row < m; ++row) {
    h.block(static_cast<Eigen::Index>(row * l),
            static_cast<Eigen::Index>((m - 1 - row) * l),
            static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) =
        momentum;
  }
  return h;
}

Eigen::MatrixXcd truncated_position(const ParityModel& model) {
  check_parity(model);
  const Eigen::MatrixXcd a = lowering_operator(model.levels);
  return (a + a.adjoint()) / std::sqrt(2.0 * model.a);
}

Eigen::MatrixXcd truncated_momentum(const ParityModel& model) {
  check_parity(model);
  const Eigen::MatrixXcd a = lowering_operator(model.levels);
  return cplx(0.0, 1.0) * std::sqrt(model.a / 2.0) * (a.adjoint() - a);
}

Eigen::MatrixXcd parity_generator(const ParityModel& model) {
  const Eigen::MatrixXcd x = truncated_position(model);
  const Eigen::MatrixXcd p = truncated_momentum(model);
  const Eigen::MatrixXcd identity =
      Eigen::MatrixXcd::Identity(model.levels, model.levels);
  return model.a * x * x + p * p / model.a - identity;
}

Eigen::MatrixXcd parity_matrix(const ParityModel& model) {
  const Eigen::MatrixXcd g = parity_generator(model);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("parity generator eigendecomposition failed");
  }
  const double half_pi = std::numbers::pi / 2.0;
  Eigen::VectorXcd phases(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    const double angle = half_pi * solver.eigenvalues()(i);
    phases(i) = cplx(std::cos(angle), std::sin(angle));
  }
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().adjoint();
}

double lower_block_norm(const Eigen::MatrixXcd& m, std::size_t block) {
  const auto side = static_cast<Eigen::Index>(block);
  if (side <= 0 || side > m.rows() || side > m.cols()) {
    throw std::invalid_argument("lower block exceeds matrix dimensions");
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.topLeftCorner(side, side));
  return svd.singularValues()(0);
}

TaylorTruncation parity_taylor_truncation(const ParityModel& model,
                                          std::size_t order) {
  const Eigen::MatrixXcd g = parity_generator(model);
  const Eigen::MatrixXcd identity =
      Eigen::MatrixXcd::Identity(model.levels, model.levels);
  const cplx z(0.0, std::numbers::pi / 2.0);

  TaylorTruncation result;
  result.order = order;
  result.matrix = identity;
  Eigen::MatrixXcd term = identity;
  for (std::size_t j = 1; j <= order; ++j) {
    term = (term * g) * (z / static_cast<double>(j));
    result.matrix += term;
  }
  const std::size_t half = model.levels / 2;
  result.unitarity_defect = lower_block_norm(
      result.matrix.adjoint() * result.matrix - identity, half);
  result.distance_to_exact =
      lower_block_norm(result.matrix - parity_matrix(model), half);
  return result;
}

DephasingTrial dephasing_trial(std::size_t qubits, double flip_probability,
                               std::uint64_t seed) {
  if (qubits == 0 || qubits > kMaxDephasingQubits) {
    throw std::invalid_argument("dephasing register needs between 1 and " +
                                std::to_string(kMaxDephasingQubits) +
                                " qubits");
  }
  if (flip_probability < 0.0 || flip_probability > 0.5) {
    throw std::invalid_argument(
        "per-qubit flip probability must lie in [0, 1/2]");
  }

  SplitMix64 rng(seed);
  // Amplitudes on the all-zeros and all-ones record components; the readout
  // basis and the noise never leave their span.
  cplx up = 1.0;
  cplx down = 0.0;

  const auto read_out = [&](cplx& u, cplx& d) {
    const double plus_probability = 0.5 * std::norm(u + d);
    const bool plus = rng.uniform() < plus_probability;
    const double w = 1.0 / std::sqrt(2.0);
    u = w;
    d = plus ? w : -w;
    return plus;
  };

  DephasingTrial trial;
  const bool first_plus = read_out(up, down);
  trial.first = first_plus ? "plus" : "minus";

  // A phase flip negates the all-ones component; only the flip parity
  // survives.
  int sign = 1;
  for (std::size_t q = 0; q < qubits; ++q) {
    if (rng.uniform() < flip_probability) sign = -sign;
  }
  down *= static_cast<double>(sign);

  const bool second_plus = read_out(up, down);
  trial.second = second_plus ? "plus" : "minus";
  trial.agree = first_plus == second_plus;
  return trial;
}

DephasingReport cat_measurement_dephasing(std::size_t qubits,
                                          double flip_probability,
                                          std::size_t trials,
                                          std::uint64_t seed) {
  if (trials == 0) {
    throw std::invalid_argument("dephasing estimate needs at least one trial");
  }
  std::size_t disagreements = 0;
  std::size_t first_plus = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const DephasingTrial trial =
        dephasing_trial(qubits, flip_probability, SplitMix64::derive(seed, i));
    if (!trial.agree) ++disagreements;
    if (trial.first == "plus") ++first_plus;
  }

  DephasingReport report;
  report.qubits = qubits;
  report.flip_probability = flip_probability;
  report.trials = trials;
  report.first_plus_frequency =
      static_cast<double>(first_plus) / static_cast<double>(trials);
  report.distortion =
      static_cast<double>(disagreements) / static_cast<double>(trials);
  report.coherence = std::pow(1.0 - 2.0 * flip_probability,
                              static_cast<double>(qubits));
  report.analytic_distortion = 0.5 * (1.0 - report.coherence);
  return report;
}

}  // namespace qwp
