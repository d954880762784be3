#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "qwp/dsl.hpp"
#include "qwp/feasibility.hpp"
#include "qwp/measurement.hpp"
#include "qwp/prediction.hpp"
#include "qwp/protocol.hpp"
#include "qwp/render.hpp"
#include "qwp/rng.hpp"
#include "qwp/scenarios.hpp"

namespace {

using namespace qwp;

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

// 0 on success, otherwise the process exit code; errors go to stderr.
int load_protocol(const std::string& path, std::optional<Protocol>& out) {
  const std::optional<std::string> text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return 2;
  }
  ParseResult result = parse_protocol(*text);
  if (!result.ok()) {
    for (const ParseError& error : result.errors) {
      std::cerr << path << ":" << format_parse_error(error) << "\n";
    }
    return 1;
  }
  out = std::move(result.protocol);
  return 0;
}

bool has_collapse_step(const Protocol& protocol) {
  for (const Step& step : protocol.steps) {
    if (step_kind(step) == StepKind::collapse) return true;
  }
  return false;
}

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  OutputFormat format = OutputFormat::table;
  RenderOptions render;
};

int run_command(const std::string& path, const CommonOptions& common) {
  std::optional<Protocol> protocol;
  if (const int code = load_protocol(path, protocol); code != 0) return code;
  const bool sampling = has_collapse_step(*protocol);
  if (sampling && !common.seed) {
    return usage_error("--seed is required: '" + path +
                       "' contains collapse steps");
  }
  if (!sampling && common.seed) {
    return usage_error("--seed was given but '" + path +
                       "' has no collapse step");
  }
  const Trace trace = run_protocol(*protocol, common.seed);
  std::cout << render_run(trace, {}, common.format, common.render);
  return 0;
}

int scenario_command(const std::string& name, const CommonOptions& common) {
  const std::optional<Scenario> scenario = scenario_from_name(name);
  if (!scenario) {
    return usage_error("unknown scenario '" + name +
                       "', expected cat, dog, or pet");
  }
  if (common.seed) {
    return usage_error("--seed was given but scenarios have no collapse step");
  }
  const Trace trace = run_protocol(builtin_protocol(*scenario), std::nullopt);
  std::cout << render_run(trace, {}, common.format, common.render);
  return 0;
}

int predict_command(const std::string& path, const std::string& agent,
                    bool naive, const std::string& actual_path,
                    const CommonOptions& common) {
  std::optional<Protocol> protocol;
  if (const int code = load_protocol(path, protocol); code != 0) return code;
  if (has_collapse_step(*protocol)) {
    std::cerr << "error: cannot predict over a protocol with collapse steps\n";
    return 1;
  }
  if (!protocol->layout.has(agent)) {
    std::cerr << "error: agent '" << agent << "' is not a subsystem of '"
              << path << "'\n";
    return 1;
  }

  std::optional<Protocol> actual_protocol;
  if (!actual_path.empty()) {
    if (const int code = load_protocol(actual_path, actual_protocol);
        code != 0) {
      return code;
    }
  }
  const bool sampling =
      actual_protocol.has_value() && has_collapse_step(*actual_protocol);
  if (sampling && !common.seed) {
    return usage_error("--seed is required: '" + actual_path +
                       "' contains collapse steps");
  }
  if (!sampling && common.seed) {
    return usage_error("--seed was given but nothing samples");
  }

  Protocol preparation{protocol->layout, protocol->bases, {}};
  std::vector<Step> future;
  for (const Step& step : protocol->steps) {
    if (step_kind(step) == StepKind::prepare) {
      preparation.steps.push_back(step);
    } else {
      future.push_back(step);
    }
  }

  const ReportStep* last_report = nullptr;
  for (const Step& step : protocol->steps) {
    if (const auto* report = std::get_if<ReportStep>(&step)) {
      last_report = report;
    }
  }
  if (last_report == nullptr || last_report->requests.empty()) {
    std::cerr << "error: '" << path << "' has no report step to predict\n";
    return 1;
  }
  const ReportRequest& request = last_report->requests.front();

  std::optional<Basis> record_basis;
  for (const Basis& basis : protocol->bases) {
    if (basis.subsystem() == agent) {
      record_basis = basis;
      break;
    }
  }

  const Trace prep_trace = run_protocol(preparation, std::nullopt);
  const KnowledgeModel model{agent, prep_trace.final_state(), future,
                             PredictionTarget{request.subsystem, request.basis},
                             std::move(record_basis)};

  const Prediction prediction =
      naive ? predict_q(model) : predict_q_star(model, future);

  const Trace trace = run_protocol(*protocol, std::nullopt);
  std::optional<OutcomeDistribution> actual;
  if (actual_protocol) {
    const Trace actual_trace = run_protocol(*actual_protocol, common.seed);
    actual = born(actual_trace.final_state(), request.subsystem,
                  request.basis);
  } else if (!catalytic_interval_check(model, future)) {
    // A catalytic measurement scrambled the agent's records, so the observed
    // statistics are the fully mixed ones over the target basis.
    std::vector<std::pair<std::string, double>> entries;
    const double weight = 1.0 / static_cast<double>(request.basis.dimension());
    for (std::size_t k = 0; k < request.basis.dimension(); ++k) {
      entries.emplace_back(request.basis.label(k), weight);
    }
    actual = OutcomeDistribution(std::move(entries));
  } else {
    actual = born(trace.final_state(), request.subsystem, request.basis);
  }

  const ValidationReport report = validate(prediction, *actual);
  std::vector<PredictionRecord> records;
  records.push_back(PredictionRecord{naive ? "naive" : "modified", prediction,
                                     report});
  std::cout << render_run(trace, records, common.format, common.render);
  return 0;
}

std::string fmt(double value, const CommonOptions& common) {
  return format_number(value, common.render.precision);
}

int parity_command(std::size_t levels, int max_order,
                   const CommonOptions& common) {
  const ParityModel model{levels, 1.0};
  const Eigen::MatrixXcd readout = parity_matrix(model);

  double readout_deviation = 0.0;
  for (Eigen::Index i = 0; i < readout.rows(); ++i) {
    for (Eigen::Index j = 0; j < readout.cols(); ++j) {
      const double expected = i == j ? (i % 2 == 0 ? 1.0 : -1.0) : 0.0;
      readout_deviation =
          std::max(readout_deviation, std::abs(readout(i, j) - expected));
    }
  }

  const std::size_t block = levels / 2;
  const Eigen::MatrixXcd x = truncated_position(model);
  const Eigen::MatrixXcd p = truncated_momentum(model);
  const double anti_x = lower_block_norm(readout * x + x * readout, block);
  const double anti_p = lower_block_norm(readout * p + p * readout, block);

  std::vector<TaylorTruncation> sweep;
  for (int order = 0; order <= max_order; ++order) {
    sweep.push_back(parity_taylor_truncation(model, order));
  }

  std::ostringstream out;
  if (common.format == OutputFormat::json) {
    out << "{\"feasibility\":\"parity\",\"levels\":" << levels
        << ",\"readout_deviation\":" << fmt(readout_deviation, common)
        << ",\"position_anticommutator\":" << fmt(anti_x, common)
        << ",\"momentum_anticommutator\":" << fmt(anti_p, common)
        << ",\"taylor\":[";
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (i != 0) out << ",";
      out << "{\"order\":" << sweep[i].order << ",\"unitarity_defect\":"
          << fmt(sweep[i].unitarity_defect, common)
          << ",\"distance_to_exact\":"
          << fmt(sweep[i].distance_to_exact, common) << "}";
    }
    out << "]}\n";
  } else {
    out << "parity readout on " << levels << " levels\n"
        << "  deviation from the alternating-sign diagonal: "
        << fmt(readout_deviation, common) << "\n"
        << "  anticommutator with position on the lower half-block: "
        << fmt(anti_x, common) << "\n"
        << "  anticommutator with momentum on the lower half-block: "
        << fmt(anti_p, common) << "\n"
        << "  truncation sweep (order, unitarity defect, distance to exact):\n";
    for (const TaylorTruncation& t : sweep) {
      out << "    " << t.order << "  " << fmt(t.unitarity_defect, common)
          << "  " << fmt(t.distance_to_exact, common) << "\n";
    }
  }
  std::cout << out.str();
  return 0;
}

int needle_command(const NeedleModel& needle, std::size_t agent_qubits,
                   const CommonOptions& common) {
  const MacroAgent agent{agent_qubits};
  const std::ptrdiff_t shift = needle_shift_sites(needle);

  double exchange_deviation = 0.0;
  if (agent_qubits <= kMaxDenseExchangeQubits) {
    const Eigen::MatrixXcd pi = exchange_operator(agent);
    const Eigen::MatrixXcd identity =
        Eigen::MatrixXcd::Identity(pi.rows(), pi.cols());
    exchange_deviation = (pi * pi - identity).cwiseAbs().maxCoeff();
  } else {
    SplitMix64 rng(0x9e3779b97f4a7c15ull);
    std::vector<cplx> vec(agent.dimension());
    for (cplx& v : vec) v = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    const std::vector<cplx> original = vec;
    apply_exchange(vec);
    apply_exchange(vec);
    for (std::size_t i = 0; i < vec.size(); ++i) {
      exchange_deviation =
          std::max(exchange_deviation, std::abs(vec[i] - original[i]));
    }
  }

  struct PointerRun {
    std::string state;
    std::vector<std::size_t> sites;
    std::vector<double> weights;
  };
  const SystemLayout layout = needle_layout(needle, agent);
  const std::size_t center = needle.lattice_size / 2;
  std::vector<cplx> pointer_at_center(needle.lattice_size, cplx(0.0, 0.0));
  pointer_at_center[center] = cplx(1.0, 0.0);

  std::vector<PointerRun> runs;
  const std::vector<std::pair<std::string, std::vector<cplx>>> starts = {
      {"up", agent.macro_up()},
      {"down", agent.macro_down()},
      {"up+down", agent.record_superposition(+1)},
  };
  for (const auto& [name, agent_state] : starts) {
    const StateVector in =
        make_product_state(layout, {agent_state, pointer_at_center});
    const StateVector out = needle_evolution(needle, agent, in);
    PointerRun run{name, {}, {}};
    for (std::size_t site = 0; site < needle.lattice_size; ++site) {
      double weight = 0.0;
      for (std::size_t a = 0; a < agent.dimension(); ++a) {
        weight += std::norm(out.amplitude(a * needle.lattice_size + site));
      }
      if (weight > 1e-9) {
        run.sites.push_back(site);
        run.weights.push_back(weight);
      }
    }
    runs.push_back(std::move(run));
  }

  std::ostringstream out;
  if (common.format == OutputFormat::json) {
    out << "{\"feasibility\":\"needle\",\"sites\":" << needle.lattice_size
        << ",\"spacing\":" << fmt(needle.spacing, common)
        << ",\"coupling\":" << fmt(needle.coupling, common)
        << ",\"duration\":" << fmt(needle.duration, common)
        << ",\"shift_sites\":" << shift
        << ",\"start_site\":" << center
        << ",\"exchange_deviation\":" << fmt(exchange_deviation, common)
        << ",\"pointer\":[";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (i != 0) out << ",";
      out << "{\"state\":\"" << runs[i].state << "\",\"sites\":[";
      for (std::size_t j = 0; j < runs[i].sites.size(); ++j) {
        if (j != 0) out << ",";
        out << runs[i].sites[j];
      }
      out << "],\"weights\":[";
      for (std::size_t j = 0; j < runs[i].weights.size(); ++j) {
        if (j != 0) out << ",";
        out << fmt(runs[i].weights[j], common);
      }
      out << "]}";
    }
    out << "]}\n";
  } else {
    out << "needle pointer on " << needle.lattice_size
        << " sites (spacing " << fmt(needle.spacing, common) << ", coupling "
        << fmt(needle.coupling, common) << ", duration "
        << fmt(needle.duration, common) << ")\n"
        << "  displacement: " << shift << " sites from site " << center
        << "\n"
        << "  exchange applied twice, deviation from identity: "
        << fmt(exchange_deviation, common) << "\n";
    for (const PointerRun& run : runs) {
      out << "  record '" << run.state << "' moves the pointer to";
      for (std::size_t j = 0; j < run.sites.size(); ++j) {
        out << (j == 0 ? " " : ", ") << "site " << run.sites[j] << " (weight "
            << fmt(run.weights[j], common) << ")";
      }
      out << "\n";
    }
  }
  std::cout << out.str();
  return 0;
}

int dephasing_command(std::size_t qubits, double flip, std::size_t trials,
                      const CommonOptions& common) {
  if (!common.seed) {
    return usage_error("--seed is required: dephasing trials are sampled");
  }
  const DephasingReport report =
      cat_measurement_dephasing(qubits, flip, trials, *common.seed);
  std::ostringstream out;
  if (common.format == OutputFormat::json) {
    out << "{\"feasibility\":\"dephasing\",\"qubits\":" << report.qubits
        << ",\"flip_probability\":" << fmt(report.flip_probability, common)
        << ",\"trials\":" << report.trials
        << ",\"first_plus_frequency\":"
        << fmt(report.first_plus_frequency, common)
        << ",\"distortion\":" << fmt(report.distortion, common)
        << ",\"analytic_distortion\":"
        << fmt(report.analytic_distortion, common)
        << ",\"coherence\":" << fmt(report.coherence, common) << "}\n";
  } else {
    out << "record dephasing with " << report.qubits
        << " qubits, flip probability " << fmt(report.flip_probability, common)
        << ", " << report.trials << " trials\n"
        << "  first readout plus frequency: "
        << fmt(report.first_plus_frequency, common) << "\n"
        << "  repeated readout disagreement: " << fmt(report.distortion, common)
        << "\n"
        << "  analytic disagreement: "
        << fmt(report.analytic_distortion, common) << "\n"
        << "  residual record coherence: " << fmt(report.coherence, common)
        << "\n";
  }
  std::cout << out.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"state-vector simulator for observers inside quantum "
               "protocols"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string output = "table";
  int precision = 12;
  app.add_option("--seed", common.seed, "RNG seed for sampled outcomes");
  app.add_option("--output", output, "output format: table or json")
      ->check(CLI::IsMember({"table", "json"}));
  app.add_option("--precision", precision,
                 "significant digits in rendered numbers")
      ->check(CLI::Range(1, 17));

  std::string run_file;
  CLI::App* run_cmd =
      app.add_subcommand("run", "parse and simulate a protocol file");
  run_cmd->add_option("file", run_file, "protocol file")->required();
  run_cmd->fallthrough();

  std::string scenario_name_arg;
  CLI::App* scenario_cmd =
      app.add_subcommand("scenario", "simulate a bundled scenario");
  scenario_cmd->add_option("name", scenario_name_arg, "cat, dog, or pet")
      ->required();
  scenario_cmd->fallthrough();

  std::string predict_file;
  std::string agent_name;
  std::string actual_file;
  bool naive = false;
  CLI::App* predict_cmd = app.add_subcommand(
      "predict", "predict an agent's statistics for a protocol's last report");
  predict_cmd->add_option("file", predict_file, "protocol file")->required();
  predict_cmd
      ->add_option("--agent", agent_name, "subsystem making the prediction")
      ->required();
  predict_cmd->add_flag(
      "--naive", naive,
      "predict even when a catalytic measurement scrambles the agent's "
      "records");
  predict_cmd->add_option(
      "--actual", actual_file,
      "protocol file whose run supplies the observed statistics");
  predict_cmd->fallthrough();

  std::string analysis;
  std::size_t parity_levels = 16;
  int taylor_max = 80;
  std::size_t needle_sites = 64;
  double needle_spacing = 1.0;
  double needle_coupling = 1.0;
  double needle_duration = 3.0;
  std::size_t agent_qubits = 1;
  std::size_t deph_qubits = 4;
  double deph_flip = 0.1;
  std::size_t deph_trials = 10000;
  CLI::App* feas_cmd = app.add_subcommand(
      "feasibility", "numerical checks on observer-scale operators");
  feas_cmd->add_option("analysis", analysis, "parity, needle, or dephasing")
      ->required()
      ->check(CLI::IsMember({"parity", "needle", "dephasing"}));
  feas_cmd->add_option("--levels", parity_levels,
                       "oscillator levels for the parity readout");
  feas_cmd->add_option("--max-order", taylor_max,
                       "largest truncation order to sweep");
  feas_cmd->add_option("--sites", needle_sites, "needle lattice sites");
  feas_cmd->add_option("--spacing", needle_spacing, "needle lattice spacing");
  feas_cmd->add_option("--coupling", needle_coupling,
                       "needle coupling strength");
  feas_cmd->add_option("--duration", needle_duration,
                       "needle interaction time");
  feas_cmd->add_option("--agent-qubits", agent_qubits,
                       "record register size in qubits");
  feas_cmd->add_option("--qubits", deph_qubits,
                       "record register size for the dephasing run");
  feas_cmd->add_option("--flip", deph_flip,
                       "per-qubit phase-flip probability");
  feas_cmd->add_option("--trials", deph_trials, "sampled repetitions");
  feas_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  common.format =
      output == "json" ? OutputFormat::json : OutputFormat::table;
  common.render.precision = precision;

  try {
    if (run_cmd->parsed()) return run_command(run_file, common);
    if (scenario_cmd->parsed()) {
      return scenario_command(scenario_name_arg, common);
    }
    if (predict_cmd->parsed()) {
      return predict_command(predict_file, agent_name, naive, actual_file,
                             common);
    }
    if (feas_cmd->parsed()) {
      if (analysis == "parity") {
        if (common.seed) {
          return usage_error("--seed was given but parity is deterministic");
        }
        return parity_command(parity_levels, taylor_max, common);
      }
      if (analysis == "needle") {
        if (common.seed) {
          return usage_error("--seed was given but needle is deterministic");
        }
        const NeedleModel needle{needle_sites, needle_spacing, needle_coupling,
                                 needle_duration};
        return needle_command(needle, agent_qubits, common);
      }
      return dephasing_command(deph_qubits, deph_flip, deph_trials, common);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
