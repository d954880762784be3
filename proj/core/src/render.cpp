#include "qwp/render.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qwp {

namespace {

constexpr double kPhaseFloor = 1e-12;

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string quoted(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string pair_of(const cplx& a, int precision) {
  return "(" + format_number(a.real(), precision) + "," +
         format_number(a.imag(), precision) + ")";
}

std::string joint_label(const SystemLayout& layout, std::size_t joint) {
  std::string out = "|";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (i != 0) out += ",";
    out += std::to_string(layout.component(joint, i));
  }
  out += ">";
  return out;
}

std::string distribution_line(const OutcomeDistribution& dist, int precision) {
  std::string out;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (i != 0) out += ", ";
    out += dist.entries()[i].first + " " +
           format_number(dist.entries()[i].second, precision);
  }
  return out;
}

std::string prediction_table_line(const PredictionRecord& record,
                                  int precision) {
  const Prediction& p = record.prediction;
  std::string out = "prediction (" + record.rule + " rule) for " +
                    p.target.subsystem + " in " + p.target.basis.name() + ": ";
  if (!p.valid) {
    out += "ABSTAINED";
    if (p.invalid_reason) out += " (" + *p.invalid_reason + ")";
  } else {
    out += distribution_line(*p.distribution, precision);
    if (p.certain_outcome) out += " [certain: " + *p.certain_outcome + "]";
  }
  out += "\n";
  if (record.validation) {
    out += "validation: ";
    out += verdict_name(record.validation->verdict);
    if (record.validation->total_variation) {
      out += ", total variation " +
             format_number(*record.validation->total_variation, precision);
    }
    out += "\n";
  }
  return out;
}

std::string render_table(const Trace& trace,
                         const std::vector<PredictionRecord>& predictions,
                         const RenderOptions& options) {
  const int p = options.precision;
  std::string out;
  for (const TraceEntry& entry : trace.entries) {
    out += "== " + entry.description + " ==\n";
    if (entry.outcome) out += "  outcome: " + *entry.outcome + "\n";
    const std::vector<cplx> amps = phase_fixed_amplitudes(entry.state);
    for (std::size_t j = 0; j < amps.size(); ++j) {
      if (std::abs(amps[j]) <= kPhaseFloor) continue;
      out += "  " + joint_label(entry.state.layout(), j) + "  " +
             pair_of(amps[j], p) + "\n";
    }
    for (const ReportTable& report : entry.reports) {
      out += "  report " + report.subsystem + " in " + report.basis + ": " +
             distribution_line(report.distribution, p) + "\n";
    }
  }
  for (const PredictionRecord& record : predictions) {
    out += prediction_table_line(record, p);
  }
  return out;
}

std::string render_json(const Trace& trace,
                        const std::vector<PredictionRecord>& predictions,
                        const RenderOptions& options) {
  const int p = options.precision;
  std::string out = "{\"trace\":[";
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const TraceEntry& entry = trace.entries[i];
    if (i != 0) out += ",";
    out += "{\"step\":" + quoted(entry.description) + ",\"kind\":" +
           quoted(std::string(step_kind_name(entry.kind)));
    if (entry.outcome) out += ",\"outcome\":" + quoted(*entry.outcome);
    out += ",\"amplitudes\":[";
    const std::vector<cplx> amps = phase_fixed_amplitudes(entry.state);
    for (std::size_t j = 0; j < amps.size(); ++j) {
      if (j != 0) out += ",";
      out += "[" + format_number(amps[j].real(), p) + "," +
             format_number(amps[j].imag(), p) + "]";
    }
    out += "]";
    if (!entry.reports.empty()) {
      out += ",\"reports\":[";
      for (std::size_t k = 0; k < entry.reports.size(); ++k) {
        const ReportTable& report = entry.reports[k];
        if (k != 0) out += ",";
        out += "{\"subsystem\":" + quoted(report.subsystem) + ",\"basis\":" +
               quoted(report.basis) + ",\"outcomes\":{";
        for (std::size_t m = 0; m < report.distribution.size(); ++m) {
          if (m != 0) out += ",";
          out += quoted(report.distribution.entries()[m].first) + ":" +
                 format_number(report.distribution.entries()[m].second, p);
        }
        out += "}}";
      }
      out += "]";
    }
    out += "}";
  }
  out += "],\"predictions\":[";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const PredictionRecord& record = predictions[i];
    const Prediction& pred = record.prediction;
    if (i != 0) out += ",";
    out += "{\"rule\":" + quoted(record.rule) + ",\"target\":{\"subsystem\":" +
           quoted(pred.target.subsystem) + ",\"basis\":" +
           quoted(pred.target.basis.name()) + "},\"valid\":";
    out += pred.valid ? "true" : "false";
    if (pred.invalid_reason) {
      out += ",\"reason\":" + quoted(*pred.invalid_reason);
    }
    if (pred.distribution) {
      out += ",\"distribution\":{";
      for (std::size_t m = 0; m < pred.distribution->size(); ++m) {
        if (m != 0) out += ",";
        out += quoted(pred.distribution->entries()[m].first) + ":" +
               format_number(pred.distribution->entries()[m].second, p);
      }
      out += "}";
    }
    if (pred.certain_outcome) {
      out += ",\"certain\":" + quoted(*pred.certain_outcome);
    }
    if (record.validation) {
      out += ",\"validation\":{\"verdict\":" +
             quoted(std::string(verdict_name(record.validation->verdict)));
      if (record.validation->total_variation) {
        out += ",\"total_variation\":" +
               format_number(*record.validation->total_variation, p);
      }
      out += "}";
    }
    out += "}";
  }
  out += "]}\n";
  return out;
}

}  // namespace

OutputFormat output_format_from_name(std::string_view name) {
  if (name == "table") return OutputFormat::table;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + std::string(name) +
                              "', expected 'table' or 'json'");
}

std::string format_number(double value, int precision) {
  if (precision < 1) precision = 1;
  if (precision > 17) precision = 17;
  if (value == 0.0) value = 0.0;  // folds -0 into 0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
  return buf;
}

std::vector<cplx> phase_fixed_amplitudes(const StateVector& state) {
  std::vector<cplx> amps(state.amplitudes().begin(),
                         state.amplitudes().end());
  for (const cplx& a : amps) {
    const double mag = std::abs(a);
    if (mag > kPhaseFloor) {
      const cplx rotation = std::conj(a) / mag;
      for (cplx& b : amps) b *= rotation;
      break;
    }
  }
  return amps;
}

std::string_view step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::prepare: return "prepare";
    case StepKind::premeasure: return "premeasure";
    case StepKind::catalytic_premeasure: return "catalytic_premeasure";
    case StepKind::collapse: return "collapse";
    case StepKind::report: return "report";
  }
  throw std::logic_error("unreachable");
}

std::string render_run(const Trace& trace,
                       const std::vector<PredictionRecord>& predictions,
                       OutputFormat format, const RenderOptions& options) {
  return format == OutputFormat::json
             ? render_json(trace, predictions, options)
             : render_table(trace, predictions, options);
}

}  // namespace qwp
