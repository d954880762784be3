#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwp/prediction.hpp"
#include "qwp/protocol.hpp"

namespace qwp {

enum class OutputFormat { table, json };

// Accepts "table" or "json"; anything else throws std::invalid_argument.
OutputFormat output_format_from_name(std::string_view name);

struct RenderOptions {
  int precision = 12;  // significant digits for every rendered number
};

// %.{precision}g with negative zero folded to positive zero.  Every rendered
// number goes through here, so identical inputs give byte-identical output.
std::string format_number(double value, int precision);

// Copy of the state's amplitudes with the global phase fixed: the first
// component of magnitude above 1e-12 is rotated to be real and nonnegative.
std::vector<cplx> phase_fixed_amplitudes(const StateVector& state);

std::string_view step_kind_name(StepKind kind);

// One prediction as the CLI reports it, optionally checked against an
// actually observed distribution.
struct PredictionRecord {
  std::string rule;  // "modified" or "naive"
  Prediction prediction;
  std::optional<ValidationReport> validation;
};

// Renders a full run: the trace, then any predictions.  The JSON form is one
// line shaped {"trace":[{"step","kind","amplitudes",...},...],
// "predictions":[...]} and is byte-stable for identical inputs.
std::string render_run(const Trace& trace,
                       const std::vector<PredictionRecord>& predictions,
                       OutputFormat format, const RenderOptions& options = {});

}  // namespace qwp
