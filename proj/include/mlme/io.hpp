#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlme/simulate.hpp"

namespace mlme::io {

// JSON schemas. Hermitian operators travel as
//   {"dim": D, "re": [[...]], "im": [[...]]}
// row-major; values round-trip exactly. Parse errors throw InvalidInput with
// a field diagnostic.

std::string to_json(const HermitianOperator& op);
HermitianOperator hermitian_from_json(const std::string& text);

std::string to_json(const Pom& pom);
Pom pom_from_json(const std::string& text);

/// {"settings": [{"theta": t, "xs": [...]}], "dim": D,
///  "mode": "scaled-complement"|"binned"}
struct HomodyneSpecFile {
    std::vector<QuadratureSetting> settings;
    Index dim = 0;
    HomodyneMode mode = HomodyneMode::scaled_complement;
};
std::string to_json(const HomodyneSpecFile& spec);
HomodyneSpecFile homodyne_spec_from_json(const std::string& text);

/// True when the JSON looks like a quadrature-settings file rather than an
/// explicit effects file.
bool looks_like_homodyne_spec(const std::string& text);

/// {"counts": [n_0, ...], "total": N}
std::string to_json(const CountData& data);
CountData counts_from_json(const std::string& text);

std::string to_json(const ReconstructionResult& result, bool include_objective_trace = false);
ReconstructionResult reconstruction_from_json(const std::string& text);

std::string to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const std::string& text);

/// Sweep CSV: `key,mean_entropy,mean_loglik,mean_trace_distance,mean_w00,trials`
/// with 12 significant digits; dimension sweeps append `complete` and
/// `truncation_bias` columns.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::string sweep_csv(const std::vector<SweepRecord>& records);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mlme::io
