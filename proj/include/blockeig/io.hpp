#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blockeig/optimizer.hpp"
#include "blockeig/perturbation.hpp"
#include "blockeig/structured_blocks.hpp"
#include "blockeig/types.hpp"

namespace blockeig {

/// Complex literal in the text formats: `re`, `re+imi` or `re-imi`
/// (e.g. "2-1i", "-9.5+0.25i"). Throws ValidationError on anything else.
Complex parse_complex(const std::string& text);

/// Formats with 17 significant digits per component so a write/read
/// round trip is value-exact.
std::string format_complex(const Complex& z);

/// Comma-separated list of complex literals.
std::vector<Complex> parse_complex_list(const std::string& text);

/// Matrix text format: first line `rows cols`, then one whitespace-separated
/// row per line. Errors name the offending line.
CMatrix read_matrix_text(const std::string& path);
void write_matrix_text(const std::string& path, const CMatrix& m);

/// Parsed problem configuration (JSON). Unknown keys are rejected.
struct ProblemFile {
  std::string matrix_path;          // resolved against the config directory
  std::vector<Index> block_sizes;
  Index target_block = 1;           // 1-based as written in the file
  std::vector<Complex> lambdas;
  OptimizerConfig optimizer;
};

ProblemFile parse_problem_file(const std::string& json_path);

/// ProblemFile -> validated-shape instance (matrix loaded, indices 0-based).
ProblemInstance load_instance(const ProblemFile& file);

/// Serialized solve report. Matrix outputs go to `<prefix>.delta.txt`,
/// `<prefix>.xstar.txt` and `<prefix>.kperturbed.txt`; the JSON report to
/// `<prefix>.report.json`. Files appear atomically (tmp + rename) so error
/// paths leave nothing partial behind.
struct ReportPaths {
  std::string report;
  std::string delta;
  std::string x_star;
  std::string k_perturbed;
};

ReportPaths write_report(const std::string& prefix, const PerturbationResult& result);

/// JSON text of the report (also embedded in write_report).
std::string report_to_json(const PerturbationResult& result, const ReportPaths* paths);

/// CSV with header `t,s_kappa`.
std::string sweep_to_csv(const std::vector<std::pair<double, double>>& slice);

}  // namespace blockeig
