#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blockeig/io.hpp"
#include "blockeig/matrix_core.hpp"
#include "blockeig/solver.hpp"

namespace {

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("BLOCKEIG_LOG");
  if (env == nullptr) return LogLevel::kInfo;
  const std::string value(env);
  if (value == "quiet") return LogLevel::kQuiet;
  if (value == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) std::cerr << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) std::cerr << msg << '\n';
}

std::string strip_extension(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path;
  }
  return path.substr(0, dot);
}

struct RangeSpec {
  double lo = 0.0;
  double hi = 0.0;
  long steps = 1;
};

RangeSpec parse_range(const std::string& text) {
  RangeSpec r;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw blockeig::ValidationError("range", "expected a:b:n, got '" + text + "'");
  }
  try {
    r.lo = std::stod(text.substr(0, c1));
    r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.steps = std::stol(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw blockeig::ValidationError("range", "expected a:b:n, got '" + text + "'");
  }
  if (r.steps < 1) throw blockeig::ValidationError("range", "need at least one step");
  return r;
}

blockeig::GammaPoint parse_gamma_spec(const std::string& text, blockeig::Index k) {
  const std::vector<blockeig::Complex> values = blockeig::parse_complex_list(text);
  blockeig::GammaPoint g = blockeig::GammaPoint::zero(k);
  if (static_cast<blockeig::Index>(values.size()) != g.pair_count()) {
    throw blockeig::ValidationError(
        "direction", "expected " + std::to_string(g.pair_count()) +
                         " entries for k=" + std::to_string(k) + ", got " +
                         std::to_string(values.size()));
  }
  for (blockeig::Index t = 0; t < g.pair_count(); ++t) {
    g.packed()(t) = values[static_cast<std::size_t>(t)];
  }
  return g;
}

int run_solve(const std::string& config_path, const std::string& output_prefix) {
  const blockeig::ProblemFile file = blockeig::parse_problem_file(config_path);
  blockeig::SolveRequest request;
  request.instance = blockeig::load_instance(file);
  request.optimizer = file.optimizer;

  log_info("solving " + config_path + " (k=" + std::to_string(file.lambdas.size()) +
           ", restarts=" + std::to_string(request.optimizer.restarts) + ")");
  const auto start = std::chrono::steady_clock::now();
  const blockeig::PerturbationResult result = blockeig::solve(request);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  const std::string prefix =
      output_prefix.empty() ? strip_extension(config_path) : output_prefix;
  const blockeig::ReportPaths paths = blockeig::write_report(prefix, result);

  log_info("alpha_star = " + std::to_string(result.alpha_star) +
           ", achieved |Delta| = " + std::to_string(result.achieved_norm) +
           ", solved in " + std::to_string(elapsed) + " s");
  for (const std::string& warning : result.warnings) {
    log_info("warning: " + warning);
  }
  log_debug("report written to " + paths.report);
  for (const auto& [evals, best] : result.trace) {
    log_debug("  trace: evals=" + std::to_string(evals) +
              " best=" + std::to_string(best));
  }

  const bool certified = result.certificate.certified(result.achieved_norm);
  std::cout << paths.report << '\n';
  return certified ? 0 : 2;
}

int run_sweep(const std::string& config_path, const std::string& direction_spec,
              const std::string& range_spec, const std::string& base_spec,
              const std::string& output_path) {
  const blockeig::ProblemFile file = blockeig::parse_problem_file(config_path);
  const blockeig::ProblemInstance instance = blockeig::load_instance(file);
  blockeig::validate(instance);
  const blockeig::SouthEastForm se = blockeig::to_southeast(instance);
  const auto k = static_cast<blockeig::Index>(instance.lambdas.size());
  if (k < 2) {
    throw blockeig::ValidationError("sweep", "k must be at least 2 (no gamma space)");
  }

  const blockeig::GammaPoint direction = parse_gamma_spec(direction_spec, k);
  const blockeig::GammaPoint base = base_spec.empty()
                                        ? blockeig::GammaPoint::zero(k)
                                        : parse_gamma_spec(base_spec, k);
  const RangeSpec range = parse_range(range_spec);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(range.steps));
  for (long s = 0; s < range.steps; ++s) {
    grid.push_back(range.steps == 1
                       ? range.lo
                       : range.lo + (range.hi - range.lo) *
                                        static_cast<double>(s) /
                                        static_cast<double>(range.steps - 1));
  }
  const auto slice = blockeig::sweep_slice(se, instance.lambdas, base, direction, grid);
  const std::string csv = blockeig::sweep_to_csv(slice);
  if (output_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(output_path, std::ios::trunc);
    if (!out) {
      throw blockeig::ValidationError("output", "cannot open '" + output_path + "'");
    }
    out << csv;
    log_info("sweep written to " + output_path);
  }
  return 0;
}

int run_verify(const std::string& matrix_path, const std::string& lambdas_spec) {
  const blockeig::CMatrix m = blockeig::read_matrix_text(matrix_path);
  if (m.rows() != m.cols()) {
    throw blockeig::ValidationError("matrix", "must be square");
  }
  const std::vector<blockeig::Complex> lambdas =
      blockeig::parse_complex_list(lambdas_spec);
  const std::vector<double> residuals = blockeig::verify_membership(m, lambdas);
  bool ok = true;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    std::cout << blockeig::format_complex(lambdas[i]) << " residual "
              << residuals[i] << '\n';
    ok = ok && residuals[i] <= 1e-6;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal spectral-norm perturbation of one diagonal block so "
               "that prescribed eigenvalues appear in the spectrum"};
  app.require_subcommand(1);

  std::string solve_config;
  std::string solve_prefix;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run a solve from a JSON config");
  solve_cmd->add_option("config", solve_config, "problem config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--output-prefix", solve_prefix,
                        "prefix for report/matrix outputs (default: config stem)");

  std::string sweep_config, sweep_direction, sweep_range, sweep_base, sweep_output;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "emit s_kappa along a gamma ray as CSV");
  sweep_cmd->add_option("config", sweep_config, "problem config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--direction", sweep_direction,
                        "comma-separated complex entries, packed (1,2),(1,3),...")
      ->required();
  sweep_cmd->add_option("--range", sweep_range, "a:b:n grid of ray parameters")
      ->required();
  sweep_cmd->add_option("--base", sweep_base, "ray base point (default: origin)");
  sweep_cmd->add_option("--output", sweep_output, "CSV path (default: stdout)");

  std::string verify_matrix, verify_lambdas;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check eigenvalue membership residuals");
  verify_cmd->add_option("matrix", verify_matrix, "matrix text file")
      ->required()
      ->check(CLI::ExistingFile);
  verify_cmd->add_option("--lambdas", verify_lambdas, "comma-separated eigenvalues")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(solve_config, solve_prefix);
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_config, sweep_direction, sweep_range, sweep_base,
                       sweep_output);
    }
    if (verify_cmd->parsed()) return run_verify(verify_matrix, verify_lambdas);
  } catch (const blockeig::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
