#include "blockeig/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace blockeig {
namespace {

using nlohmann::json;

double parse_real_strict(const std::string& text, const std::string& what) {
  if (text.empty()) {
    throw ValidationError(what, "empty numeric literal");
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError(what, "not a number: '" + text + "'");
  }
  if (used != text.size()) {
    throw ValidationError(what, "trailing characters in '" + text + "'");
  }
  return value;
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("output", "cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) throw ValidationError("output", "write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ValidationError("output", "cannot move '" + tmp + "' to '" + path + "'");
  }
}

json gamma_to_json(const GammaPoint& g) {
  json arr = json::array();
  for (Index i = 0; i < g.k(); ++i) {
    for (Index j = i + 1; j < g.k(); ++j) {
      const Complex value = g(i, j);
      arr.push_back({{"i", i + 1},
                     {"j", j + 1},
                     {"re", value.real()},
                     {"im", value.imag()}});
    }
  }
  return arr;
}

}  // namespace

Complex parse_complex(const std::string& text) {
  if (text.empty()) throw ValidationError("complex", "empty literal");
  if (text.back() != 'i') {
    return Complex(parse_real_strict(text, "complex"), 0.0);
  }
  // re(+|-)im i: the separator is the last sign not opening the string and
  // not part of an exponent.
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    const char c = body[p];
    if ((c == '+' || c == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) {
    throw ValidationError("complex",
                          "expected re+imi or re-imi, got '" + text + "'");
  }
  const double re = parse_real_strict(body.substr(0, split), "complex");
  const std::string im_text = body.substr(split);  // keeps the sign
  if (im_text.size() < 2) {
    throw ValidationError("complex", "missing imaginary part in '" + text + "'");
  }
  const double im = parse_real_strict(im_text, "complex");
  return Complex(re, im);
}

std::string format_complex(const Complex& z) {
  if (z.imag() == 0.0) return format_real(z.real());
  std::string out = format_real(z.real());
  out += (z.imag() < 0.0) ? '-' : '+';
  out += format_real(std::abs(z.imag()));
  out += 'i';
  return out;
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // trim surrounding whitespace
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) {
      throw ValidationError("complex", "empty item in list '" + text + "'");
    }
    out.push_back(parse_complex(item.substr(begin, end - begin + 1)));
  }
  if (out.empty()) throw ValidationError("complex", "empty list");
  return out;
}

CMatrix read_matrix_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("matrix", "cannot open '" + path + "'");
  std::string line;
  long line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  auto where = [&](const std::string& msg) {
    return ValidationError("matrix", path + ":" + std::to_string(line_no) + ": " + msg);
  };

  if (!next_line()) throw where("missing header line 'rows cols'");
  Index rows = 0, cols = 0;
  {
    std::istringstream hdr(line);
    std::string extra;
    if (!(hdr >> rows >> cols) || (hdr >> extra)) {
      throw where("header must be exactly 'rows cols'");
    }
  }
  if (rows < 1 || cols < 1) throw where("dimensions must be positive");

  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!next_line()) {
      throw where("expected " + std::to_string(rows) + " rows, file ended at row " +
                  std::to_string(r));
    }
    std::istringstream row(line);
    std::string tok;
    for (Index c = 0; c < cols; ++c) {
      if (!(row >> tok)) {
        throw where("row " + std::to_string(r + 1) + " has fewer than " +
                    std::to_string(cols) + " entries");
      }
      try {
        m(r, c) = parse_complex(tok);
      } catch (const ValidationError& e) {
        throw where("row " + std::to_string(r + 1) + ", column " +
                    std::to_string(c + 1) + ": " + e.what());
      }
    }
    std::string extra;
    if (row >> extra) {
      throw where("row " + std::to_string(r + 1) + " has more than " +
                  std::to_string(cols) + " entries");
    }
  }
  if (!is_finite(m)) {
    throw ValidationError("matrix", path + ": non-finite entries");
  }
  return m;
}

void write_matrix_text(const std::string& path, const CMatrix& m) {
  std::ostringstream out;
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_complex(m(r, c));
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

ProblemFile parse_problem_file(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw ValidationError("config", "cannot open '" + json_path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", json_path + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config", "top level must be an object");

  static const std::vector<std::string> known_keys = {
      "matrix", "block_sizes", "target_block", "lambdas", "optimizer"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end()) {
      throw ValidationError("config", "unknown key '" + key + "'");
    }
  }
  for (const char* required : {"matrix", "block_sizes", "target_block", "lambdas"}) {
    if (!doc.contains(required)) {
      throw ValidationError("config", std::string("missing key '") + required + "'");
    }
  }

  ProblemFile file;
  if (!doc["matrix"].is_string()) {
    throw ValidationError("matrix", "must be a path string");
  }
  const std::filesystem::path cfg_dir =
      std::filesystem::path(json_path).parent_path();
  file.matrix_path = (cfg_dir / doc["matrix"].get<std::string>()).string();

  if (!doc["block_sizes"].is_array() || doc["block_sizes"].empty()) {
    throw ValidationError("block_sizes", "must be a nonempty array of sizes");
  }
  for (const auto& v : doc["block_sizes"]) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw ValidationError("block_sizes", "entries must be positive integers");
    }
    file.block_sizes.push_back(static_cast<Index>(v.get<long long>()));
  }

  if (!doc["target_block"].is_number_integer()) {
    throw ValidationError("target_block", "must be a 1-based block index");
  }
  file.target_block = static_cast<Index>(doc["target_block"].get<long long>());

  if (!doc["lambdas"].is_array() || doc["lambdas"].empty()) {
    throw ValidationError("lambdas", "must be a nonempty array of complex strings");
  }
  for (const auto& v : doc["lambdas"]) {
    if (!v.is_string()) {
      throw ValidationError("lambdas", "entries must be strings like '2-1i'");
    }
    try {
      file.lambdas.push_back(parse_complex(v.get<std::string>()));
    } catch (const ValidationError& e) {
      throw ValidationError("lambdas", std::string(e.what()));
    }
  }

  if (doc.contains("optimizer")) {
    const json& opt = doc["optimizer"];
    if (!opt.is_object()) throw ValidationError("optimizer", "must be an object");
    static const std::vector<std::string> opt_keys = {
        "seed", "restarts", "xtol", "ftol", "max_iters", "init_radius"};
    for (const auto& [key, _] : opt.items()) {
      if (std::find(opt_keys.begin(), opt_keys.end(), key) == opt_keys.end()) {
        throw ValidationError("optimizer", "unknown key '" + key + "'");
      }
    }
    auto get_number = [&](const char* key, double fallback) {
      if (!opt.contains(key)) return fallback;
      if (!opt[key].is_number()) {
        throw ValidationError(std::string("optimizer.") + key, "must be a number");
      }
      return opt[key].get<double>();
    };
    if (opt.contains("seed")) {
      if (!opt["seed"].is_number_integer() || opt["seed"].get<long long>() < 0) {
        throw ValidationError("optimizer.seed", "must be a nonnegative integer");
      }
      file.optimizer.seed = static_cast<std::uint64_t>(opt["seed"].get<long long>());
    }
    if (opt.contains("restarts")) {
      if (!opt["restarts"].is_number_integer() || opt["restarts"].get<int>() < 1) {
        throw ValidationError("optimizer.restarts", "must be a positive integer");
      }
      file.optimizer.restarts = opt["restarts"].get<int>();
    }
    file.optimizer.xtol = get_number("xtol", file.optimizer.xtol);
    file.optimizer.ftol = get_number("ftol", file.optimizer.ftol);
    if (opt.contains("max_iters")) {
      if (!opt["max_iters"].is_number_integer() ||
          opt["max_iters"].get<long long>() < 0) {
        throw ValidationError("optimizer.max_iters", "must be a nonnegative integer");
      }
      file.optimizer.max_iters = static_cast<Index>(opt["max_iters"].get<long long>());
    }
    file.optimizer.init_radius = get_number("init_radius", file.optimizer.init_radius);
    if (file.optimizer.xtol <= 0 || file.optimizer.ftol <= 0 ||
        file.optimizer.init_radius <= 0) {
      throw ValidationError("optimizer", "tolerances and init_radius must be positive");
    }
  }
  return file;
}

ProblemInstance load_instance(const ProblemFile& file) {
  ProblemInstance inst;
  inst.K = read_matrix_text(file.matrix_path);
  inst.block_sizes = file.block_sizes;
  if (file.target_block < 1 ||
      file.target_block > static_cast<Index>(file.block_sizes.size())) {
    throw ValidationError("target_block", "must be between 1 and the block count");
  }
  inst.target_block = file.target_block - 1;
  inst.lambdas = file.lambdas;
  return inst;
}

std::string report_to_json(const PerturbationResult& result, const ReportPaths* paths) {
  const SolveCertificate& cert = result.certificate;
  json doc;
  doc["alpha_star"] = cert.alpha_star;
  doc["gamma_star"] = gamma_to_json(cert.gamma_star);
  doc["gram_residual"] = cert.gram_residual;
  doc["membership_residuals"] = cert.membership_residuals;
  doc["we_residual"] = cert.we_residual;
  doc["stationarity"] = cert.stationarity;
  json samples = json::array();
  for (const GammaSample& s : cert.lower_bound_samples) {
    samples.push_back({{"gamma", gamma_to_json(s.gamma)}, {"s_kappa", s.s_kappa}});
  }
  doc["lower_bound_samples"] = std::move(samples);
  doc["simple"] = cert.simple;
  doc["converged"] = cert.converged;
  doc["rank_ok"] = cert.rank_ok;
  doc["zero_perturbation"] = cert.zero_perturbation;
  doc["achieved_norm"] = result.achieved_norm;
  doc["certified"] = cert.certified(result.achieved_norm);
  doc["simplicity_gap"] =
      std::isfinite(result.simplicity_gap) ? result.simplicity_gap : 1.0;
  doc["restarts_used"] = result.restarts_used;
  json trace = json::array();
  for (const auto& [evals, best] : result.trace) {
    trace.push_back({{"evaluations", evals}, {"best", best}});
  }
  doc["trace"] = std::move(trace);
  doc["warnings"] = result.warnings;
  if (paths != nullptr) {
    doc["delta_file"] = paths->delta;
    doc["x_star_file"] = paths->x_star;
    doc["k_perturbed_file"] = paths->k_perturbed;
  }
  return doc.dump(2) + "\n";
}

ReportPaths write_report(const std::string& prefix, const PerturbationResult& result) {
  ReportPaths paths;
  paths.report = prefix + ".report.json";
  paths.delta = prefix + ".delta.txt";
  paths.x_star = prefix + ".xstar.txt";
  paths.k_perturbed = prefix + ".kperturbed.txt";
  write_matrix_text(paths.delta, result.delta);
  write_matrix_text(paths.x_star, result.X_star);
  write_matrix_text(paths.k_perturbed, result.K_perturbed);
  write_file_atomic(paths.report, report_to_json(result, &paths));
  return paths;
}

std::string sweep_to_csv(const std::vector<std::pair<double, double>>& slice) {
  std::ostringstream out;
  out << "t,s_kappa\n";
  for (const auto& [t, value] : slice) {
    out << format_real(t) << ',' << format_real(value) << '\n';
  }
  return out.str();
}

}  // namespace blockeig
