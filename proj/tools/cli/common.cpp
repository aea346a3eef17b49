#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "cli.hpp"

namespace expfam::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch:
    case ErrorKind::EmptyInput:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::SupportMismatch:
      return kMalformed;
    case ErrorKind::Infeasible:
      return kInfeasible;
    case ErrorKind::NotConverged:
    case ErrorKind::SingularHessian:
    case ErrorKind::QuadratureFailure:
      return kNotConverged;
    case ErrorKind::InvariantViolation:
      return kInvariant;
    default:
      return kDomain;
  }
}

namespace {

double parse_number(std::string_view token, std::string_view flag) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw MalformedInput(fmt::format("{}: '{}' is not a finite number", flag, token));
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

std::map<std::string, std::vector<double>> parse_assignments(std::string_view text, std::string_view flag) {
  std::map<std::string, std::vector<double>> out;
  std::string current;
  for (std::string_view part : split(text, ',')) {
    part = trim(part);
    const std::size_t eq = part.find('=');
    if (eq != std::string_view::npos) {
      current = std::string(trim(part.substr(0, eq)));
      if (current.empty()) throw MalformedInput(fmt::format("{}: empty parameter name in '{}'", flag, text));
      if (out.count(current)) throw MalformedInput(fmt::format("{}: parameter '{}' given twice", flag, current));
      out[current].push_back(parse_number(trim(part.substr(eq + 1)), flag));
    } else {
      if (current.empty()) throw MalformedInput(fmt::format("{}: expected name=value, got '{}'", flag, part));
      out[current].push_back(parse_number(part, flag));
    }
  }
  return out;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view flag) {
  std::vector<double> out;
  for (std::string_view part : split(text, ',')) out.push_back(parse_number(trim(part), flag));
  return out;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

numeric::Tolerance default_tolerance() {
  numeric::Tolerance tol;
  if (const char* env = std::getenv("MAXENT_TOL")) {
    const std::string_view text(env);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !(value > 0.0) || !std::isfinite(value))
      throw MalformedInput(fmt::format("MAXENT_TOL: '{}' is not a positive number", text));
    tol.abs_tol = value;
  }
  return tol;
}

namespace {

const Json& require_field(const Json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw MalformedInput(fmt::format("{}: missing required field", name));
  return *it;
}

double as_number(const Json& value, const std::string& where) {
  if (!value.is_number()) throw MalformedInput(fmt::format("{}: expected a number, got {}", where, value.dump()));
  return value.get<double>();
}

std::vector<double> as_number_array(const Json& value, const std::string& where) {
  if (!value.is_array()) throw MalformedInput(fmt::format("{}: expected an array of numbers", where));
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(as_number(value[i], fmt::format("{}[{}]", where, i)));
  return out;
}

}  // namespace

ProblemDocument parse_problem(const Json& doc, const numeric::Tolerance& defaults) {
  if (!doc.is_object()) throw MalformedInput("document: expected a JSON object");

  const Json& version = require_field(doc, "schema_version");
  if (!version.is_number_integer() || version.get<long>() != 1)
    throw MalformedInput(fmt::format("schema_version: unsupported value {} (expected 1)", version.dump()));

  const Json& support = require_field(doc, "support");
  if (!support.is_array() || support.size() < 2)
    throw MalformedInput("support: expected an array with at least two entries");
  const bool labels = support[0].is_string();
  std::vector<double> points;
  std::set<std::string> seen_labels;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const Json& entry = support[i];
    if (labels) {
      if (!entry.is_string()) throw MalformedInput(fmt::format("support[{}]: mixes labels and numbers", i));
      if (!seen_labels.insert(entry.get<std::string>()).second)
        throw MalformedInput(fmt::format("support[{}]: duplicate label {}", i, entry.dump()));
      points.push_back(static_cast<double>(i));
    } else {
      points.push_back(as_number(entry, fmt::format("support[{}]", i)));
    }
  }
  const std::size_t k = points.size();

  Eigen::VectorXd log_w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  if (auto it = doc.find("log_base_weights"); it != doc.end()) {
    const std::vector<double> w = as_number_array(*it, "log_base_weights");
    if (w.size() != k)
      throw MalformedInput(fmt::format("log_base_weights: has {} entries, support has {}", w.size(), k));
    for (std::size_t i = 0; i < k; ++i) log_w(static_cast<Eigen::Index>(i)) = w[i];
  }

  const Json& stats = require_field(doc, "stats");
  if (!stats.is_array() || stats.size() != k)
    throw MalformedInput(fmt::format("stats: expected {} rows, one per support entry", k));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < k; ++i) {
    const std::string where = fmt::format("stats[{}]", i);
    rows.push_back(stats[i].is_number() ? std::vector<double>{as_number(stats[i], where)}
                                        : as_number_array(stats[i], where));
    if (rows.back().empty() || rows.back().size() != rows.front().size())
      throw MalformedInput(fmt::format("{}: row length differs from stats[0]", where));
  }
  const std::size_t d = rows.front().size();
  if (d + 1 > k) throw MalformedInput(fmt::format("stats: {} statistics need more than {} support points", d, k));
  Eigen::MatrixXd stat_matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) stat_matrix(i, j) = rows[i][j];

  const std::vector<double> target = as_number_array(require_field(doc, "target_moments"), "target_moments");
  if (target.size() != d)
    throw MalformedInput(fmt::format("target_moments: has {} entries, stats rows have {}", target.size(), d));

  numeric::Tolerance tol = defaults;
  if (auto it = doc.find("tolerances"); it != doc.end()) {
    if (!it->is_object()) throw MalformedInput("tolerances: expected an object");
    for (const auto& [key, value] : it->items()) {
      if (key == "abs_tol") {
        tol.abs_tol = as_number(value, "tolerances.abs_tol");
      } else if (key == "rel_tol") {
        tol.rel_tol = as_number(value, "tolerances.rel_tol");
      } else if (key == "max_iter") {
        if (!value.is_number_integer()) throw MalformedInput("tolerances.max_iter: expected an integer");
        tol.max_iter = value.get<int>();
      } else {
        throw MalformedInput(fmt::format("tolerances.{}: unknown setting", key));
      }
    }
    try {
      tol.validate();
    } catch (const Error& e) {
      throw MalformedInput(std::string("tolerances: ") + e.what());
    }
  }

  return {support,
          MomentProblem(std::move(points), std::move(log_w), std::move(stat_matrix),
                        Eigen::Map<const Eigen::VectorXd>(target.data(), static_cast<Eigen::Index>(d))),
          tol};
}

namespace {

template <class Vec>
Json to_array(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.size()); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

Json newton_report_json(const numeric::NewtonReport& report) {
  Json out;
  out["iterations"] = report.iterations;
  out["grad_norm"] = report.final_grad_norm;
  out["dual_value"] = report.final_value;
  out["converged"] = report.converged;
  out["eta"] = to_array(report.solution);
  return out;
}

Json solution_document(const ProblemDocument& doc, const MaxEntSolution& solution) {
  const MomentProblem& problem = doc.problem;
  const Eigen::VectorXd achieved = moments(problem, solution.dist);
  const FiniteDistribution base = normalized_base(problem);
  Json out;
  out["schema_version"] = 1;
  out["eta"] = to_array(solution.eta);
  out["support"] = doc.support;
  out["probabilities"] = to_array(solution.dist.probs());
  out["dual_value"] = solution.dual_value;
  out["target_moments"] = to_array(problem.target());
  out["achieved_moments"] = to_array(achieved);
  out["moment_tolerance"] = moment_tolerance(doc.tolerance);
  out["entropy_nats"] = entropy(solution.dist);
  out["g_vs_base_nats"] = relative_entropy_g(solution.dist, base);
  out["solver"] = {{"iterations", solution.report.iterations},
                   {"grad_norm", solution.report.final_grad_norm},
                   {"converged", solution.report.converged}};
  return out;
}

}  // namespace expfam::cli
