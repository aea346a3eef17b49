#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cli.hpp"
#include "expfam/numeric/finite_difference.hpp"
#include "expfam/numeric/partition.hpp"
#include "expfam/reference_grid.hpp"

namespace expfam::cli {

namespace {

using Assignments = std::map<std::string, std::vector<double>>;

double take_scalar(Assignments& values, const std::string& key, std::string_view flag) {
  auto it = values.find(key);
  if (it == values.end()) throw MalformedInput(fmt::format("{}: missing parameter '{}'", flag, key));
  if (it->second.size() != 1) throw MalformedInput(fmt::format("{}: parameter '{}' takes one value", flag, key));
  const double v = it->second.front();
  values.erase(it);
  return v;
}

void reject_leftovers(const Assignments& values, std::string_view flag) {
  if (!values.empty()) throw MalformedInput(fmt::format("{}: unknown parameter '{}'", flag, values.begin()->first));
}

ClosedFormFamily make_family(const std::string& name, Assignments& values, std::string_view flag) {
  if (name != "binomial") return ClosedFormFamily::from_name(name);
  const double n = take_scalar(values, "n", flag);
  if (n != std::floor(n) || n > 1e9) throw MalformedInput(fmt::format("{}: n must be an integer", flag));
  return ClosedFormFamily::binomial(static_cast<int>(n));
}

StandardParams standard_from(const ClosedFormFamily& family, Assignments& values, std::string_view flag) {
  switch (family.kind()) {
    case FamilyKind::Binomial: return BinomialParams{take_scalar(values, "theta", flag)};
    case FamilyKind::Poisson: return PoissonParams{take_scalar(values, "lambda", flag)};
    case FamilyKind::Normal: {
      const double mu = take_scalar(values, "mu", flag);
      return NormalParams{mu, take_scalar(values, "sigma2", flag)};
    }
    case FamilyKind::Gamma:
    case FamilyKind::SqrtGamma: {
      const double alpha = take_scalar(values, "alpha", flag);
      return ShapeScaleParams{alpha, take_scalar(values, "theta", flag)};
    }
  }
  throw Error(ErrorKind::Unsupported, "unknown family");
}

// Accepts eta=v[,w] or eta1=v,eta2=w.
CanonicalParams canonical_from(const ClosedFormFamily& family, Assignments& values, std::string_view flag) {
  std::vector<double> eta;
  if (auto it = values.find("eta"); it != values.end()) {
    eta = it->second;
    values.erase(it);
  } else {
    for (int j = 1; j <= family.dimension(); ++j) eta.push_back(take_scalar(values, fmt::format("eta{}", j), flag));
  }
  if (static_cast<int>(eta.size()) != family.dimension())
    throw MalformedInput(fmt::format("{}: {} expects {} canonical value(s), got {}", flag, family.name(),
                                     family.dimension(), eta.size()));
  CanonicalParams p;
  p.eta = Eigen::Map<const Eigen::VectorXd>(eta.data(), static_cast<Eigen::Index>(eta.size()));
  return p;
}

Json standard_json(const ClosedFormFamily& family, const StandardParams& params) {
  Json out;
  if (family.kind() == FamilyKind::Binomial) out["n"] = family.trials();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BinomialParams>) {
          out["theta"] = p.theta;
        } else if constexpr (std::is_same_v<T, PoissonParams>) {
          out["lambda"] = p.lambda;
        } else if constexpr (std::is_same_v<T, NormalParams>) {
          out["mu"] = p.mean;
          out["sigma2"] = p.variance;
        } else {
          out["alpha"] = p.shape;
          out["theta"] = p.scale;
        }
      },
      params);
  return out;
}

template <class Vec>
std::string join(const Vec& v, const char* sep) {
  std::string s;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.size()); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

Json vector_json(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace

int run_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    if (args.standard.has_value() == args.canonical.has_value())
      throw MalformedInput("eval: give exactly one of --std or --canonical");
    const std::string flag = args.standard ? "--std" : "--canonical";
    Assignments values = parse_assignments(args.standard ? *args.standard : *args.canonical, flag);
    const ClosedFormFamily family = make_family(args.family, values, flag);
    const CanonicalParams eta = args.standard ? to_canonical(family, standard_from(family, values, flag))
                                              : canonical_from(family, values, flag);
    reject_leftovers(values, flag);
    require_canonical(family, eta);
    const std::vector<double> xs = parse_number_list(args.xs, "--x");
    for (double x : xs) require_support(family, x);

    std::ostringstream body;
    body << "# family: " << family.name() << "\n";
    body << "# eta: " << join(eta.eta, ",") << "\n";
    body << "# a: " << format_double(log_partition(family, eta)) << "\n";
    body << "# mu_t: " << join(mean_stats(family, eta).mu, ",") << "\n";
    body << "# var_diag: " << join(Eigen::VectorXd(var_stats(family, eta).diagonal()), ",") << "\n";
    body << "x,log_pdmf,pdmf\n";
    for (double x : xs)
      body << format_double(x) << "," << format_double(log_pdmf(family, eta, x)) << ","
           << format_double(pdmf(family, eta, x)) << "\n";
    out << body.str();
    return static_cast<int>(kOk);
  });
}

int run_convert(const ConvertArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    if (args.to_canonical.has_value() == args.to_standard.has_value())
      throw MalformedInput("convert: give exactly one of --to-canonical or --to-standard");
    const std::string flag = args.to_canonical ? "--to-canonical" : "--to-standard";
    Assignments values = parse_assignments(args.to_canonical ? *args.to_canonical : *args.to_standard, flag);
    const ClosedFormFamily family = make_family(args.family, values, flag);
    CanonicalParams eta;
    StandardParams standard;
    if (args.to_canonical) {
      standard = standard_from(family, values, flag);
      reject_leftovers(values, flag);
      eta = to_canonical(family, standard);
    } else {
      eta = canonical_from(family, values, flag);
      reject_leftovers(values, flag);
      standard = to_standard(family, eta);
    }
    Json doc;
    doc["family"] = std::string(family.name());
    doc["standard"] = standard_json(family, standard);
    doc["canonical"] = {{"eta", vector_json(eta.eta)}};
    doc["mean"] = vector_json(mean_stats(family, eta).mu);
    out << doc.dump(2) << "\n";
    return static_cast<int>(kOk);
  });
}

int run_table2(std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    std::ostringstream body;
    body << "family,params,eta,a_closed,a_numeric,a_abs_err,mu_closed,mu_fd,mu_rel_err\n";
    for (const ReferencePoint& point : table_reference_points()) {
      const ClosedFormFamily& family = point.family;
      const CanonicalParams eta = to_canonical(family, point.standard);
      const double a_closed = log_partition(family, eta);
      const double a_numeric = numeric::numeric_log_partition(family, eta);
      const Eigen::VectorXd mu = mean_stats(family, eta).mu;
      const Eigen::VectorXd fd =
          numeric::fd_gradient([&](const Eigen::VectorXd& e) { return log_partition(family, CanonicalParams{e}); },
                               eta.eta);
      double rel = 0.0;
      for (Eigen::Index j = 0; j < mu.size(); ++j)
        rel = std::max(rel, std::abs(fd(j) - mu(j)) / (mu(j) != 0.0 ? std::abs(mu(j)) : 1.0));
      body << family.name() << ",\"" << point.label << "\"," << join(eta.eta, ";") << "," << format_double(a_closed)
           << "," << format_double(a_numeric) << "," << format_double(std::abs(a_closed - a_numeric)) << ","
           << join(mu, ";") << "," << join(fd, ";") << "," << format_double(rel) << "\n";
    }
    out << body.str();
    return static_cast<int>(kOk);
  });
}

int run_maxent(const MaxentArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(out, err, [&] {
    std::ifstream in(args.problem_path);
    if (!in) throw MalformedInput(fmt::format("problem: cannot open '{}'", args.problem_path));
    Json raw;
    try {
      raw = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw MalformedInput(fmt::format("problem: invalid JSON ({})", e.what()));
    }
    const ProblemDocument doc = parse_problem(raw, default_tolerance());
    const MomentProblem& problem = doc.problem;

    const FeasibilityReport feasibility = check_feasibility(problem, doc.tolerance);
    if (!feasibility.feasible) {
      err << "error: Infeasible: target_moments must lie strictly inside the convex hull of the stats rows\n";
      err << "  margin to the hull boundary: " << format_double(feasibility.margin) << "\n";
      for (Eigen::Index j = 0; j < problem.dimension(); ++j)
        err << "  target_moments[" << j << "] = " << format_double(problem.target()(j)) << ", stats column range ["
            << format_double(problem.stats().col(j).minCoeff()) << ", "
            << format_double(problem.stats().col(j).maxCoeff()) << "]\n";
      return static_cast<int>(kInfeasible);
    }
    const MaxEntSolution solution = solve_dual(problem, doc.tolerance);
    const std::string text = solution_document(doc, solution).dump(2) + "\n";
    if (args.output_path) {
      std::ofstream file(*args.output_path);
      if (!file) throw Error(ErrorKind::DomainError, fmt::format("cannot write '{}'", *args.output_path));
      file << text;
    } else {
      out << text;
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace expfam::cli
