#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "expfam/error.hpp"
#include "expfam/family_catalog.hpp"
#include "expfam/maxent_engine.hpp"
#include "expfam/numeric/newton.hpp"

namespace expfam::cli {

using Json = nlohmann::ordered_json;

// Process exit codes; each outcome class maps to exactly one.
enum ExitCode : int {
  kOk = 0,
  kMalformed = 1,
  kDomain = 2,
  kInfeasible = 3,
  kNotConverged = 4,
  kInvariant = 5,
};

int exit_code_for(ErrorKind kind);

/// Input that cannot be parsed. The message names the offending field.
class MalformedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "k=v,w,k2=v" -> {k: [v, w], k2: [v]}; a bare value appends to the previous key.
std::map<std::string, std::vector<double>> parse_assignments(std::string_view text, std::string_view flag);
std::vector<double> parse_number_list(std::string_view text, std::string_view flag);

/// 17 significant digits.
std::string format_double(double v);

/// Default tolerance with MAXENT_TOL (if set) as abs_tol.
numeric::Tolerance default_tolerance();

struct ProblemDocument {
  Json support;  // numbers or labels, echoed back verbatim
  MomentProblem problem;
  numeric::Tolerance tolerance;
};

ProblemDocument parse_problem(const Json& doc, const numeric::Tolerance& defaults);
Json solution_document(const ProblemDocument& doc, const MaxEntSolution& solution);
Json newton_report_json(const numeric::NewtonReport& report);

struct EvalArgs {
  std::string family;
  std::optional<std::string> standard;
  std::optional<std::string> canonical;
  std::string xs;
};

struct ConvertArgs {
  std::string family;
  std::optional<std::string> to_canonical;  // standard values to convert
  std::optional<std::string> to_standard;   // canonical values to convert
};

struct MaxentArgs {
  std::string problem_path;
  std::optional<std::string> output_path;
};

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 42;
  std::optional<int> trials;
};

int run_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int run_convert(const ConvertArgs& args, std::ostream& out, std::ostream& err);
int run_maxent(const MaxentArgs& args, std::ostream& out, std::ostream& err);
int run_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);
int run_table2(std::ostream& out, std::ostream& err);

/// Runs a command body, translating failures into a diagnostic and an exit code.
template <class Body>
int guarded(std::ostream& out, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const MalformedInput& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kMalformed;
  } catch (const Json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kMalformed;
  } catch (const NotConvergedError& e) {
    err << "error: " << e.what() << "\n";
    out << Json{{"error", "NotConverged"}, {"report", newton_report_json(e.report())}}.dump(2) << "\n";
    return kNotConverged;
  } catch (const InvariantViolation& e) {
    err << "error: " << e.what() << "\n";
    out << Json{{"error", "InvariantViolation"},
                {"relation", e.relation()},
                {"witness", e.witness()},
                {"message", e.what()}}
               .dump(2)
        << "\n";
    return kInvariant;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace expfam::cli
