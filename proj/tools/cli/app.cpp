#include <CLI11.hpp>

#include "cli.hpp"

namespace expfam::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential families, entropy and maximum-entropy solving", "expfam"};
  app.require_subcommand(1);
  const auto families = CLI::IsMember({"binomial", "poisson", "normal", "gamma", "sqrtgamma"});

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a catalog family at points x");
  eval_cmd->add_option("family", eval.family, "binomial | poisson | normal | gamma | sqrtgamma")
      ->required()
      ->check(families);
  auto* std_opt = eval_cmd->add_option("--std", eval.standard, "Standard parameters, e.g. lambda=2 or n=10,theta=0.3");
  auto* can_opt = eval_cmd->add_option("--canonical", eval.canonical, "Canonical parameters, e.g. eta1=0,eta2=-0.5");
  std_opt->excludes(can_opt);
  eval_cmd->add_option("--x", eval.xs, "Comma-separated evaluation points")->required();

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between standard and canonical parameters");
  convert_cmd->add_option("family", convert.family)->required()->check(families);
  auto* to_can = convert_cmd->add_option("--to-canonical", convert.to_canonical, "Standard values to convert");
  auto* to_std = convert_cmd->add_option("--to-standard", convert.to_standard, "Canonical values, e.g. eta=0,-0.5");
  to_can->excludes(to_std);

  MaxentArgs maxent;
  auto* maxent_cmd = app.add_subcommand("maxent", "Solve a maximum-entropy moment problem document");
  maxent_cmd->add_option("problem", maxent.problem_path, "Problem JSON file")->required();
  maxent_cmd->add_option("-o,--output", maxent.output_path, "Solution JSON file (default: stdout)");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run an invariant suite");
  verify_cmd->add_option("suite", verify.suite)
      ->required()
      ->check(CLI::IsMember({"prop1", "prop2", "concavity", "combinatorial", "table2", "transforms"}));
  verify_cmd->add_option("--seed", verify.seed, "Random seed")->capture_default_str();
  verify_cmd->add_option("--trials", verify.trials, "Random trials (default 1000)");

  auto* table2_cmd = app.add_subcommand("table2", "Closed forms vs numerics for the reference family members");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << (dynamic_cast<const CLI::CallForAllHelp*>(&e) ? app.help("", CLI::AppFormatMode::All) : app.help());
      if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
        out << sub->help();
      return kOk;
    }
    err << "error: malformed input: " << e.what() << "\n";
    return kMalformed;
  }

  if (eval_cmd->parsed()) return run_eval(eval, out, err);
  if (convert_cmd->parsed()) return run_convert(convert, out, err);
  if (maxent_cmd->parsed()) return run_maxent(maxent, out, err);
  if (verify_cmd->parsed()) return run_verify(verify, out, err);
  if (table2_cmd->parsed()) return run_table2(out, err);
  return kMalformed;
}

}  // namespace expfam::cli
