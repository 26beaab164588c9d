#include "app.hpp"

#include "CLI11.hpp"

#include "cloak/errors.hpp"
#include "commands.hpp"

namespace cloak::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal radial and conformal cloaks: profiles, checks and figures", "cloak"};
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "Flat `key = value` file; flags take precedence");

  RawOptions raw;
  app.add_option("--epsilon", raw.epsilon, "Inner radius of the source annulus, in (0, 1/2]");
  app.add_option("--p", raw.p, "Energy exponent (>= 1 or inf); repeatable or comma separated")
      ->delimiter(',');
  app.add_option("--nodes", raw.nodes, "Profile nodes (default 400)");
  app.add_option("--grid", raw.grid, "Polar grid NRxNP (default 64x128)");
  app.add_option("--tol", raw.tol, "Solver tolerance (default 1e-10)");
  app.add_option("--seed", raw.seed, "Random seed (default 42)");
  app.add_option("--out", raw.out, "Output directory (default .)");
  app.add_option("--format", raw.format, "Subset of csv,json,svg (default all)")->delimiter(',');
  app.add_option("--n-pert", raw.n_pert, "verify: perturbations per suite (default 20)");
  app.add_option("--amplitude", raw.amplitude, "verify: perturbation amplitude (default 0.1)");
  app.add_flag("--sabotage", raw.sabotage, "verify: bend the optimal profile first");
  app.add_option("--map", raw.map, "conformal: identity, sinh or power (default sinh)");
  app.add_option("--rays", raw.rays, "conformal: number of rays (default 19)");
  app.add_option("--points", raw.points, "conformal: samples per ray (default 40)");
  app.add_flag("--timestamp", raw.timestamp, "Record the wall-clock time in JSON envelopes");

  struct Sub {
    Command command;
    CLI::App* app;
  };
  const std::vector<Sub> subs = {
      {Command::solve, app.add_subcommand("solve", "Optimal profiles, energies and residuals")},
      {Command::figure_profiles,
       app.add_subcommand("figure-profiles", "Amplitude family figure (SVG + CSV)")},
      {Command::verify, app.add_subcommand("verify", "Optimality checks with a JSON report")},
      {Command::conformal, app.add_subcommand("conformal", "Conformally transferred cloak rays")},
  };
  for (const auto& s : subs) s.app->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  Command command = Command::solve;
  for (const auto& s : subs) {
    if (s.app->parsed()) command = s.command;
  }

  try {
    const RunConfig config = resolve(command, raw);
    CommandResult result;
    switch (command) {
      case Command::solve: result = cmd_solve(config, out); break;
      case Command::figure_profiles: result = cmd_figure_profiles(config, out); break;
      case Command::verify: result = cmd_verify(config, out); break;
      case Command::conformal: result = cmd_conformal(config, out); break;
    }
    if (result.exit_code == kExitVerification) err << "error: verification failed\n";
    return result.exit_code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cloak::cli
