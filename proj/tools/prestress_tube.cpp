// prestress_tube: load-free, stress-free and opening-angle workflows for
// pre-stressed layered tubes, plus a viscoelastic material-point driver.

#include <prestress/commands.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Pre-stressed layered tube workflows"};
  app.set_version_flag("--version", prestress::tool_version);
  app.require_subcommand(1, 1);

  prestress::CommandOptions opts;
  std::string config, out;
  double grid_start = 0.0, grid_end = 0.0, grid_step = 0.0, dt = 0.0, tol = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "CSV output path")->required();
  };
  auto* inverse = app.add_subcommand("inverse-sf", "stress-free sectors of a load-free tube with known opening angle");
  add_common(inverse);
  inverse->add_option("--tol", tol, "Newton tolerance on the scaled residual");
  auto* load_free = app.add_subcommand("load-free", "load-free tube assembled from stress-free sectors");
  add_common(load_free);
  load_free->add_option("--tol", tol, "Newton tolerance on the scaled residual");
  auto* scan = app.add_subcommand("energy-scan", "stored energy versus trial opening angle");
  add_common(scan);
  scan->add_option("--grid-start", grid_start, "first trial angle, degrees");
  scan->add_option("--grid-end", grid_end, "last trial angle, degrees");
  scan->add_option("--grid-step", grid_step, "grid step, degrees");
  scan->add_option("--tol", tol, "gradient tolerance of the inner minimization, uJ/mm");
  auto* point = app.add_subcommand("point-test", "viscoelastic material point under a prescribed F history");
  add_common(point);
  point->add_option("--dt", dt, "time step, s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : prestress::exit_invalid_input;
  }

  CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
  opts.config = config;
  opts.out = out;
  if (given("--grid-start")) opts.grid_start_deg = grid_start;
  if (given("--grid-end")) opts.grid_end_deg = grid_end;
  if (given("--grid-step")) opts.grid_step_deg = grid_step;
  if (given("--dt")) opts.dt_s = dt;
  if (given("--tol")) opts.tol = tol;

  const prestress::Workflow w = prestress::parse_workflow(sub->get_name());
  const prestress::CommandResult res = prestress::run_workflow(w, opts);
  std::cout << res.summary.dump(2) << "\n";
  if (res.summary.contains("error")) std::cerr << "error: " << res.summary["error"]["message"].get<std::string>() << "\n";
  return res.exit_code;
}
