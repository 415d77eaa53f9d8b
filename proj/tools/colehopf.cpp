// colehopf: simulate, transform, classify and verify coupled NLS systems.
//
//   colehopf [--output-dir DIR] [--tolerance T] [--dump-config] <command> ...
//
// Exit codes: 0 ok, 1 configuration or usage error, 2 runtime failure
// (blow-up, tolerance or order shortfall), 3 non-periodic gauge ramp.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "colehopf/commands.hpp"

namespace {

struct Globals {
  std::optional<std::string> output_dir;
  std::optional<double> tolerance;
  bool dump_config = false;
};

void adjust(const Globals& g, colehopf::RunConfig& c) {
  if (g.output_dir) c.output_dir = *g.output_dir;
  if (g.tolerance) {
    if (!(*g.tolerance > 0.0)) throw colehopf::Error(colehopf::ErrorKind::Config, "--tolerance must be positive");
    c.tolerance = *g.tolerance;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled NLS systems with complex nonlinearities and their Cole-Hopf gauge images"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--output-dir", g.output_dir, "Override the config's output_dir");
  app.add_option("--tolerance", g.tolerance, "Override the verify tolerance (classify: label tolerance)");
  app.add_flag("--dump-config", g.dump_config, "Print the effective config as JSON and exit");

  std::string config_path;
  auto add_config_cmd = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "JSON run configuration")->required();
    return sub;
  };
  auto* simulate = add_config_cmd("simulate", "Evolve the psi-system; write diagnostics.csv and snapshots");
  auto* transform = add_config_cmd("transform", "Write transformed coefficients and the gauge image of psi_0");
  auto* verify = add_config_cmd("verify", "Evolve psi and phi side by side; write equivalence.csv");
  auto* convergence = add_config_cmd("convergence", "dt self-convergence study; write convergence.csv");
  std::string sweep_arg;
  verify->add_option("--sweep", sweep_arg, "key=v1,v2,...: repeat verify over one numeric config key");

  auto* classify = app.add_subcommand("classify", "Name the single-species derivative equation");
  std::string beta, gamma, delta, lambda;
  classify->add_option("--beta", beta)->required();
  classify->add_option("--gamma", gamma)->required();
  classify->add_option("--delta", delta)->required();
  classify->add_option("--lambda", lambda)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (classify->parsed())
      return colehopf::cmd_classify(beta, gamma, delta, lambda,
                                    g.tolerance.value_or(colehopf::kDefaultClassifyTolerance));

    const auto doc = colehopf::read_json_file(config_path);
    auto cfg = colehopf::parse_config(doc);
    adjust(g, cfg);
    if (g.dump_config) {
      std::cout << colehopf::dump_config(cfg);
      return 0;
    }
    if (simulate->parsed()) return colehopf::cmd_simulate(cfg);
    if (transform->parsed()) return colehopf::cmd_transform(cfg);
    if (convergence->parsed()) return colehopf::cmd_convergence(cfg);
    if (verify->parsed()) {
      if (!sweep_arg.empty())
        return colehopf::cmd_verify_sweep(doc, sweep_arg, [&](colehopf::RunConfig& c) { adjust(g, c); });
      return colehopf::cmd_verify(cfg);
    }
  } catch (const colehopf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return colehopf::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
