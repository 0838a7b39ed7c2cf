#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsc/error.hpp"
#include "rsc/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radial sigma_2 hypersurfaces in Minkowski space"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  for (const char* name : {"solve", "classify", "barriers", "verify", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rsc::kExitConfig;
  }

  try {
    const rsc::Command command = rsc::parse_command(app.get_subcommands().front()->get_name());
    const rsc::RunConfig config = rsc::load_config(config_path, command);
    const int status = rsc::run(config, out_dir);
    if (status != rsc::kExitOk) std::cerr << "exit " << status << ", see " << out_dir << "/report.json\n";
    return status;
  } catch (const rsc::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == rsc::Errc::config_error ? rsc::kExitConfig : rsc::kExitSolver;
  }
}
