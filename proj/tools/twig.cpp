// twig: local modes, covariance and Wigner functions of a tiled Cauchy slab.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tw/app.hpp"
#include "tw/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"twig - local modes and Wigner functions of a free scalar field"};
  cli.set_version_flag("--version", TW_VERSION);

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string cache_dir;
  std::vector<std::string> sets;
  int threads = 0;
  bool numeric = false;

  cli.add_option("command", command, "Subcommand to run")
      ->required()
      ->check(CLI::IsMember(tw::command_names()));
  cli.add_option("-c,--config", config_path, "JSON run configuration");
  cli.add_option("-o,--out", out_dir, "Output directory (overrides output.dir)");
  cli.add_option("--cache-dir", cache_dir, "Cache directory (overrides cache_dir)");
  cli.add_option("-s,--set", sets, "Override a config key, e.g. quadrature.k_max=40");
  cli.add_option("-j,--threads", threads, "Worker threads (overrides threads)");
  cli.add_flag("--numeric", numeric, "Cross-check with the numeric Wigner path (output.numeric)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    tw::json user = tw::json::object();
    if (!config_path.empty()) user = tw::json::parse(tw::read_file(config_path));
    if (!out_dir.empty()) sets.push_back("output.dir=" + tw::json(out_dir).dump());
    if (!cache_dir.empty()) sets.push_back("cache_dir=" + tw::json(cache_dir).dump());
    if (threads > 0) sets.push_back("threads=" + std::to_string(threads));
    if (numeric) sets.push_back("output.numeric=true");

    const tw::RunConfig config = tw::RunConfig::load(user, sets);
    const tw::json summary = tw::run_command(command, config);
    std::cout << tw::dump_json(summary);
    return 0;
  } catch (const tw::Error& e) {
    std::cerr << tw::dump_json(tw::error_report(e));
    return e.exit_code();
  } catch (const tw::json::exception& e) {
    std::cerr << tw::dump_json({{"status", "error"},
                                {"code", "CONFIG"},
                                {"exit_code", 2},
                                {"errors", {{{"code", "CONFIG"}, {"message", e.what()}}}}});
    return 2;
  } catch (const std::exception& e) {
    std::cerr << tw::dump_json({{"status", "error"},
                                {"code", "INTERNAL"},
                                {"exit_code", 1},
                                {"errors", {{{"code", "INTERNAL"}, {"message", e.what()}}}}});
    return 1;
  }
}
