// Command-line front end: vexmem --config run.cfg [--out result.csv] [--seed N] [--verbose]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vexmem/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Solver and verification harness for evolution equations with variable-exponent memory"};
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  app.add_option("--config", config_path, "run configuration (key = value lines)")->required();
  app.add_option("--out", out_path, "CSV output path; '-' or empty writes to stdout");
  app.add_option("--seed", seed, "seed for randomized studies (overrides the config)");
  app.add_flag("--verbose", verbose, "print the configuration before running");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "error: category=parse status=" << vexmem::exit_status::parse << " message=" << e.what() << "\n";
    return vexmem::exit_status::parse;
  }

  vexmem::RunConfig config;
  try {
    config = vexmem::load_config(config_path);
  } catch (const vexmem::Error& e) {
    const int status = vexmem::status_for(e.category());
    std::cerr << "error: category=" << vexmem::category_name(e.category()) << " status=" << status
              << " message=" << e.what() << "\n";
    return status;
  }
  if (!out_path.empty()) config.output = out_path;
  if (seed) config.seed = *seed;
  if (verbose) config.verbose = true;

  const bool csv_to_stdout = config.output.empty() || config.output == "-";
  std::ostream& log = csv_to_stdout ? std::cerr : std::cout;
  if (config.verbose) {
    log << "config: " << config_path << "\n"
        << "exponent " << config.exponent << ", horizon " << config.horizon << ", n_time " << config.n_time
        << ", seed " << config.seed << "\n";
  }
  return vexmem::run(config, std::cout, log);
}
