// ucrsim: outage / throughput sweeps, rank-placement tables and the
// validation report for max-min relay selection in underlay relay networks.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ucr/errors.hpp"
#include "ucr/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumeric = 2, kValidation = 3 };

int run(const ucr::ExperimentConfig& cfg) {
  if (cfg.mode == ucr::Mode::Validate) {
    const bool ok = ucr::print_report(ucr::run_validate(cfg), std::cout);
    return ok ? kOk : kValidation;
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!cfg.output.empty()) {
    file.open(cfg.output, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write '" << cfg.output << "'\n";
      return kConfig;
    }
    out = &file;
  }
  if (cfg.mode == ucr::Mode::Pk)
    ucr::run_pk(cfg, *out);
  else
    ucr::run_sweep(cfg, *out);
  out->flush();
  if (!*out) {
    std::cerr << "error: write failed\n";
    return kConfig;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min relay selection: analytic and Monte-Carlo sweeps"};
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<std::string> scheme;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<unsigned> workers;
  bool dump = false;

  app.add_option("--config", config_path, "JSON experiment file")->required();
  app.add_option("--mode", mode, "outage|throughput|pk|validate (overrides the config)");
  app.add_option("--scheme", scheme, "maxmin|naive|random (overrides the config)");
  app.add_option("--trials", trials, "Monte-Carlo trials per sweep point");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--output", output, "CSV path (default stdout)");
  app.add_option("--workers", workers, "worker threads, 0 = all cores");
  app.add_flag("--dump-config", dump, "print the parsed configuration and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    ucr::ExperimentConfig cfg = ucr::load_config(config_path);
    if (mode) cfg.mode = ucr::parse_mode(*mode);
    if (scheme) {
      try {
        cfg.scheme = ucr::parse_scheme(*scheme);
      } catch (const std::invalid_argument& e) {
        throw ucr::ConfigError(e.what());
      }
    }
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = *seed;
    if (output) cfg.output = *output;
    if (workers) cfg.workers = *workers;
    cfg.validate();
    if (dump) {
      std::cout << ucr::dump_config(cfg);
      return kOk;
    }
    return run(cfg);
  } catch (const ucr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ucr::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}
