#include "commands.hpp"
#include "run_config.hpp"

#include <omp.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code(dlpd::ErrorKind kind) {
  switch (kind) {
    case dlpd::ErrorKind::InvalidArgument: return kExitConfig;
    case dlpd::ErrorKind::DataError: return kExitData;
    default: return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dlpd::cli;
  CLI::App app{"Dynamic linear programming discriminant: simulate, fit, predict, evaluate, tune, bench"};
  RunConfig cfg;
  add_options(app, cfg);
  app.require_subcommand(1);

  using Command = std::function<nlohmann::json(const RunConfig&)>;
  Command command;
  auto sub = [&](const char* name, const char* help, Command fn) {
    CLI::App* s = app.add_subcommand(name, help);
    s->fallthrough();
    s->callback([&command, fn] { command = fn; });
  };
  sub("simulate", "draw train/test CSVs from a simulation model", cmd_simulate);
  sub("fit", "tune and fit a classifier on --train, write --model-file", cmd_fit);
  sub("predict", "classify --test with --model-file, write --predictions", cmd_predict);
  sub("evaluate", "error rates of --model-file on --test", cmd_evaluate);
  sub("cv", "cross-validation curves on --train", cmd_cv);
  sub("bench", "replicated simulation benchmark", cmd_bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    cfg.validate();
    const int threads = resolve_threads(cfg.threads);
    omp_set_num_threads(threads);
    const auto start = std::chrono::steady_clock::now();
    nlohmann::json report = command(cfg);
    report["config"] = cfg.to_json();
    report["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = report.dump(2) + "\n";
    if (cfg.report.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.report, std::ios::binary);
      if (!(out << text)) throw dlpd::Error(dlpd::ErrorKind::DataError, "cannot write " + cfg.report);
    }
    return 0;
  } catch (const dlpd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
