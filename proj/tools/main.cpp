// sigmaqc command line: run, cases, export.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sigmaqc/sigmaqc.h"

namespace {

int report_status(sqc_status s) {
  std::cerr << "error: " << sqc_last_error() << "\n";
  return s == SQC_ERR_SOLVER ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sigma-harmonic mappings and their quasiconformality checks"};
  app.set_version_flag("--version", std::string(sqc_version()));
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run the pipeline of a config file and enforce its checks");
  run->add_option("--config", config, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides 'out' in the config)");

  app.add_subcommand("cases", "List the built-in cases");

  std::string field;
  auto* exp = app.add_subcommand("export", "Print one field of the finest grid as a text table");
  exp->add_option("--config", config, "Config file")->required();
  exp->add_option("--field", field, "Field name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand("cases")) {
    for (size_t i = 0; i < sqc_case_count(); ++i) std::cout << sqc_case_name(i) << "\n";
    return 0;
  }
  if (app.got_subcommand("run")) {
    int exit_code = 2;
    const sqc_status s = sqc_run_file(config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), &exit_code);
    return s == SQC_OK ? exit_code : report_status(s);
  }
  int exit_code = 2;
  char* text = nullptr;
  const sqc_status s = sqc_export_file(config.c_str(), field.c_str(), &text, &exit_code);
  if (s != SQC_OK) return report_status(s);
  if (text != nullptr) {
    std::fputs(text, stdout);
    sqc_string_free(text);
  } else {
    std::cerr << sqc_last_error();
  }
  return exit_code;
}
