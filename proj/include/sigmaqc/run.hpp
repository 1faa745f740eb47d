#pragma once

/// \file sigmaqc/run.hpp
/// \brief Experiment runner: config parsing, the case -> solve -> conjugate ->
///        dilatation -> analysis pipeline, enforced checks and report files.
///
/// Config format, one `key = value` per line, `#` comments:
///
///     case = laminate
///     grid = 64, 128
///     out = results
///     [params]
///     a1 = 2
///     [analysis]
///     p = 2
///     max_level = 4
///     subregion = 0.25, 0.75, 0.25, 0.75
///     [checks]
///     d_sigma_const = 0.02
///     [export]
///     fields = d_sigma, w1

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigmaqc/analysis.hpp"
#include "sigmaqc/cases.hpp"
#include "sigmaqc/conjugate.hpp"
#include "sigmaqc/dilatation.hpp"

namespace sqc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CheckSpec {
  std::string name;
  double tolerance = 0.0;
};

struct RunConfig {
  std::string case_name;
  std::map<std::string, double> params;
  std::vector<int> grids;
  AnalysisOptions analysis;
  std::vector<CheckSpec> checks;
  std::vector<std::string> exports;
  std::optional<std::filesystem::path> out;
};

/// Throws ConfigError with the offending line number.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// "k=v,k=v" parameter lists.
std::map<std::string, double> parse_params(const std::string& text);

/// Names accepted in [checks]; every one is "measured <= tolerance".
const std::vector<std::string>& check_names();
/// Names accepted in [export].
const std::vector<std::string>& field_names();

struct GridResult {
  int n = 0;
  std::optional<SigmaField> sigma;
  std::optional<MapField> map;
  /// Stream function of u1.
  std::optional<ConjugatePair> pair;
  SolveInfo solve;
  DilatationReport dilatation;
  AnalysisReport analysis;
  /// Every available metric by name, including the check quantities.
  std::map<std::string, double> metrics;
};

struct CheckResult {
  std::string name;
  double tolerance = 0.0;
  /// Worst value over the grids and the grid where it occurred.
  double measured = 0.0;
  int grid = 0;
  bool passed = true;
};

struct RunReport {
  RunConfig config;
  CaseBundle bundle;
  std::vector<GridResult> grids;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// Deterministic key = value text.
  std::string text() const;
};

/// Throws ConfigError when a check is unknown or unavailable for the case.
RunReport run(const RunConfig& config);

/// Writes one field of a finished grid as a text table.
void write_field(std::ostream& out, const RunReport& report, const GridResult& grid, const std::string& field);

enum ExitCode { exit_ok = 0, exit_check_failed = 1, exit_config_error = 2 };

/// Runs a config file, writes report.txt, per-grid analysis and dilatation
/// documents and requested field tables to the output directory.
int run_command(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& log, std::ostream& err);

/// Writes one field of the finest grid to `out`.
int export_command(const std::filesystem::path& config, const std::string& field, std::ostream& out,
                   std::ostream& err);

}  // namespace sqc
