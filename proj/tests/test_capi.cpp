#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sigmaqc/sigmaqc.h"

TEST_CASE("case registry through the C interface") {
  CHECK(std::string(sqc_version()).size() > 0);
  CHECK(sqc_case_count() == 6);
  CHECK(std::string(sqc_case_name(0)) == "identity");
  CHECK(sqc_case_name(99) == nullptr);
}

TEST_CASE("status codes and last error") {
  sqc_case* c = nullptr;
  CHECK(sqc_case_create("nope", nullptr, &c) == SQC_ERR_UNKNOWN_CASE);
  CHECK(c == nullptr);
  CHECK(std::string(sqc_last_error()).find("nope") != std::string::npos);
  CHECK(sqc_case_create(nullptr, nullptr, &c) == SQC_ERR_ARGUMENT);
  CHECK(sqc_case_create("laminate", "a1", &c) == SQC_ERR_ARGUMENT);
  CHECK(sqc_case_create("laminate", "a3=1", &c) == SQC_ERR_UNKNOWN_CASE);
  CHECK(sqc_case_create("laminate", "a1=-2", &c) == SQC_ERR_UNKNOWN_CASE);
  CHECK(sqc_case_create("laminate", "a1=3,a2=0.25", &c) == SQC_OK);
  CHECK(std::string(sqc_last_error()).empty());
  sqc_solution* s = nullptr;
  CHECK(sqc_case_solve(c, 7, &s) == SQC_ERR_CONFIG);
  CHECK(sqc_case_solve(c, 1, &s) == SQC_ERR_ARGUMENT);
  CHECK(s == nullptr);
  sqc_case_destroy(c);
  sqc_case_destroy(nullptr);
  sqc_solution_destroy(nullptr);
}

TEST_CASE("laminate summaries, metrics and exports") {
  sqc_case* c = nullptr;
  REQUIRE(sqc_case_create("laminate", nullptr, &c) == SQC_OK);
  sqc_solution* s = nullptr;
  REQUIRE(sqc_case_solve(c, 16, &s) == SQC_OK);

  sqc_dilatation_summary d{};
  REQUIRE(sqc_solution_dilatation(s, &d) == SQC_OK);
  CHECK(d.sup_d_sigma == doctest::Approx(1.025).epsilon(1e-10));
  CHECK(d.harnack_H == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.degenerate_cells == 0);

  sqc_analysis_summary a{};
  REQUIRE(sqc_solution_analysis(s, &a) == SQC_OK);
  CHECK(a.has_global == 1);
  CHECK(a.energy_sigma == doctest::Approx(2.05).epsilon(1e-10));
  CHECK(a.area_integral == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.chain_ok == 1);

  double v = 0.0;
  CHECK(sqc_solution_metric(s, "w1_mean", &v) == SQC_OK);
  CHECK(v == doctest::Approx(1.25).epsilon(1e-10));
  CHECK(sqc_solution_metric(s, "nope", &v) == SQC_ERR_ARGUMENT);

  char* text = nullptr;
  REQUIRE(sqc_solution_export(s, "w2", &text) == SQC_OK);
  CHECK(std::string(text).rfind("cx,cy,value\n", 0) == 0);
  sqc_string_free(text);
  CHECK(sqc_solution_export(s, "bogus", &text) != SQC_OK);

  sqc_solution_destroy(s);
  sqc_case_destroy(c);
}

TEST_CASE("config files through the C interface") {
  const auto dir = std::filesystem::temp_directory_path() / "sigmaqc_test_capi";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "id.cfg";
  std::ofstream(cfg) << "case = identity\ngrid = 8\n[checks]\nidentity_residual = 1e-12\n";
  int code = -1;
  CHECK(sqc_run_file(cfg.c_str(), (dir / "out").c_str(), &code) == SQC_OK);
  CHECK(code == 0);
  CHECK(std::filesystem::exists(dir / "out" / "report.txt"));

  CHECK(sqc_run_file((dir / "missing.cfg").c_str(), nullptr, &code) == SQC_OK);
  CHECK(code == 2);

  char* text = nullptr;
  CHECK(sqc_export_file(cfg.c_str(), "d_sigma", &text, &code) == SQC_OK);
  CHECK(code == 0);
  REQUIRE(text != nullptr);
  CHECK(std::string(text).find("0.9375,0.9375,1") != std::string::npos);
  sqc_string_free(text);
}
