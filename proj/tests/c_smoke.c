/* The public header compiles as C99 and the library links from C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "sigmaqc/sigmaqc.h"

static int failures = 0;

static void expect(int ok, const char* what) {
  if (!ok) {
    fprintf(stderr, "c_smoke: %s (%s)\n", what, sqc_last_error());
    ++failures;
  }
}

int main(void) {
  sqc_case* c = NULL;
  sqc_solution* s = NULL;
  sqc_dilatation_summary d;
  double v = 0.0;
  char* text = NULL;

  expect(sqc_case_count() == 6, "six cases");
  expect(sqc_case_create("constant_nonsymmetric", "t=1", &c) == SQC_OK, "create");
  expect(sqc_case_solve(c, 8, &s) == SQC_OK, "solve");
  expect(sqc_solution_dilatation(s, &d) == SQC_OK, "dilatation");
  expect(fabs(d.sup_d_sigma - 1.0) < 1e-12, "d_sigma of the identity map is 1");
  expect(sqc_solution_metric(s, "nu_abs", &v) == SQC_OK, "metric");
  expect(fabs(v - 1.0 / sqrt(5.0)) < 1e-12, "|nu| = 1/sqrt(5)");
  expect(sqc_solution_export(s, "sigma", &text) == SQC_OK, "export");
  expect(text != NULL && strncmp(text, "cx,cy,", 6) == 0, "table header");
  sqc_string_free(text);
  sqc_solution_destroy(s);
  sqc_case_destroy(c);

  if (failures == 0) printf("c_smoke: ok\n");
  return failures == 0 ? 0 : 1;
}
