/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "raas/raas_c.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  raas_experiment* e = NULL;
  double a = 0;

  EXPECT(raas_solve_alpha(1.0, 1.0, 1.0, 0.4, 0.1, 0.0, &a) == RAAS_OK);
  EXPECT(fabs(a - 0.6180339887498949) < 1e-12);
  EXPECT(fabs(raas_auxiliary_step(1.0, 0.5, 0.5, 0.0) - 1.0) < 1e-15);
  EXPECT(raas_solve_alpha(1.0, 1.0, 1.0, 0.4, 0.1, 0.0, NULL) == RAAS_ERR_ARGUMENT);

  EXPECT(raas_experiment_parse("{\"methods\": [\"nope\"]}", &e) == RAAS_ERR_CONFIG);
  EXPECT(e == NULL);
  EXPECT(strstr(raas_last_error(), "nope") != NULL);
  EXPECT(raas_experiment_load("/nonexistent/config.json", &e) == RAAS_ERR_CONFIG);
  EXPECT(raas_experiment_run(NULL, NULL, NULL, 0, NULL) == RAAS_ERR_ARGUMENT);

  const char* cfg =
      "{\"problem\": {\"type\": \"quadratic\", \"d\": 20, \"L\": 5, \"mu\": 1},"
      " \"methods\": [\"raas\", \"sgd\"], \"seeds\": [1], \"R\": 1, \"T\": 20}";
  EXPECT(raas_experiment_parse(cfg, &e) == RAAS_OK);
  if (e) {
    char* text = NULL;
    EXPECT(raas_experiment_constants(e, &text) == RAAS_OK);
    EXPECT(text && strstr(text, "gamma_bar") != NULL);
    raas_string_free(text);
    text = NULL;
    EXPECT(raas_experiment_verify(e, 1, &text) == RAAS_OK);
    EXPECT(text && strstr(text, "0 violation(s)") != NULL);
    raas_string_free(text);
    EXPECT(raas_experiment_run(e, "/proc/raas_cannot_write_here", "csv", 1, NULL) ==
           RAAS_ERR_IO);
    EXPECT(raas_experiment_run(e, NULL, "csv,png", 1, NULL) == RAAS_ERR_CONFIG);
    raas_experiment_free(e);
  }
  EXPECT(strlen(raas_version()) > 0);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
