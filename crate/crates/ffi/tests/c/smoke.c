#include <math.h>
#include <stdio.h>
#include <string.h>

#include "sbs_monitor.h"

#define CHECK(expr)                                                   \
  do {                                                                \
    if (!(expr)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #expr); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  SbsSpinSet *set = sbs_spin_set_new();
  CHECK(sbs_spin_set_push(set, 0.0, M_PI / 2, 0.0, 1.0, 1.0) == SBS_STATUS_OK);
  double re = 0.0, im = 0.0, b = 0.0;
  CHECK(sbs_decoherence_factor(set, M_PI / 2, &re, &im) == SBS_STATUS_OK);
  CHECK(sbs_macrofraction_fidelity(set, M_PI / 2, &b) == SBS_STATUS_OK);
  CHECK(fabs(b) < 1e-12);

  CHECK(sbs_spin_set_push(set, 0.0, 0.0, 0.0, 2.0, 1.0) == SBS_STATUS_INVALID_ARGUMENT);
  char msg[256];
  CHECK(sbs_last_error_message(msg, sizeof msg) == SBS_STATUS_OK);
  CHECK(strstr(msg, "lambda") != NULL);
  sbs_spin_set_free(set);

  SbsTimeScales ts;
  CHECK(sbs_time_scales(200, 100, 0.5, 1.0 / 3.0, &ts) == SBS_STATUS_OK);
  CHECK(fabs(ts.ratio_sq - 4.0) < 1e-12);
  CHECK(sbs_time_scales(200, 1, 0.5, 1.0, &ts) == SBS_STATUS_INVALID_ARGUMENT);

  double p = 0.0;
  CHECK(sbs_majority_success(3, 0.5, &p) == SBS_STATUS_OK && p == 0.5);
  CHECK(sbs_majority_success(3, 0.5, NULL) == SBS_STATUS_NULL_POINTER);

  printf("ok %s\n", sbs_version());
  return 0;
}
