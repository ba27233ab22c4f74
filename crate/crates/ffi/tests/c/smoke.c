#include <math.h>
#include <stdio.h>
#include <string.h>

#include "flowinfer.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    FiStatus s_ = (call);                                                  \
    if (s_ != FI_STATUS_OK) {                                              \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, fi_last_error_message()); \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  const double zero[2] = {0.0, 0.0};
  FiVelocity *v = NULL;
  FiScalar *theta0 = NULL;
  FiTrajectory *traj = NULL;
  CHECK(fi_velocity_from_params("shear", 1, zero, 2, &v));
  CHECK(fi_scalar_sine(8, 1, 0, 1.0, &theta0));
  CHECK(fi_solve(v, theta0, 0.05, 1.0, &traj));

  size_t n = fi_trajectory_len(traj);
  double t = 0.0, value = 0.0;
  CHECK(fi_trajectory_sample(traj, n - 1, 0.25, 0.0, &t, &value));
  double exact = exp(-4.0 * M_PI * M_PI * 0.05 * t);
  if (fabs(value - exact) > 1e-8) {
    fprintf(stderr, "heat decay %.12f vs %.12f\n", value, exact);
    return 1;
  }

  if (fi_solve(v, theta0, -1.0, 1.0, &traj) != FI_STATUS_CONFIG ||
      strstr(fi_last_error_message(), "kappa") == NULL) {
    fprintf(stderr, "expected a kappa error\n");
    return 1;
  }

  fi_trajectory_free(traj);
  fi_scalar_free(theta0);
  fi_velocity_free(v);
  printf("ok %s\n", fi_version());
  return 0;
}
