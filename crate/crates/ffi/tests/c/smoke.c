#include <math.h>
#include <stdio.h>
#include <string.h>

#include "fvdom.h"

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      const char *msg = fvdom_last_error_message();                        \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,       \
              msg ? msg : "no error message");                             \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  FvdomMesh *mesh = NULL;
  CHECK(fvdom_mesh_box(4, 0.25, 7, &mesh) == FVDOM_STATUS_OK);

  size_t cells = 0, patches = 0;
  CHECK(fvdom_mesh_counts(mesh, NULL, &cells, NULL, &patches) == FVDOM_STATUS_OK);
  CHECK(cells == 384 && patches == 6);

  const char *names[] = {"in", "out"};
  const double values[] = {10.0, 0.0};
  double solution[384];
  FvdomSolveReport report;
  FvdomPoissonOptions opts = fvdom_poisson_default_options();
  opts.preconditioner = FVDOM_PRECONDITIONER_JACOBI;
  CHECK(fvdom_poisson_solve(mesh, 2, names, values, 2, &opts, solution, 384, &report) ==
        FVDOM_STATUS_OK);
  CHECK(report.residual <= opts.tol);
  double lo = solution[0], hi = solution[0];
  for (size_t i = 1; i < cells; ++i) {
    lo = fmin(lo, solution[i]);
    hi = fmax(hi, solution[i]);
  }
  CHECK(lo > 0.0 && hi < 10.0);

  CHECK(fvdom_mesh_load("/no/such/mesh.msh", &mesh) == FVDOM_STATUS_IO);
  CHECK(mesh == NULL);
  CHECK(strstr(fvdom_last_error_message(), "/no/such/mesh.msh") != NULL);

  double a = -1.0;
  CHECK(fvdom_ionization_ratio(2e-15, &a) == FVDOM_STATUS_OK);
  CHECK(fabs(a - 2e-16 * exp(-7.248e-15 / 2e-15)) <= 1e-14 * a);

  printf("fvdom %s: %zu cells, %zu iterations\n", fvdom_version(), cells, report.iterations);
  return 0;
}
