/* Exercises the C interface from C: handles, status codes, JSON results. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "selfaffine/selfaffine.h"

static int failures = 0;

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, \
              #cond);                                                 \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static double field(const char* json, const char* key) {
  char pattern[64];
  const char* at;
  snprintf(pattern, sizeof pattern, "\"%s\":", key);
  at = strstr(json, pattern);
  return at ? strtod(at + strlen(pattern), NULL) : NAN;
}

static void test_linalg(void) {
  const double m[] = {3, 0, 0, 2};
  double sigma[2], phi;
  CHECK(sa_singular_values(2, 2, m, sigma) == SA_OK);
  CHECK(sigma[0] == 3.0 && sigma[1] == 2.0);
  CHECK(sa_svf(2, 2, m, 1.5, &phi) == SA_OK);
  CHECK(fabs(phi - 3.0 * sqrt(2.0)) < 1e-12);
  CHECK(sa_svf(2, 2, NULL, 1.0, &phi) == SA_ERR_INVALID_INPUT);
  CHECK(strlen(sa_last_error()) > 0);
}

static void test_systems(void) {
  const double linear[] = {1.0 / 3, 0, 0, 1.0 / 3, 1.0 / 3, 0, 0, 1.0 / 3, 1.0 / 3, 0, 0, 1.0 / 3};
  const double shifts[] = {0, 0, 2.0 / 3, 0, 0, 2.0 / 3};
  sa_system* sys = NULL;
  sa_system* tri = NULL;
  sa_projection* id = NULL;
  sa_projection* q = NULL;
  char* json = NULL;
  double log_sum = 0.0;

  CHECK(sa_system_create(2, 3, linear, shifts, &sys) == SA_OK);
  CHECK(sa_system_dimension(sys) == 2 && sa_system_size(sys) == 3);
  CHECK(sa_projection_preset("identity", 2, &id) == SA_OK);
  CHECK(sa_projection_rank(id) == 2);

  CHECK(sa_dim_aff_q(sys, id, 4, 1e-4, NULL, &json) == SA_OK);
  CHECK(fabs(field(json, "s_star") - 1.0) < 1e-6);
  sa_string_free(json);

  CHECK(sa_log_partition_sum(sys, id, 1.0, 5, NULL, &log_sum) == SA_OK);
  CHECK(fabs(log_sum) < 1e-12);

  CHECK(sa_system_to_json(sys, &json) == SA_OK);
  CHECK(strstr(json, "\"maps\"") != NULL);
  sa_system_free(sys);
  sys = NULL;
  CHECK(sa_system_from_json(json, &sys) == SA_OK);
  CHECK(sa_system_size(sys) == 3);
  sa_string_free(json);

  CHECK(sa_system_preset("triangular", &tri) == SA_OK);
  CHECK(sa_require_contracting(tri) == SA_ERR_CONTRACTION);
  CHECK(sa_require_contracting(sys) == SA_OK);
  CHECK(sa_projection_preset("coord:0", 2, &q) == SA_OK);
  CHECK(sa_pressure(tri, q, 1.0, 40, 1, NULL, &json) == SA_ERR_RESOURCE);
  CHECK(sa_last_max_feasible_depth() == 26);
  CHECK(sa_pressure(tri, q, 1.0, 12, 1, NULL, &json) == SA_OK);
  CHECK(fabs(field(json, "diff_quotient") - log(3.0)) < 0.1);
  sa_string_free(json);
  CHECK(sa_pressure(tri, q, 1.5, 4, 1, NULL, &json) == SA_ERR_DOMAIN);

  CHECK(sa_system_preset("no-such-system", &tri) == SA_ERR_INVALID_INPUT);
  CHECK(sa_system_from_json("{\"dimension\": 2", &tri) == SA_ERR_INVALID_INPUT);
  CHECK(sa_projection_from_json("\"coord:x\"", 2, &q) == SA_ERR_INVALID_INPUT);

  sa_projection_free(q);
  sa_projection_free(id);
  sa_system_free(tri);
  sa_system_free(sys);
}

static void test_measures(void) {
  sa_system* sys = NULL;
  sa_projection* q = NULL;
  sa_measure* mu = NULL;
  char* json = NULL;
  const double probs[] = {0.5, 0.6};
  CHECK(sa_system_preset("phase-perm", &sys) == SA_OK);
  CHECK(sa_measure_preset("phase-perm", &mu) == SA_OK);
  CHECK(sa_projection_preset("coord:0", 2, &q) == SA_OK);
  CHECK(sa_exactness(sys, q, mu, 400, 100, 3, NULL, 1, &json) == SA_OK);
  CHECK(field(json, "cluster_count") == 2.0);
  sa_string_free(json);
  CHECK(sa_lyapunov(sys, mu, 1000, 4, 1, 1, &json) == SA_OK);
  CHECK(strstr(json, "\"exponents\"") != NULL);
  sa_string_free(json);
  sa_measure_free(mu);
  mu = NULL;
  CHECK(sa_measure_bernoulli(2, probs, &mu) == SA_ERR_DOMAIN);
  CHECK(mu == NULL);
  sa_projection_free(q);
  sa_system_free(sys);
}

static void test_geometry(void) {
  const double points[] = {0.1, 0.1, 0.2, 0.2, 0.9, 0.9};
  sa_system* sys = NULL;
  sa_cloud* cloud = NULL;
  sa_cloud* back = NULL;
  sa_cloud* sample = NULL;
  uint64_t count = 0;
  char* json = NULL;
  const char* path = "capi_cloud.csv";

  CHECK(sa_cloud_create(2, 3, points, &cloud) == SA_OK);
  CHECK(sa_box_count(cloud, 0.5, 1, &count) == SA_OK && count == 2);
  CHECK(sa_box_count(cloud, -1.0, 1, &count) == SA_ERR_DOMAIN);
  CHECK(sa_export_csv(cloud, path) == SA_OK);
  CHECK(sa_import_csv(path, &back) == SA_OK);
  CHECK(sa_cloud_size(back) == 3);
  CHECK(memcmp(sa_cloud_data(back), points, sizeof points) == 0);
  remove(path);
  CHECK(sa_import_csv("/nonexistent/cloud.csv", &back) == SA_ERR_IO);

  CHECK(sa_system_preset("thirds-triangle", &sys) == SA_OK);
  CHECK(sa_chaos_game(sys, NULL, 200000, 5, 2, &sample) == SA_OK);
  CHECK(sa_box_dim_fit(sample, 0.0, 0.0, 0, 2, &json) == SA_OK);
  CHECK(fabs(field(json, "fit_slope") - 1.0) < 0.15);
  sa_string_free(json);

  sa_cloud_free(sample);
  sa_cloud_free(back);
  sa_cloud_free(cloud);
  sa_system_free(sys);
}

static int progress_calls = 0;

static void on_progress(int id, const char* name, int pass, double seconds, double render,
                        void* user) {
  (void)id, (void)name, (void)pass, (void)seconds, (void)render;
  ++*(int*)user;
}

static void test_selftest(void) {
  const int ids[] = {2, 7};
  char* first = NULL;
  char* second = NULL;
  CHECK(sa_criterion_count() == 12);
  CHECK(sa_selftest(7, 1, ids, 2, on_progress, &progress_calls, &first) == SA_OK);
  CHECK(sa_selftest(7, 3, ids, 2, NULL, NULL, &second) == SA_OK);
  CHECK(progress_calls == 2);
  CHECK(strcmp(first, second) == 0);
  CHECK(strstr(first, "\"all_pass\":true") != NULL);
  sa_string_free(first);
  sa_string_free(second);
  CHECK(sa_selftest(7, 1, (const int[]){13}, 1, NULL, NULL, &first) == SA_ERR_DOMAIN);
}

int main(void) {
  test_linalg();
  test_systems();
  test_measures();
  test_geometry();
  test_selftest();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  puts("all C API checks passed");
  return 0;
}
