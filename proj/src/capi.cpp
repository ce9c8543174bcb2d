#include "selfaffine/selfaffine.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "selfaffine/constructions.hpp"
#include "selfaffine/error.hpp"
#include "selfaffine/geometry.hpp"
#include "selfaffine/measures.hpp"
#include "selfaffine/pressure.hpp"
#include "selfaffine/selftest.hpp"
#include "selfaffine/serialize.hpp"

struct sa_system {
  selfaffine::IfsSystem value;
};
struct sa_projection {
  selfaffine::ProjectionMap value;
};
struct sa_measure {
  selfaffine::Measure value;
};
struct sa_cloud {
  selfaffine::PointCloud value;
};
struct sa_sumset {
  selfaffine::SumsetSystem value;
};

namespace {

using namespace selfaffine;

thread_local std::string g_last_error;
thread_local unsigned g_last_depth = 0;

sa_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return SA_ERR_INVALID_INPUT;
    case ErrorCode::domain: return SA_ERR_DOMAIN;
    case ErrorCode::index: return SA_ERR_INDEX;
    case ErrorCode::contraction: return SA_ERR_CONTRACTION;
    case ErrorCode::resource: return SA_ERR_RESOURCE;
    case ErrorCode::degenerate: return SA_ERR_DEGENERATE;
    case ErrorCode::io: return SA_ERR_IO;
  }
  return SA_ERR_INTERNAL;
}

template <class Fn>
sa_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  g_last_depth = 0;
  try {
    fn();
    return SA_OK;
  } catch (const ResourceError& e) {
    g_last_error = e.what();
    g_last_depth = e.max_feasible_depth();
    return SA_ERR_RESOURCE;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return SA_ERR_INVALID_INPUT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SA_ERR_RESOURCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SA_ERR_INTERNAL;
  }
}

template <class T>
const T& deref(const T* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_input, std::string(what) + " is null");
  return *p;
}

template <class T>
void check_out(T** out) {
  require(out != nullptr, ErrorCode::invalid_input, "output pointer is null");
}

void check_data(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_input, std::string(what) + " is null");
}

void emit(const Json& doc, char** out) {
  check_out(out);
  const std::string text = doc.dump();
  char* buffer = static_cast<char*>(std::malloc(text.size() + 1));
  if (buffer == nullptr) throw std::bad_alloc();
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  *out = buffer;
}

Json parse(const char* text) {
  check_data(text, "JSON text");
  return Json::parse(text);
}

ExecOptions exec_of(const sa_exec* e) {
  ExecOptions out;
  if (e == nullptr) return out;
  if (e->leaf_budget != 0) out.leaf_budget = e->leaf_budget;
  if (e->prefix_length != 0) out.prefix_length = e->prefix_length;
  out.workers = e->workers;
  return out;
}

Matrix matrix_of(size_t rows, size_t cols, const double* m) {
  check_data(m, "matrix");
  require(rows > 0 && cols > 0, ErrorCode::invalid_input, "matrix must be non-empty");
  return Matrix(rows, cols, std::vector<double>(m, m + rows * cols));
}

}  // namespace

extern "C" {

const char* sa_version(void) { return "0.1.0"; }

const char* sa_status_name(sa_status status) {
  switch (status) {
    case SA_OK: return "ok";
    case SA_ERR_INVALID_INPUT: return "invalid_input";
    case SA_ERR_DOMAIN: return "domain";
    case SA_ERR_INDEX: return "index";
    case SA_ERR_CONTRACTION: return "contraction";
    case SA_ERR_RESOURCE: return "resource";
    case SA_ERR_DEGENERATE: return "degenerate";
    case SA_ERR_IO: return "io";
    case SA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sa_last_error(void) { return g_last_error.c_str(); }

unsigned sa_last_max_feasible_depth(void) { return g_last_depth; }

void sa_string_free(char* text) { std::free(text); }

sa_status sa_singular_values(size_t rows, size_t cols, const double* m, double* out) {
  return guarded([&] {
    check_data(out, "output");
    const auto sigma = singular_values(matrix_of(rows, cols, m)).values;
    std::copy(sigma.begin(), sigma.end(), out);
  });
}

sa_status sa_svf(size_t rows, size_t cols, const double* m, double s, double* out) {
  return guarded([&] {
    check_data(out, "output");
    *out = svf(matrix_of(rows, cols, m), s).value;
  });
}

sa_status sa_system_create(size_t dimension, size_t n_maps, const double* linear,
                           const double* translations, sa_system** out) {
  return guarded([&] {
    check_out(out);
    check_data(linear, "linear parts");
    require(dimension > 0 && n_maps > 0, ErrorCode::invalid_input,
            "system needs a positive dimension and at least one map");
    std::vector<AffineMap> maps;
    const size_t block = dimension * dimension;
    for (size_t i = 0; i < n_maps; ++i) {
      std::vector<double> t(dimension, 0.0);
      if (translations != nullptr)
        t.assign(translations + i * dimension, translations + (i + 1) * dimension);
      maps.push_back({matrix_of(dimension, dimension, linear + i * block), std::move(t)});
    }
    *out = new sa_system{IfsSystem(std::move(maps))};
  });
}

sa_status sa_system_from_json(const char* json, sa_system** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_system{system_from_json(parse(json))};
  });
}

sa_status sa_system_preset(const char* name, sa_system** out) {
  return guarded([&] {
    check_out(out);
    check_data(name, "preset name");
    *out = new sa_system{preset_system(name)};
  });
}

sa_status sa_system_to_json(const sa_system* sys, char** json) {
  return guarded([&] { emit(to_json(deref(sys, "system").value), json); });
}

sa_status sa_gen_perm_example(size_t d, double entry_low, double entry_high, size_t n_maps,
                              uint64_t seed, sa_system** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_system{gen_perm_example(d, entry_low, entry_high, n_maps, seed)};
  });
}

sa_status sa_tensor_example(size_t d1, size_t d2, size_t n_maps, double scale, uint64_t seed,
                            sa_system** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_system{tensor_example(d1, d2, n_maps, scale, seed)};
  });
}

size_t sa_system_dimension(const sa_system* sys) { return sys ? sys->value.dimension() : 0; }

size_t sa_system_size(const sa_system* sys) { return sys ? sys->value.size() : 0; }

sa_status sa_contraction_report(const sa_system* sys, char** json) {
  return guarded([&] { emit(to_json(contraction_report(deref(sys, "system").value)), json); });
}

sa_status sa_require_contracting(const sa_system* sys) {
  return guarded([&] { require_contracting(deref(sys, "system").value); });
}

void sa_system_free(sa_system* sys) { delete sys; }

sa_status sa_projection_create(size_t dimension, const double* matrix, sa_projection** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_projection{ProjectionMap(matrix_of(dimension, dimension, matrix))};
  });
}

sa_status sa_projection_preset(const char* name, size_t dimension, sa_projection** out) {
  return guarded([&] {
    check_out(out);
    check_data(name, "preset name");
    *out = new sa_projection{ProjectionMap::preset(name, dimension)};
  });
}

sa_status sa_projection_from_json(const char* json, size_t dimension, sa_projection** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_projection{projection_from_json(parse(json), dimension)};
  });
}

size_t sa_projection_rank(const sa_projection* q) { return q ? q->value.rank() : 0; }

void sa_projection_free(sa_projection* q) { delete q; }

sa_status sa_measure_bernoulli(size_t n, const double* probs, sa_measure** out) {
  return guarded([&] {
    check_out(out);
    check_data(probs, "probabilities");
    *out = new sa_measure{Measure::bernoulli(std::vector<double>(probs, probs + n))};
  });
}

sa_status sa_measure_markov(size_t n, const double* transition, sa_measure** out) {
  return guarded([&] {
    check_out(out);
    check_data(transition, "transition matrix");
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < n; ++i) rows.emplace_back(transition + i * n, transition + (i + 1) * n);
    *out = new sa_measure{Measure::markov(std::move(rows))};
  });
}

sa_status sa_measure_from_json(const char* json, sa_measure** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_measure{measure_from_json(parse(json))};
  });
}

sa_status sa_measure_preset(const char* name, sa_measure** out) {
  return guarded([&] {
    check_out(out);
    check_data(name, "preset name");
    *out = new sa_measure{preset_measure(name)};
  });
}

void sa_measure_free(sa_measure* mu) { delete mu; }

sa_status sa_max_feasible_depth(size_t alphabet, uint64_t budget, unsigned* out) {
  return guarded([&] {
    check_data(out, "output");
    require(alphabet > 0, ErrorCode::domain, "alphabet must be non-empty");
    *out = max_feasible_depth(alphabet, budget);
  });
}

sa_status sa_log_partition_sum(const sa_system* sys, const sa_projection* q, double s,
                               unsigned n, const sa_exec* exec, double* out) {
  return guarded([&] {
    check_data(out, "output");
    *out = log_partition_sum(deref(sys, "system").value, deref(q, "projection").value, s, n,
                             exec_of(exec));
  });
}

sa_status sa_pressure(const sa_system* sys, const sa_projection* q, double s, unsigned n_max,
                      unsigned n_min, const sa_exec* exec, char** json) {
  return guarded([&] {
    emit(to_json(pressure(deref(sys, "system").value, deref(q, "projection").value, s, n_max,
                          n_min, exec_of(exec))),
         json);
  });
}

sa_status sa_dim_aff_q(const sa_system* sys, const sa_projection* q, unsigned n, double tol,
                       const sa_exec* exec, char** json) {
  return guarded([&] {
    emit(to_json(dim_aff_q(deref(sys, "system").value, deref(q, "projection").value, n, tol,
                           exec_of(exec))),
         json);
  });
}

sa_status sa_pressure_curve(const sa_system* sys, const sa_projection* q, const double* s_grid,
                            size_t count, unsigned n, const sa_exec* exec, double* values) {
  return guarded([&] {
    check_data(s_grid, "s grid");
    check_data(values, "output");
    const auto curve = pressure_curve(deref(sys, "system").value, deref(q, "projection").value,
                                      std::span<const double>(s_grid, count), n, exec_of(exec));
    for (size_t i = 0; i < curve.size(); ++i) values[i] = curve[i].value;
  });
}

sa_status sa_sublevel_membership(const sa_system* sys, double s, double t,
                                 const sa_projection* q, unsigned n, const sa_exec* exec,
                                 char** json) {
  return guarded([&] {
    const auto m = sublevel_membership(deref(sys, "system").value, s, t,
                                       deref(q, "projection").value, n, exec_of(exec));
    emit({{"member", m.member}, {"margin", number(m.margin)}, {"value", number(m.value)}}, json);
  });
}

sa_status sa_lyapunov(const sa_system* sys, const sa_measure* mu, size_t n, size_t trials,
                      uint64_t seed, unsigned workers, char** json) {
  return guarded([&] {
    emit(to_json(lyapunov_exponents(deref(sys, "system").value, deref(mu, "measure").value, n,
                                    trials, seed, workers)),
         json);
  });
}

sa_status sa_local_dimension(const sa_system* sys, const sa_projection* q, const sa_measure* mu,
                             const uint32_t* word, size_t length, char** json) {
  return guarded([&] {
    require(word != nullptr || length == 0, ErrorCode::invalid_input, "word is null");
    const Word w(word, word + length);
    emit(to_json(local_lyap_dim_q(deref(sys, "system").value, deref(q, "projection").value,
                                  deref(mu, "measure").value, w)),
         json);
  });
}

sa_status sa_exactness(const sa_system* sys, const sa_projection* q, const sa_measure* mu,
                       size_t n, size_t trials, uint64_t seed, const double* s, unsigned workers,
                       char** json) {
  return guarded([&] {
    ExactnessOptions opts;
    if (s != nullptr) opts.s = *s;
    opts.workers = workers;
    emit(to_json(exactness_diagnostic(deref(sys, "system").value, deref(q, "projection").value,
                                      deref(mu, "measure").value, n, trials, seed, opts)),
         json);
  });
}

sa_status sa_chaos_game(const sa_system* sys, const double* probs, size_t n_points,
                        uint64_t seed, unsigned workers, sa_cloud** out) {
  return guarded([&] {
    check_out(out);
    const auto& system = deref(sys, "system").value;
    std::vector<double> p(system.size(), 1.0 / static_cast<double>(system.size()));
    if (probs != nullptr) p.assign(probs, probs + system.size());
    ChaosGameOptions opts;
    opts.workers = workers;
    *out = new sa_cloud{chaos_game(system, p, n_points, seed, opts)};
  });
}

sa_status sa_cloud_create(size_t dimension, size_t n_points, const double* points,
                          sa_cloud** out) {
  return guarded([&] {
    check_out(out);
    require(dimension > 0, ErrorCode::invalid_input, "cloud dimension must be positive");
    require(points != nullptr || n_points == 0, ErrorCode::invalid_input, "points are null");
    std::vector<double> data(points, points + n_points * dimension);
    for (double x : data)
      require(std::isfinite(x), ErrorCode::invalid_input, "point coordinates must be finite");
    *out = new sa_cloud{PointCloud{dimension, std::move(data)}};
  });
}

size_t sa_cloud_dimension(const sa_cloud* cloud) { return cloud ? cloud->value.dimension : 0; }

size_t sa_cloud_size(const sa_cloud* cloud) { return cloud ? cloud->value.size() : 0; }

const double* sa_cloud_data(const sa_cloud* cloud) {
  return cloud ? cloud->value.points.data() : nullptr;
}

sa_status sa_project_points(const sa_projection* q, const sa_cloud* cloud, unsigned workers,
                            sa_cloud** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_cloud{
        project_points(deref(q, "projection").value, deref(cloud, "cloud").value, workers)};
  });
}

sa_status sa_box_count(const sa_cloud* cloud, double delta, unsigned workers, uint64_t* out) {
  return guarded([&] {
    check_data(out, "output");
    *out = box_count(deref(cloud, "cloud").value, delta, workers);
  });
}

sa_status sa_box_dim_fit(const sa_cloud* cloud, double delta_hi, double delta_lo,
                         size_t n_scales, unsigned workers, char** json) {
  return guarded([&] {
    BoxFitOptions opts;
    opts.delta_hi = delta_hi;
    opts.delta_lo = delta_lo;
    if (n_scales != 0) opts.n_scales = n_scales;
    opts.workers = workers;
    emit(to_json(box_dim_fit(deref(cloud, "cloud").value, opts)), json);
  });
}

sa_status sa_export_csv(const sa_cloud* cloud, const char* path) {
  return guarded([&] {
    check_data(path, "path");
    export_csv(deref(cloud, "cloud").value, path);
  });
}

sa_status sa_import_csv(const char* path, sa_cloud** out) {
  return guarded([&] {
    check_out(out);
    check_data(path, "path");
    *out = new sa_cloud{import_csv(path)};
  });
}

sa_status sa_export_ppm(const sa_cloud* cloud, const char* path, size_t width, size_t height,
                        size_t axis_x, size_t axis_y) {
  return guarded([&] {
    check_data(path, "path");
    export_ppm(deref(cloud, "cloud").value, path, width, height, axis_x, axis_y);
  });
}

void sa_cloud_free(sa_cloud* cloud) { delete cloud; }

sa_status sa_sumset_demo(unsigned dim_depth, const sa_exec* exec, sa_sumset** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_sumset{sumset_demo(dim_depth, exec_of(exec))};
  });
}

sa_status sa_sumset_from_json(const char* json, unsigned dim_depth, const sa_exec* exec,
                              sa_sumset** out) {
  return guarded([&] {
    check_out(out);
    const Json doc = parse(json);
    require(doc.is_object() && doc.contains("a") && doc.contains("b"), ErrorCode::invalid_input,
            "sumset needs factors 'a' and 'b'");
    *out = new sa_sumset{sumset_system(tensor_factors_from_json(doc.at("a")),
                                       tensor_factors_from_json(doc.at("b")), dim_depth,
                                       exec_of(exec))};
  });
}

sa_status sa_sumset_to_json(const sa_sumset* sumset, char** json) {
  return guarded([&] { emit(to_json(deref(sumset, "sumset").value), json); });
}

sa_status sa_sumset_product(const sa_sumset* sumset, sa_system** out) {
  return guarded([&] {
    check_out(out);
    *out = new sa_system{deref(sumset, "sumset").value.product};
  });
}

sa_status sa_domination_check(const sa_sumset* sumset, size_t k1, size_t k2, unsigned n,
                              const sa_exec* exec, char** json) {
  return guarded([&] {
    emit(to_json(domination_check(deref(sumset, "sumset").value, k1, k2, n, exec_of(exec))),
         json);
  });
}

sa_status sa_sumset_pressure_drop(const sa_sumset* sumset, unsigned n, const sa_exec* exec,
                                  char** json) {
  return guarded([&] {
    emit(to_json(sumset_pressure_drop(deref(sumset, "sumset").value, n, exec_of(exec))), json);
  });
}

void sa_sumset_free(sa_sumset* sumset) { delete sumset; }

sa_status sa_selftest(uint64_t seed, unsigned workers, const int* criteria, size_t count,
                      sa_progress_fn progress, void* user, char** json) {
  return guarded([&] {
    SelftestOptions opts;
    opts.seed = seed;
    opts.workers = workers;
    require(criteria != nullptr || count == 0, ErrorCode::invalid_input, "criteria are null");
    opts.criteria.assign(criteria, criteria + count);
    if (progress != nullptr)
      opts.progress = [progress, user](const CriterionEvent& e) {
        progress(e.id, e.name.c_str(), e.pass ? 1 : 0, e.seconds, e.max_render_seconds, user);
      };
    emit(run_selftest(opts), json);
  });
}

int sa_criterion_count(void) { return kCriterionCount; }

}  // extern "C"
