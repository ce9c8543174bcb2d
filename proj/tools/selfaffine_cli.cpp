// Command-line front end over the C interface. Every subcommand reads a JSON
// config (defaults <- --config file <- --set key=value), runs one
// computation and writes {"command", "config", "result"}.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "selfaffine/selfaffine.h"

namespace {

using Json = nlohmann::ordered_json;

struct Failure {
  sa_status status = SA_ERR_INTERNAL;
  std::string message;
  unsigned max_feasible_depth = 0;
};

int exit_code(sa_status status) {
  switch (status) {
    case SA_OK: return 0;
    case SA_ERR_INVALID_INPUT:
    case SA_ERR_DOMAIN:
    case SA_ERR_INDEX:
    case SA_ERR_CONTRACTION: return 2;
    case SA_ERR_RESOURCE: return 3;
    case SA_ERR_DEGENERATE: return 4;
    case SA_ERR_IO: return 5;
    default: return 1;
  }
}

void check(sa_status status) {
  if (status != SA_OK) throw Failure{status, sa_last_error(), sa_last_max_feasible_depth()};
}

[[noreturn]] void invalid(const std::string& message) {
  throw Failure{SA_ERR_INVALID_INPUT, message};
}

struct Release {
  void operator()(sa_system* p) const { sa_system_free(p); }
  void operator()(sa_projection* p) const { sa_projection_free(p); }
  void operator()(sa_measure* p) const { sa_measure_free(p); }
  void operator()(sa_cloud* p) const { sa_cloud_free(p); }
  void operator()(sa_sumset* p) const { sa_sumset_free(p); }
  void operator()(char* p) const { sa_string_free(p); }
};

template <class T>
using Owned = std::unique_ptr<T, Release>;

template <class T, class Fn>
Owned<T> make(Fn&& fn) {
  T* raw = nullptr;
  check(fn(&raw));
  return Owned<T>(raw);
}

template <class Fn>
Json fetch(Fn&& fn) {
  return Json::parse(make<char>(std::forward<Fn>(fn)).get());
}

// Config access --------------------------------------------------------------

const Json& at(const Json& cfg, const char* key) {
  if (!cfg.contains(key)) invalid(std::string("config is missing '") + key + "'");
  return cfg.at(key);
}

std::uint64_t as_uint(const Json& cfg, const char* key) {
  const Json& v = at(cfg, key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    invalid(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double as_real(const Json& cfg, const char* key) {
  const Json& v = at(cfg, key);
  if (!v.is_number()) invalid(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::string as_text(const Json& cfg, const char* key) {
  const Json& v = at(cfg, key);
  if (!v.is_string()) invalid(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

bool present(const Json& cfg, const char* key) { return cfg.contains(key) && !cfg.at(key).is_null(); }

std::vector<double> as_reals(const Json& v, const char* key) {
  if (!v.is_array()) invalid(std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) invalid(std::string("'") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{SA_ERR_IO, "cannot read config file '" + path + "'"};
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    invalid("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// --set a.b=value; the value is read as JSON when it parses, else as text.
void apply_override(Json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) invalid("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  std::vector<std::string> keys;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) keys.push_back(part);
  if (!cfg.contains(keys.front())) invalid("unknown config key '" + keys.front() + "'");
  Json* node = &cfg;
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    Json& next = (*node)[keys[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) invalid("config key '" + keys[i] + "' is not an object");
    node = &next;
  }
  (*node)[keys.back()] = std::move(value);
}

struct Invocation {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  unsigned workers = 0;
};

Json resolve_config(const Invocation& inv, Json cfg) {
  if (!inv.config_path.empty()) {
    const Json file = read_json_file(inv.config_path);
    if (!file.is_object()) invalid("config file must hold a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (!cfg.contains(key)) invalid("unknown config key '" + key + "'");
      if (cfg[key].is_object() && value.is_object())
        cfg[key].update(value);
      else
        cfg[key] = value;
    }
  }
  for (const auto& s : inv.overrides) apply_override(cfg, s);
  return cfg;
}

sa_exec exec_of(const Json& cfg, unsigned workers) {
  sa_exec e{0, 0, workers};
  if (!present(cfg, "exec")) return e;
  const Json& x = cfg.at("exec");
  if (!x.is_object()) invalid("'exec' must be an object");
  if (present(x, "leaf_budget")) e.leaf_budget = as_uint(x, "leaf_budget");
  if (present(x, "prefix_length")) e.prefix_length = static_cast<unsigned>(as_uint(x, "prefix_length"));
  return e;
}

Json default_exec() { return {{"leaf_budget", 100000000}, {"prefix_length", 3}}; }

// Handles from config values --------------------------------------------------

Owned<sa_system> system_of(const Json& cfg) {
  const Json& v = at(cfg, "system");
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    return make<sa_system>([&](sa_system** out) { return sa_system_preset(name.c_str(), out); });
  }
  if (!v.is_object()) invalid("'system' must be a preset name or a system object");
  const std::string text = v.dump();
  return make<sa_system>([&](sa_system** out) { return sa_system_from_json(text.c_str(), out); });
}

Owned<sa_projection> projection_of(const Json& cfg, std::size_t d) {
  const std::string text = at(cfg, "projection").dump();
  return make<sa_projection>(
      [&](sa_projection** out) { return sa_projection_from_json(text.c_str(), d, out); });
}

Owned<sa_measure> measure_of(const Json& cfg, const sa_system* sys) {
  if (present(cfg, "measure")) {
    const std::string text = cfg.at("measure").dump();
    return make<sa_measure>([&](sa_measure** out) { return sa_measure_from_json(text.c_str(), out); });
  }
  if (cfg.at("system").is_string()) {
    const std::string name = cfg.at("system").get<std::string>();
    return make<sa_measure>([&](sa_measure** out) { return sa_measure_preset(name.c_str(), out); });
  }
  const std::vector<double> probs(sa_system_size(sys), 1.0 / static_cast<double>(sa_system_size(sys)));
  return make<sa_measure>(
      [&](sa_measure** out) { return sa_measure_bernoulli(probs.size(), probs.data(), out); });
}

Owned<sa_cloud> sample_cloud(const Json& cfg, const sa_system* sys, unsigned workers) {
  std::vector<double> probs;
  if (present(cfg, "probs")) probs = as_reals(cfg.at("probs"), "probs");
  const auto n = as_uint(cfg, "points");
  const auto seed = as_uint(cfg, "seed");
  return make<sa_cloud>([&](sa_cloud** out) {
    return sa_chaos_game(sys, probs.empty() ? nullptr : probs.data(), n, seed, workers, out);
  });
}

unsigned narrow(std::uint64_t x, const char* key) {
  if (x > 0xffffffffULL) invalid(std::string("'") + key + "' is too large");
  return static_cast<unsigned>(x);
}

// Commands ---------------------------------------------------------------------

struct Command {
  std::string name;
  std::string help;
  Json defaults;
  std::function<Json(const Json&, unsigned)> run;
};

Json cmd_pressure(const Json& cfg, unsigned workers) {
  const auto sys = system_of(cfg);
  const auto q = projection_of(cfg, sa_system_dimension(sys.get()));
  const sa_exec e = exec_of(cfg, workers);
  return fetch([&](char** out) {
    return sa_pressure(sys.get(), q.get(), as_real(cfg, "s"), narrow(as_uint(cfg, "n_max"), "n_max"),
                       narrow(as_uint(cfg, "n_min"), "n_min"), &e, out);
  });
}

Json cmd_dim(const Json& cfg, unsigned workers) {
  const auto sys = system_of(cfg);
  check(sa_require_contracting(sys.get()));
  const auto q = projection_of(cfg, sa_system_dimension(sys.get()));
  const sa_exec e = exec_of(cfg, workers);
  return fetch([&](char** out) {
    return sa_dim_aff_q(sys.get(), q.get(), narrow(as_uint(cfg, "n"), "n"), as_real(cfg, "tol"), &e,
                        out);
  });
}

Json cmd_render(const Json& cfg, unsigned workers) {
  const auto sys = system_of(cfg);
  const auto q = projection_of(cfg, sa_system_dimension(sys.get()));
  const auto cloud = sample_cloud(cfg, sys.get(), workers);
  const auto projected =
      make<sa_cloud>([&](sa_cloud** out) { return sa_project_points(q.get(), cloud.get(), workers, out); });
  const Json& axes = at(cfg, "axes");
  if (!axes.is_array() || axes.size() != 2) invalid("'axes' must be two non-negative integers");
  const Json pair = {{"x", axes[0]}, {"y", axes[1]}};
  const std::string ppm = as_text(cfg, "ppm");
  check(sa_export_ppm(projected.get(), ppm.c_str(), as_uint(cfg, "width"), as_uint(cfg, "height"),
                      as_uint(pair, "x"), as_uint(pair, "y")));
  Json result = {{"points", sa_cloud_size(projected.get())},
                 {"dimension", sa_cloud_dimension(projected.get())},
                 {"ppm", ppm},
                 {"csv", nullptr}};
  if (present(cfg, "csv")) {
    const std::string csv = as_text(cfg, "csv");
    check(sa_export_csv(projected.get(), csv.c_str()));
    result["csv"] = csv;
  }
  return result;
}

Json cmd_boxdim(const Json& cfg, unsigned workers) {
  Owned<sa_cloud> cloud;
  if (present(cfg, "input")) {
    const std::string path = as_text(cfg, "input");
    cloud = make<sa_cloud>([&](sa_cloud** out) { return sa_import_csv(path.c_str(), out); });
  } else {
    const auto sys = system_of(cfg);
    const auto q = projection_of(cfg, sa_system_dimension(sys.get()));
    const auto raw = sample_cloud(cfg, sys.get(), workers);
    cloud = make<sa_cloud>([&](sa_cloud** out) { return sa_project_points(q.get(), raw.get(), workers, out); });
  }
  const double hi = present(cfg, "delta_hi") ? as_real(cfg, "delta_hi") : 0.0;
  const double lo = present(cfg, "delta_lo") ? as_real(cfg, "delta_lo") : 0.0;
  return fetch([&](char** out) {
    return sa_box_dim_fit(cloud.get(), hi, lo, as_uint(cfg, "scales"), workers, out);
  });
}

Json cmd_lyapunov(const Json& cfg, unsigned workers) {
  const auto sys = system_of(cfg);
  const auto mu = measure_of(cfg, sys.get());
  return fetch([&](char** out) {
    return sa_lyapunov(sys.get(), mu.get(), as_uint(cfg, "n"), as_uint(cfg, "trials"),
                       as_uint(cfg, "seed"), workers, out);
  });
}

Json cmd_exactness(const Json& cfg, unsigned workers) {
  const auto sys = system_of(cfg);
  const auto q = projection_of(cfg, sa_system_dimension(sys.get()));
  const auto mu = measure_of(cfg, sys.get());
  double s = 0.0;
  const bool with_s = present(cfg, "s");
  if (with_s) s = as_real(cfg, "s");
  return fetch([&](char** out) {
    return sa_exactness(sys.get(), q.get(), mu.get(), as_uint(cfg, "n"), as_uint(cfg, "trials"),
                        as_uint(cfg, "seed"), with_s ? &s : nullptr, workers, out);
  });
}

Owned<sa_sumset> sumset_of(const Json& cfg, const sa_exec& e) {
  const unsigned dim_depth = narrow(as_uint(cfg, "dim_depth"), "dim_depth");
  if (!present(cfg, "factors"))
    return make<sa_sumset>([&](sa_sumset** out) { return sa_sumset_demo(dim_depth, &e, out); });
  const std::string text = cfg.at("factors").dump();
  return make<sa_sumset>(
      [&](sa_sumset** out) { return sa_sumset_from_json(text.c_str(), dim_depth, &e, out); });
}

Json cmd_sumset_demo(const Json& cfg, unsigned workers) {
  const sa_exec e = exec_of(cfg, workers);
  const auto sumset = sumset_of(cfg, e);
  unsigned depth = 0;
  if (present(cfg, "depth")) {
    depth = narrow(as_uint(cfg, "depth"), "depth");
  } else {
    const auto product = make<sa_system>([&](sa_system** out) { return sa_sumset_product(sumset.get(), out); });
    check(sa_max_feasible_depth(sa_system_size(product.get()),
                                e.leaf_budget ? e.leaf_budget : 100000000ULL, &depth));
  }
  const auto k1 = as_uint(cfg, "k1"), k2 = as_uint(cfg, "k2");
  return {{"sumset", fetch([&](char** out) { return sa_sumset_to_json(sumset.get(), out); })},
          {"domination",
           fetch([&](char** out) { return sa_domination_check(sumset.get(), k1, k2, depth, &e, out); })},
          {"pressure_drop",
           fetch([&](char** out) { return sa_sumset_pressure_drop(sumset.get(), depth, &e, out); })}};
}

Json cmd_sumset(const Json& cfg, unsigned workers) {
  const sa_exec e = exec_of(cfg, workers);
  const auto sumset = sumset_of(cfg, e);
  const auto product = make<sa_system>([&](sa_system** out) { return sa_sumset_product(sumset.get(), out); });
  return {{"sumset", fetch([&](char** out) { return sa_sumset_to_json(sumset.get(), out); })},
          {"product", fetch([&](char** out) { return sa_system_to_json(product.get(), out); })}};
}

Json cmd_gen_perm(const Json& cfg, unsigned) {
  const auto sys = make<sa_system>([&](sa_system** out) {
    return sa_gen_perm_example(as_uint(cfg, "d"), as_real(cfg, "entry_low"), as_real(cfg, "entry_high"),
                               as_uint(cfg, "n_maps"), as_uint(cfg, "seed"), out);
  });
  return fetch([&](char** out) { return sa_system_to_json(sys.get(), out); });
}

Json cmd_tensor(const Json& cfg, unsigned) {
  const auto sys = make<sa_system>([&](sa_system** out) {
    return sa_tensor_example(as_uint(cfg, "d1"), as_uint(cfg, "d2"), as_uint(cfg, "n_maps"),
                             as_real(cfg, "scale"), as_uint(cfg, "seed"), out);
  });
  return fetch([&](char** out) { return sa_system_to_json(sys.get(), out); });
}

void report_progress(int id, const char* name, int pass, double seconds, double render, void*) {
  std::fprintf(stderr, "criterion %2d %-28s %s  %.1f s", id, name, pass ? "PASS" : "FAIL", seconds);
  if (render > 0.0) std::fprintf(stderr, "  (slowest render %.1f s)", render);
  std::fputc('\n', stderr);
}

Json cmd_selftest(const Json& cfg, unsigned workers) {
  std::vector<int> ids;
  if (present(cfg, "criteria")) {
    const Json& list = cfg.at("criteria");
    if (!list.is_array()) invalid("'criteria' must be an array of ids");
    for (const auto& id : list) {
      if (!id.is_number_integer()) invalid("'criteria' must be an array of ids");
      ids.push_back(id.get<int>());
    }
  }
  return fetch([&](char** out) {
    return sa_selftest(as_uint(cfg, "seed"), workers, ids.empty() ? nullptr : ids.data(), ids.size(),
                       report_progress, nullptr, out);
  });
}

std::vector<Command> commands() {
  const Json none = nullptr;
  return {
      {"pressure", "depth-n partition sums and the pressure estimate",
       {{"system", "triangular"}, {"projection", "coord:0"}, {"s", 1.0}, {"n_max", 20},
        {"n_min", 1}, {"exec", default_exec()}},
       cmd_pressure},
      {"dim", "projected affinity dimension estimate",
       {{"system", "thirds-triangle"}, {"projection", "identity"}, {"n", 8}, {"tol", 1e-4},
        {"exec", default_exec()}},
       cmd_dim},
      {"render", "chaos-game sample written as PPM and CSV",
       {{"system", "thirds-triangle"}, {"projection", "identity"}, {"probs", none},
        {"points", 100000}, {"seed", 1}, {"width", 512}, {"height", 512}, {"axes", {0, 1}},
        {"ppm", "render.ppm"}, {"csv", "render.csv"}},
       cmd_render},
      {"boxdim", "box-counting dimension of a CSV cloud or a fresh sample",
       {{"input", none}, {"system", "thirds-triangle"}, {"projection", "identity"}, {"probs", none},
        {"points", 1000000}, {"seed", 1}, {"delta_hi", none}, {"delta_lo", none}, {"scales", 7}},
       cmd_boxdim},
      {"lyapunov", "Lyapunov exponents of the random matrix product",
       {{"system", "phase-perm"}, {"measure", none}, {"n", 10000}, {"trials", 20}, {"seed", 1}},
       cmd_lyapunov},
      {"exactness", "per-orbit growth rates and their clusters",
       {{"system", "phase-perm"}, {"projection", "coord:0"}, {"measure", none}, {"n", 2000},
        {"trials", 500}, {"seed", 1}, {"s", none}},
       cmd_exactness},
      {"sumset-demo", "factor dimensions, domination check and pressure drop",
       {{"factors", none}, {"dim_depth", 6}, {"depth", none}, {"k1", 2}, {"k2", 2},
        {"exec", {{"leaf_budget", 1000000}, {"prefix_length", 3}}}},
       cmd_sumset_demo},
      {"selftest", "run the acceptance suite", {{"seed", 20261016}, {"criteria", none}}, cmd_selftest},
      {"gen-perm", "generalized permutation system",
       {{"d", 2}, {"entry_low", 0.1}, {"entry_high", 0.45}, {"n_maps", 2}, {"seed", 1}}, cmd_gen_perm},
      {"tensor", "tensor-product system",
       {{"d1", 2}, {"d2", 2}, {"n_maps", 3}, {"scale", 0.4}, {"seed", 1}}, cmd_tensor},
      {"sumset", "direct-sum system of two tensor factor lists",
       {{"factors", none}, {"dim_depth", 6}, {"exec", default_exec()}}, cmd_sumset},
  };
}

void write_error(const Failure& f) {
  Json err = {{"code", sa_status_name(f.status)},
              {"message", f.message},
              {"exit_code", exit_code(f.status)}};
  if (f.status == SA_ERR_RESOURCE) err["max_feasible_depth"] = f.max_feasible_depth;
  std::cerr << Json{{"error", err}}.dump(2) << '\n';
}

void write_document(const Json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{SA_ERR_IO, "cannot write '" + path + "'"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensions of self-affine sets and their projections"};
  app.set_version_flag("--version", sa_version());
  app.require_subcommand(1);

  const auto table = commands();
  std::vector<Invocation> invocations(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto* sub = app.add_subcommand(table[i].name, table[i].help);
    auto& inv = invocations[i];
    sub->add_option("--config", inv.config_path, "JSON config file");
    sub->add_option("--set", inv.overrides, "override a config field, key=value (repeatable)");
    sub->add_option("--out", inv.out, "write the result document here instead of stdout");
    sub->add_option("--workers", inv.workers, "worker threads (0: all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    write_error({SA_ERR_INVALID_INPUT, e.what()});
    return exit_code(SA_ERR_INVALID_INPUT);
  }

  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!app.got_subcommand(table[i].name)) continue;
    const auto& inv = invocations[i];
    try {
      const Json cfg = resolve_config(inv, table[i].defaults);
      Json result = table[i].run(cfg, inv.workers);
      const bool failed_suite = table[i].name == "selftest" && !result.value("all_pass", false);
      write_document({{"command", table[i].name}, {"config", cfg}, {"result", std::move(result)}},
                     inv.out);
      return failed_suite ? 1 : 0;
    } catch (const Failure& f) {
      write_error(f);
      return exit_code(f.status);
    } catch (const std::exception& e) {
      write_error({SA_ERR_INTERNAL, e.what()});
      return 1;
    }
  }
  return 1;
}
