#include "upsilon/runner.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <toml.hpp>

#include "upsilon/approximation.hpp"
#include "upsilon/errors.hpp"
#include "upsilon/generators.hpp"
#include "upsilon/transport.hpp"

namespace upsilon {

namespace {

nlohmann::json to_json_node(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json j = nlohmann::json::object();
    for (auto&& [k, v] : *t) j[std::string(k.str())] = to_json_node(v);
    return j;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json j = nlohmann::json::array();
    for (auto&& v : *a) j.push_back(to_json_node(v));
    return j;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ParseError("unsupported TOML value (dates and times are not used)");
}

struct Instance {
  std::size_t index;
  RandomStream gen;
  std::uint64_t seed;
};

struct Context {
  const RunConfig& config;
  const CheckSpec& spec;
  RandomStream job;

  const nlohmann::json& p() const { return spec.params; }

  template <class T>
  T get(const char* key, T fallback) const {
    if (!p().contains(key)) return fallback;
    try {
      return p().at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ParseError("check \"" + spec.name + "\": parameter \"" + key + "\" has the wrong type");
    }
  }

  SpaceForm space() const {
    return p().contains("space") ? space_from_json(p().at("space")) : config.space;
  }

  std::size_t samples() const {
    if (p().contains("samples")) return get<std::size_t>("samples", 0);
    const auto it = config.samples.find(spec.name);
    return it != config.samples.end() ? it->second : config.default_samples;
  }

  double tolerance(double fallback) const {
    const auto it = config.tolerances.find(spec.name);
    return get<double>("tolerance", it != config.tolerances.end() ? it->second : fallback);
  }

  McOptions mc() const {
    McOptions o;
    o.antithetic = get<bool>("antithetic", false);
    o.substep = get<double>("substep", 1e-3);
    return o;
  }

  /// Explicit configurations, or `count` random ones of `points` points each.
  std::vector<Configuration> configurations(const SpaceForm& space, std::size_t count,
                                            RandomStream& rng) const {
    std::vector<Configuration> out;
    if (p().contains("configurations")) {
      for (const auto& c : p().at("configurations")) {
        out.push_back(configuration_from_json({{"space", space_to_json(space)}, {"points", c}}));
      }
      if (out.size() != count) {
        throw ParseError("check \"" + spec.name + "\" needs " + std::to_string(count) + " configurations");
      }
      return out;
    }
    const auto points = get<std::size_t>("points", 3);
    const double extent = get<double>("extent", 2.0);
    for (std::size_t k = 0; k < count; ++k) out.push_back(random_configuration(space, points, extent, rng));
    return out;
  }

  CylinderFunction cylinder(const SpaceForm& space, RandomStream& rng) const {
    CylinderFunction f = p().contains("function")
                             ? cylinder_from_json(p().at("function"))
                             : random_cylinder(space, get<int>("inners", 2), get<double>("extent", 2.0), rng);
    validate_cylinder(space, f);
    return f;
  }

  std::vector<Instance> instances() const {
    const std::size_t n = p().contains("configurations") ? 1 : get<std::size_t>("instances", 1);
    std::vector<Instance> out;
    for (std::size_t i = 0; i < n; ++i) {
      const RandomStream s = job.derive(i);
      out.push_back({i, s.derive(0), s.derive(1).seed()});
    }
    return out;
  }

  void stamp(CheckReport& r, const Instance& inst) const {
    r.seed = inst.seed;
    r.params["instance"] = inst.index;
    r.params["config"] = p();
  }
};

using Executor = std::function<std::vector<CheckReport>(const Context&)>;

std::vector<CheckReport> run_quadruple(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  const double k = c.get<double>("curvature", space.sectional_curvature());
  for (auto inst : c.instances()) {
    const auto g = c.configurations(space, 4, inst.gen);
    CheckReport r = check_quadruple(g[0], g[1], g[2], g[3], k, c.tolerance(1e-9));
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_bochner(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  for (auto inst : c.instances()) {
    const CylinderFunction f = c.cylinder(space, inst.gen);
    const auto g = c.configurations(space, 1, inst.gen);
    CheckReport r = check_bochner(f, g[0], c.tolerance(1e-8));
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_gradient_estimate(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  GradientEstimateOptions opts;
  opts.mc = c.mc();
  opts.fd_step = c.get<double>("fd_step", 1e-4);
  for (auto inst : c.instances()) {
    const CylinderFunction f = c.cylinder(space, inst.gen);
    const auto g = c.configurations(space, 1, inst.gen);
    CheckReport r = check_gradient_estimate(f, g[0], c.get<double>("t", 0.1), c.samples(), inst.seed, opts);
    r.tolerance = c.tolerance(0.0);
    finalize_report(r);
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_contraction(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  const std::string mode = c.get<std::string>("mode", "coupled");
  if (mode != "coupled" && mode != "independent") throw ParseError("contraction mode must be coupled or independent");
  for (auto inst : c.instances()) {
    const auto g = c.configurations(space, 2, inst.gen);
    CheckReport r = check_contraction(g[0], g[1], c.get<double>("t", 0.05), c.samples(), inst.seed,
                                      mode == "coupled" ? ContractionMode::coupled : ContractionMode::independent,
                                      c.mc());
    r.tolerance = c.tolerance(1e-12);
    if (!r.skipped) finalize_report(r);
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_log_harnack(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  for (auto inst : c.instances()) {
    const Functional f = c.p().contains("functional")
                             ? Functional::from_json(c.p().at("functional"))
                             : Functional::exp_cylinder(c.cylinder(space, inst.gen));
    auto g = c.configurations(space, 2, inst.gen);
    if (c.get<bool>("identical", false)) g[1] = g[0];
    CheckReport r = check_log_harnack(f, g[0], g[1], c.get<double>("t", 0.1), c.samples(), inst.seed, c.mc());
    r.tolerance = c.tolerance(0.0);
    if (!r.skipped) finalize_report(r);
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> t_grid(const Context& c) {
  if (c.p().contains("t_grid")) return c.get<std::vector<double>>("t_grid", {});
  const double start = c.get<double>("t_start", 0.1);
  const double step = c.get<double>("t_step", 1e-3);
  const auto count = c.get<std::size_t>("t_count", 5);
  std::vector<double> grid;
  for (std::size_t k = 0; k < count; ++k) grid.push_back(start + step * static_cast<double>(k));
  return grid;
}

std::vector<CheckReport> run_hamilton_jacobi(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  const Functional f = c.p().contains("functional") ? Functional::from_json(c.p().at("functional"))
                                                    : Functional::distance_sum(model_origin(space), 1.0);
  HopfLaxOptions opts;
  opts.starts = c.get<int>("starts", 8);
  opts.tolerance = c.get<double>("solver_tolerance", 1e-10);
  opts.max_sweeps = c.get<int>("max_sweeps", 500);
  for (auto inst : c.instances()) {
    const auto g = c.configurations(space, 1, inst.gen);
    opts.seed = inst.seed;
    CheckReport r = check_hj(f, g[0], t_grid(c), c.tolerance(1e-3), opts);
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_heat_tail(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  const double t = c.get<double>("t", 1.0);
  const double r_tail = c.p().contains("r") ? c.get<double>("r", 0.0)
                                            : c.get<double>("r_over_sqrt_t", 4.0) * std::sqrt(t);
  for (auto inst : c.instances()) {
    CheckReport r = check_heat_tail(space, r_tail, t, c.samples(), c.get<double>("lambda", 0.45), inst.seed, c.mc());
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_bishop_gromov(const Context& c) {
  std::vector<CheckReport> out;
  std::vector<double> grid = c.get<std::vector<double>>("r_grid", {});
  if (grid.empty()) {
    for (int r = 1; r <= 10; ++r) grid.push_back(r);
  }
  for (auto inst : c.instances()) {
    CheckReport r = check_bishop_gromov(c.space(), grid);
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_appendix_convergence(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  const auto grid = c.get<std::vector<std::size_t>>("n_grid", {1, 2, 4, 8, 16});
  if (grid.empty()) throw ParseError("appendix_convergence needs a nonempty n_grid");
  const std::string mode = c.get<std::string>("mode", "identical");
  if (mode != "identical" && mode != "generic") throw ParseError("appendix_convergence mode must be identical or generic");
  const std::size_t n_samples = c.samples();
  for (auto inst : c.instances()) {
    std::vector<Configuration> mu, nu;
    if (mode == "identical") {
      const auto g = c.configurations(space, 1, inst.gen);
      mu.assign(n_samples, g[0]);
      nu = mu;
    } else {
      const auto g = c.configurations(space, 2, inst.gen);
      // mu and nu: independent small heat perturbations of two base configurations.
      const double spread = c.get<double>("spread", 0.05);
      for (std::size_t k = 0; k < n_samples; ++k) {
        RandomStream rng = inst.gen.derive(k);
        mu.push_back(heat_step_config(g[0], spread, rng));
        nu.push_back(heat_step_config(g[1], spread, rng));
      }
    }
    const auto seq = check_appendix_convergence(mu, nu, grid, inst.seed);
    CheckReport r;
    r.check_name = "appendix_convergence";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& q : seq) rows.push_back({q.n, q.w2_estimate, q.std_error});
    r.params = {{"mode", mode}, {"sequence", rows}};
    if (mode == "identical") {
      // W2^2(mu, mu_n) <= 1/n at every grid point.
      std::size_t worst = 0;
      for (std::size_t k = 0; k < seq.size(); ++k) {
        const double excess = seq[k].w2_squared - 1.0 / static_cast<double>(seq[k].n);
        const double worst_excess = seq[worst].w2_squared - 1.0 / static_cast<double>(seq[worst].n);
        if (excess > worst_excess) worst = k;
      }
      r.statistic = seq[worst].w2_squared;
      r.bound = 1.0 / static_cast<double>(seq[worst].n);
      r.std_error = seq[worst].w2_squared_std_error;
    } else {
      r.statistic = seq.back().w2_estimate;
      r.bound = seq.front().w2_estimate;
    }
    r.tolerance = c.tolerance(0.0);
    finalize_report(r);
    c.stamp(r, inst);
    if (c.p().contains("csv")) {
      std::string path = c.get<std::string>("csv", "");
      if (inst.index > 0) path += "." + std::to_string(inst.index);
      std::ofstream csv(path);
      if (!csv) throw Error("cannot write " + path);
      write_convergence_csv(csv, seq);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckReport> run_entropy_smear(const Context& c) {
  std::vector<CheckReport> out;
  const SpaceForm space = c.space();
  const auto n = c.get<std::size_t>("n", 5);
  const double radius = c.get<double>("radius", 5.0);
  for (auto inst : c.instances()) {
    const Region ball = Region::ball(model_origin(space), radius);
    const auto g = c.configurations(space, 1, inst.gen);
    CheckReport r;
    r.check_name = "entropy_smear";
    if (restrict(g[0], ball).empty()) {
      r = skipped_report("entropy_smear", {{"n", n}, {"radius", radius}}, "empty_ball");
    } else {
      const EntropyBound e = entropy_smear_bound(g[0], ball, n);
      r.params = {{"n", n}, {"radius", radius}, {"k", e.k}, {"alpha", e.alpha}, {"constant", e.constant}};
      r.statistic = e.value;
      r.bound = e.envelope;
      r.tolerance = c.tolerance(0.0);
      finalize_report(r);
    }
    c.stamp(r, inst);
    out.push_back(std::move(r));
  }
  return out;
}

const std::map<std::string, Executor>& executors() {
  static const std::map<std::string, Executor> table = {
      {"quadruple", run_quadruple},
      {"bochner", run_bochner},
      {"gradient_estimate", run_gradient_estimate},
      {"contraction", run_contraction},
      {"log_harnack", run_log_harnack},
      {"hamilton_jacobi", run_hamilton_jacobi},
      {"heat_tail", run_heat_tail},
      {"bishop_gromov", run_bishop_gromov},
      {"appendix_convergence", run_appendix_convergence},
      {"entropy_smear", run_entropy_smear},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : executors()) v.push_back(k);
    return v;
  }();
  return names;
}

RunConfig parse_run_config(std::string_view toml_text, std::string_view source) {
  nlohmann::json doc;
  try {
    const toml::table table = toml::parse(toml_text, source);
    doc = to_json_node(table);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ParseError(msg.str());
  }

  RunConfig cfg;
  cfg.echo = doc;
  try {
    if (!doc.contains("seed")) throw ParseError("missing required key \"seed\"");
    if (!doc.at("seed").is_number_integer()) throw ParseError("\"seed\" must be an integer");
    cfg.seed = static_cast<std::uint64_t>(doc.at("seed").get<std::int64_t>());
    if (doc.contains("space")) cfg.space = space_from_json(doc.at("space"));
    cfg.output = doc.value("output", std::string());
    cfg.jobs = doc.value("jobs", 1);
    if (doc.contains("samples")) {
      for (const auto& [k, v] : doc.at("samples").items()) {
        if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
          throw ParseError("samples." + k + " must be a positive integer");
        }
        if (k == "default") {
          cfg.default_samples = v.get<std::size_t>();
        } else {
          cfg.samples[k] = v.get<std::size_t>();
        }
      }
    }
    if (doc.contains("tolerances")) {
      for (const auto& [k, v] : doc.at("tolerances").items()) {
        if (!v.is_number() || v.get<double>() < 0.0) throw ParseError("tolerances." + k + " must be a nonnegative number");
        cfg.tolerances[k] = v.get<double>();
      }
    }
    if (doc.contains("checks")) {
      for (const auto& entry : doc.at("checks")) {
        if (!entry.is_object() || !entry.contains("name")) throw ParseError("every [[checks]] entry needs a name");
        CheckSpec spec;
        spec.name = entry.at("name").get<std::string>();
        if (!executors().contains(spec.name)) throw ParseError("unknown check \"" + spec.name + "\"");
        spec.params = entry;
        spec.params.erase("name");
        cfg.checks.push_back(std::move(spec));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string(source) + ": " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path);
}

std::vector<CheckReport> execute_checks(const RunConfig& config, int jobs) {
  const std::size_t n = config.checks.size();
  std::vector<std::vector<CheckReport>> results(n);
  std::vector<std::exception_ptr> errors(n);
  const RandomStream master(config.seed);
  auto run_job = [&](std::size_t i) {
    try {
      const Context ctx{config, config.checks[i], master.derive(i)};
      results[i] = executors().at(config.checks[i].name)(ctx);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run_job(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<CheckReport> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    for (auto& r : results[i]) out.push_back(std::move(r));
  }
  return out;
}

int run(const RunConfig& config, std::ostream& reports, std::ostream& diagnostics, int jobs) {
  std::vector<CheckReport> results;
  try {
    results = execute_checks(config, jobs);
  } catch (const Error& e) {
    diagnostics << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    diagnostics << "error: " << e.what() << '\n';
    return 2;
  }
  bool all = true;
  for (const auto& r : results) {
    reports << r.to_json().dump() << '\n';
    all = all && r.passed;
  }
  reports.flush();
  return all ? 0 : 1;
}

std::string strip_runtime(const std::string& report_line) {
  nlohmann::json j = nlohmann::json::parse(report_line);
  j.erase("runtime_ms");
  return j.dump();
}

}  // namespace upsilon
