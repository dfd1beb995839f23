// upsilon_lab: command-line front end.
//
//   upsilon_lab run --config run.toml [--seed N] [--out reports.jsonl] [--jobs N]
//   upsilon_lab dist a.csv b.csv
//   upsilon_lab sample --space '{"kind":"euclidean","dim":2}' --radius 3 --intensity 1 --seed 7
//   upsilon_lab evolve --input gamma.csv --times 0.1,0.2 --samples 10 --seed 7
//   upsilon_lab hopflax --input gamma.csv --functional '{"kind":"distance_sum","center":[0]}' --t 0.5

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>

#include "upsilon/dynamics.hpp"
#include "upsilon/errors.hpp"
#include "upsilon/hopf_lax.hpp"
#include "upsilon/runner.hpp"
#include "upsilon/transport.hpp"

namespace {

using namespace upsilon;

// Writes to the file named by `path`, or stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

nlohmann::json parse_json_arg(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bad JSON argument: ") + e.what());
  }
}

// A JSON literal, or the path of a file holding one.
nlohmann::json json_arg_or_file(const std::string& text) {
  std::ifstream in(text);
  if (in) {
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(text + ": " + e.what());
    }
  }
  return parse_json_arg(text);
}

Vector parse_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transport geometry and curvature checks on configuration spaces"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  int jobs = 0;

  auto* run_cmd = app.add_subcommand("run", "Execute the checks listed in a TOML run configuration");
  run_cmd->add_option("--config", config_path, "Run configuration (TOML)")->required();
  auto* run_seed = run_cmd->add_option("--seed", seed, "Override the master seed");
  run_cmd->add_option("--out", out_path, "Report file (JSON lines); stdout by default");
  run_cmd->add_option("--jobs", jobs, "Checks executed concurrently");

  std::string file_a, file_b;
  auto* dist_cmd = app.add_subcommand("dist", "Print the transport distance between two configuration files");
  dist_cmd->add_option("a", file_a)->required();
  dist_cmd->add_option("b", file_b)->required();
  bool dist_json = false;
  dist_cmd->add_flag("--json", dist_json, "Print the distance and matching as JSON");

  std::string space_text = R"({"kind":"euclidean","dim":2})";
  std::vector<double> center, lower, upper;
  double radius = 1.0, intensity = 1.0;
  auto* sample_cmd = app.add_subcommand("sample", "Sample a Poisson configuration in a window and write CSV");
  sample_cmd->add_option("--space", space_text, "Space descriptor as JSON");
  sample_cmd->add_option("--center", center, "Ball center in ambient coordinates (default: model origin)")->delimiter(',');
  sample_cmd->add_option("--radius", radius, "Ball radius");
  auto* lower_opt = sample_cmd->add_option("--lower", lower, "Box lower corner (Euclidean)")->delimiter(',');
  auto* upper_opt = sample_cmd->add_option("--upper", upper, "Box upper corner (Euclidean)")->delimiter(',');
  lower_opt->needs(upper_opt);
  upper_opt->needs(lower_opt);
  sample_cmd->add_option("--intensity", intensity, "Intensity relative to volume");
  sample_cmd->add_option("--seed", seed, "Seed")->required();
  sample_cmd->add_option("--out", out_path, "Output CSV; stdout by default");

  std::string input_path;
  std::vector<double> times;
  std::size_t n_samples = 1;
  double substep = 1e-3;
  auto* evolve_cmd = app.add_subcommand("evolve", "Write heat-flow trajectories of a configuration as CSV");
  evolve_cmd->add_option("--input", input_path, "Configuration file")->required();
  evolve_cmd->add_option("--times", times, "Observation times")->delimiter(',')->required();
  evolve_cmd->add_option("--samples", n_samples, "Number of independent paths");
  evolve_cmd->add_option("--substep", substep, "Random-walk step on curved spaces");
  evolve_cmd->add_option("--seed", seed, "Seed")->required();
  evolve_cmd->add_option("--out", out_path, "Output CSV; stdout by default");

  std::string functional_text;
  double t = 1.0;
  int starts = 8;
  auto* hl_cmd = app.add_subcommand("hopflax", "Evaluate the Hopf-Lax semigroup at a configuration");
  hl_cmd->add_option("--input", input_path, "Configuration file")->required();
  hl_cmd->add_option("--functional", functional_text, "Functional as JSON, or a JSON file")->required();
  hl_cmd->add_option("--t", t, "Time")->required();
  hl_cmd->add_option("--starts", starts, "Multistart count");
  hl_cmd->add_option("--seed", seed, "Seed for the perturbed starts");
  hl_cmd->add_option("--out", out_path, "Output JSON; stdout by default");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      RunConfig cfg = load_run_config(config_path);
      if (*run_seed) cfg.seed = seed;
      if (!out_path.empty()) cfg.output = out_path;
      if (jobs > 0) cfg.jobs = jobs;
      Output out(cfg.output);
      return run(cfg, out.stream(), std::cerr, cfg.jobs);
    }
    if (*dist_cmd) {
      const Configuration a = read_configuration_file(file_a);
      const Configuration b = read_configuration_file(file_b);
      const ExtendedCost d = d_upsilon(a, b);
      if (dist_json) {
        std::unique_ptr<Matching> m;
        if (!d.is_infinite()) m = std::make_unique<Matching>(optimal_matching(a, b));
        std::cout << transport_to_json(d, m.get()).dump() << '\n';
      } else if (d.is_infinite()) {
        std::cout << "inf\n";
      } else {
        std::cout << "d2=" << format_double(d.squared) << '\n' << "d=" << format_double(d.distance()) << '\n';
      }
      return 0;
    }
    if (*sample_cmd) {
      const SpaceForm space = space_from_json(parse_json_arg(space_text));
      RandomStream rng(seed);
      const Region region = !lower.empty() ? Region::box(parse_vector(lower), parse_vector(upper))
                                           : Region::ball(center.empty() ? model_origin(space)
                                                                         : BasePoint(parse_vector(center)),
                                                          radius);
      const Configuration gamma = sample_poisson(space, region, intensity, rng);
      Output out(out_path);
      write_configuration_csv(out.stream(), gamma);
      return 0;
    }
    if (*evolve_cmd) {
      const Configuration gamma = read_configuration_file(input_path);
      Output out(out_path);
      write_trajectories_csv(out.stream(), gamma, times, n_samples, RandomStream(seed), HeatOptions{substep, false});
      return 0;
    }
    if (*hl_cmd) {
      const Configuration gamma = read_configuration_file(input_path);
      const Functional f = Functional::from_json(json_arg_or_file(functional_text));
      HopfLaxOptions opts;
      opts.starts = starts;
      opts.seed = seed;
      const HopfLaxResult r = hopf_lax(f, gamma, t, opts);
      Output out(out_path);
      out.stream() << nlohmann::json{{"t", t},
                                     {"value", extended_number(r.value)},
                                     {"converged", r.converged},
                                     {"sweeps", r.sweeps},
                                     {"minimizer", configuration_to_json(r.minimizer)}}
                          .dump()
                   << '\n';
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidPointError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
