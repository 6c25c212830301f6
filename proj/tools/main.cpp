#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <crossfit/errors.hpp>
#include <crossfit/json_fmt.hpp>
#include <crossfit/version.hpp>

#include "runner.hpp"

namespace {

using crossfit::tools::kExitInputError;
using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw crossfit::InputError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw crossfit::ParseError(path, std::string("invalid JSON: ") + e.what());
  }
}

struct CommonFlags {
  int seeds = 32;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  double rank_threshold = 1e-6;
};

void add_solver_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seeds", flags.seeds, "Multi-start seed count");
  cmd->add_option("--seed", flags.seed, "Base random seed");
  cmd->add_option("--tol", flags.tol, "Residual tolerance");
  cmd->add_option("--rank-threshold", flags.rank_threshold,
                  "Relative singular-value cutoff for rank decisions");
}

json solver_options(const CommonFlags& flags) {
  return json{{"seeds", flags.seeds},
              {"seed", flags.seed},
              {"tol", flags.tol},
              {"rank_threshold", flags.rank_threshold}};
}

int execute(const std::string& command, const std::vector<std::string>& body_files,
            const json& options, const std::string& output_path) {
  std::vector<json> bodies;
  bodies.reserve(body_files.size());
  for (const std::string& path : body_files) bodies.push_back(read_json_file(path));

  const auto start = std::chrono::steady_clock::now();
  crossfit::tools::RunResult result = crossfit::tools::run_command(command, bodies, options);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!output_path.empty()) {
    file.open(output_path, std::ios::binary);
    if (!file) throw crossfit::InputError("cannot open output file: " + output_path);
    os = &file;
  }
  if (result.is_raw) {
    *os << result.raw;
  } else {
    const json full =
        crossfit::tools::attach_manifest(result.report, command, bodies, options, wall_ms);
    crossfit::dump_json_17(full, *os, 2);
    *os << '\n';
  }
  return result.exit_code;
}

int run_replay(const std::string& report_file) {
  const json report = read_json_file(report_file);
  if (!report.contains("manifest")) throw crossfit::InputError("replay: report has no manifest");
  const json& manifest = report.at("manifest");
  const std::string command = manifest.at("command").get<std::string>();
  const std::vector<json> bodies = manifest.at("bodies").get<std::vector<json>>();
  const json& options = manifest.at("options");

  const auto start = std::chrono::steady_clock::now();
  crossfit::tools::RunResult result = crossfit::tools::run_command(command, bodies, options);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (result.is_raw) {
    std::cout << result.raw;
  } else {
    const json full =
        crossfit::tools::attach_manifest(result.report, command, bodies, options, wall_ms);
    crossfit::dump_json_17(full, std::cout, 2);
    std::cout << '\n';
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finds regular crosspolytopes inscribed in smooth convex bodies and level-set "
               "hypersurfaces"};
  app.set_version_flag("--version", std::string("crossfit ") + crossfit::kVersion);
  app.require_subcommand(1);

  std::string body_file, end_body_file, solution_file, start_file, report_file, output_path;
  std::string form = "levelset", format = "json";
  CommonFlags flags;
  int steps = 50;
  double step_size = 0.05;
  int grid_euler = 24, grid_center = 9, grid_scale = 17;
  double verify_tol = 1e-9;

  CLI::App* solve = app.add_subcommand("solve", "Multi-start search for inscribed crosspolytopes");
  solve->add_option("body", body_file, "Body JSON file")->required();
  solve->add_option("--form", form, "Residual form: levelset or chord");
  add_solver_flags(solve, flags);
  solve->add_option("-o,--output", output_path, "Write the report to a file instead of stdout");

  CLI::App* cont = app.add_subcommand("continue", "Homotopy continuation between two bodies");
  cont->add_option("start", body_file, "Start body JSON file")->required();
  cont->add_option("end", end_body_file, "End body JSON file")->required();
  add_solver_flags(cont, flags);
  cont->add_option("-o,--output", output_path, "Write the report to a file instead of stdout");

  CLI::App* sweep = app.add_subcommand("sweep", "Walk the solution family from a solution");
  sweep->add_option("body", body_file, "Body JSON file")->required();
  sweep->add_option("--start", start_file, "Start solution JSON file (default: solve first)");
  sweep->add_option("--steps", steps, "Number of sweep steps");
  sweep->add_option("--step-size", step_size, "Chart step size");
  add_solver_flags(sweep, flags);
  sweep->add_option("-o,--output", output_path, "Write the report to a file instead of stdout");

  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force grid search (d = 3)");
  oracle->add_option("body", body_file, "Body JSON file")->required();
  oracle->add_option("--grid-euler", grid_euler, "Euler angle resolution");
  oracle->add_option("--grid-center", grid_center, "Center grid resolution per axis");
  oracle->add_option("--grid-scale", grid_scale, "Scale grid resolution");
  add_solver_flags(oracle, flags);
  oracle->add_option("-o,--output", output_path, "Write the report to a file instead of stdout");

  CLI::App* verify = app.add_subcommand("verify", "Audit a solution against a body");
  verify->add_option("body", body_file, "Body JSON file")->required();
  verify->add_option("solution", solution_file, "Solution or configuration JSON file")->required();
  verify->add_option("--tol", verify_tol, "Verification tolerance");
  verify->add_option("-o,--output", output_path, "Write the report to a file instead of stdout");

  CLI::App* exp = app.add_subcommand("export", "Export solution geometry");
  exp->add_option("solution", solution_file, "Solution or configuration JSON file")->required();
  exp->add_option("body", body_file, "Body JSON file")->required();
  exp->add_option("--format", format, "Output format: json or obj");
  exp->add_option("-o,--output", output_path, "Write to a file instead of stdout");

  CLI::App* replay = app.add_subcommand("replay", "Re-run a report's manifest");
  replay->add_option("report", report_file, "Report JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      json options = solver_options(flags);
      options["form"] = form;
      return execute("solve", {body_file}, options, output_path);
    }
    if (cont->parsed()) {
      return execute("continue", {body_file, end_body_file}, solver_options(flags), output_path);
    }
    if (sweep->parsed()) {
      json options = solver_options(flags);
      options["steps"] = steps;
      options["step_size"] = step_size;
      if (!start_file.empty()) options["start_config"] = read_json_file(start_file);
      return execute("sweep", {body_file}, options, output_path);
    }
    if (oracle->parsed()) {
      json options = solver_options(flags);
      options["grid_euler"] = grid_euler;
      options["grid_center"] = grid_center;
      options["grid_scale"] = grid_scale;
      return execute("oracle", {body_file}, options, output_path);
    }
    if (verify->parsed()) {
      json options;
      options["tol"] = verify_tol;
      options["solution"] = read_json_file(solution_file);
      return execute("verify", {body_file}, options, output_path);
    }
    if (exp->parsed()) {
      json options;
      options["format"] = format;
      options["solution"] = read_json_file(solution_file);
      return execute("export", {body_file}, options, output_path);
    }
    if (replay->parsed()) {
      return run_replay(report_file);
    }
  } catch (const crossfit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
